#include "curvops/report.hpp"

#include <cstdio>

namespace curvops {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

void write_reports(std::ostream& os, const std::vector<PropertyReport>& reports,
                   const std::string& header) {
  if (!header.empty()) os << "# " << header << "\n";
  for (const auto& r : reports) {
    os << "[record]\n";
    os << "id = " << r.id << "\n";
    os << "verdict = " << to_string(r.verdict) << "\n";
    os << "min_margin = " << format_double(r.min_margin) << "\n";
    if (r.alpha_threshold) os << "alpha_threshold = " << format_double(*r.alpha_threshold) << "\n";
    if (!r.sampling.empty()) os << "sampling = " << r.sampling << "\n";
    if (!r.note.empty()) os << "note = " << r.note << "\n";
    for (const auto& w : r.witnesses)
      os << "witness = " << w.input << " | margin = " << format_double(w.margin) << "\n";
    for (const auto& [key, value] : r.table)
      os << "table " << format_double(key) << " = " << format_double(value) << "\n";
    os << "\n";
  }
}

}  // namespace curvops
