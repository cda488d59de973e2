#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace curvops {

enum class Verdict { pass, fail, inconclusive };

const char* to_string(Verdict v);

struct Witness {
  std::string input;
  double margin;
};

/// Outcome of a predicate checker. Margins are signed distances to the pass
/// boundary with the tolerance already absorbed: pass requires min_margin >= 0
/// and a fail always carries a witness with a negative margin.
struct PropertyReport {
  std::string id;
  Verdict verdict = Verdict::inconclusive;
  double min_margin = 0.0;
  std::optional<double> alpha_threshold;
  std::vector<Witness> witnesses;
  std::string sampling;  // seed / counts / ranges descriptor
  std::vector<std::pair<double, double>> table;  // e.g. fitted eta(c)
  std::string note;

  bool passed() const { return verdict == Verdict::pass; }
};

/// Fixed-format float so reports are byte-identical across runs.
std::string format_double(double x);

/// Structured text serialization: one [record] block per report with
/// id, verdict, min-margin, threshold and the sampling descriptor.
void write_reports(std::ostream& os, const std::vector<PropertyReport>& reports,
                   const std::string& header = "");

}  // namespace curvops
