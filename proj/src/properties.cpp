#include "curvops/properties.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace curvops {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string seed_descr(const CheckOptions& o, int count) {
  std::ostringstream os;
  os << "seed=" << o.seed << " samples=" << count << " alpha_max=" << format_double(o.alpha_max);
  return os.str();
}

/// One sampled jet with enough context to evaluate x-dependent kernels.
struct FamilySample {
  bool has_point = false;
  ManifoldModel m;
  PointRep x;
  long node = -1;
  double s = 0.0;
  Vec v;
  SymMat A;
  double dist = 0.0;  // distance to the family center (dsq families)
};

EvalContext ctx_of(const FamilySample& fs) {
  EvalContext c;
  if (fs.has_point) {
    c.manifold = &fs.m;
    c.point = &fs.x;
  }
  c.node = fs.node;
  return c;
}

/// Jets of f_{x0} sampled in the ball around x0. When the kernel marks a
/// special point inside the ball it is appended as an extra sample carrying
/// the kernel's node label.
std::vector<FamilySample> dsq_family(const ManifoldModel& m, const PointRep& x0,
                                     const OperatorKernel* kernel, const CheckOptions& opts) {
  double rmax = convexity_radius(m, x0);
  if (!std::isfinite(rmax)) rmax = opts.ball_radius_cap;
  else rmax = std::min(0.9 * rmax, opts.ball_radius_cap);
  std::vector<FamilySample> out;
  const Frame e0 = some_frame(m, x0);
  for (int i = 0; i < opts.points; ++i) {
    Rng rng = Rng::stream(opts.seed, static_cast<std::uint64_t>(i));
    Vec dir(static_cast<std::size_t>(m.n));
    for (auto& d : dir) d = rng.normal();
    const double nn = norm(dir);
    if (nn < 1e-12) continue;
    const double d = rmax * (0.08 + 0.9 * rng.uniform01());
    const PointRep x = exp_map(m, x0, from_frame_coords(m, e0, (d / nn) * dir));
    const Jet2 jet = jet_of_dsq(m, x0, x, radial_frame(m, x0, x));
    out.push_back(FamilySample{true, m, x, -1, 0.0, jet.q, jet.Q, d});
  }
  if (kernel && kernel->special_point) {
    const double d = distance(m, x0, *kernel->special_point);
    if (d > 1e-6 && d < rmax) {
      const PointRep x = *kernel->special_point;
      const Jet2 jet = jet_of_dsq(m, x0, x, radial_frame(m, x0, x));
      out.push_back(FamilySample{true, m, x, kernel->special_node, 0.0, jet.q, jet.Q, d});
    }
  }
  return out;
}

std::vector<FamilySample> euclidean_family(int n, int count, std::uint64_t seed,
                                           double s_lo, double s_hi) {
  std::vector<FamilySample> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(i));
    FamilySample fs;
    fs.s = rng.uniform(s_lo, s_hi);
    fs.v = random_grad(n, rng);
    fs.A = random_sym(n, rng);
    out.push_back(std::move(fs));
  }
  return out;
}

struct AlphaOutcome {
  enum Kind { found, saturated, exhausted } kind = exhausted;
  double alpha = 0.0;
  double min_validated = -kInf;  // min normalized margin on the log grid
  double best = -kInf;           // best normalized value seen anywhere
};

/// Doubling from 1 up to alpha_max, then 60 bisection steps, then positivity
/// validated on a log grid up to alpha_max. `value` is normalized by the
/// caller's scale; positivity means value > tol.
AlphaOutcome alpha_search(const std::function<double(double)>& value, double alpha_max,
                          double tol) {
  AlphaOutcome out;
  double lo = 0.0, hi = -1.0;
  double v_last = value(1.0), v_prev = v_last;
  out.best = v_last;
  if (v_last > tol) {
    lo = 0.0;
    hi = 1.0;
  } else {
    lo = 1.0;
    for (double a = 2.0; a <= alpha_max * 1.0000001; a *= 2.0) {
      v_prev = v_last;
      v_last = value(a);
      out.best = std::max(out.best, v_last);
      if (v_last > tol) {
        hi = a;
        break;
      }
      lo = a;
    }
    if (hi < 0.0) {
      const bool flat = std::abs(v_last - v_prev) <= 1e-6 * (1.0 + std::abs(v_last));
      out.kind = (flat && v_last <= tol) ? AlphaOutcome::saturated : AlphaOutcome::exhausted;
      return out;
    }
  }
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (value(mid) > tol) hi = mid;
    else lo = mid;
  }
  out.alpha = hi;
  double vmin = kInf;
  const double start = std::max(hi, 1e-6);
  const int grid = 25;
  for (int i = 0; i < grid; ++i) {
    const double a = start * std::pow(alpha_max / start, static_cast<double>(i) / (grid - 1));
    vmin = std::min(vmin, value(a));
  }
  out.min_validated = vmin - tol;
  out.kind = vmin > tol ? AlphaOutcome::found : AlphaOutcome::exhausted;
  return out;
}

PropertyReport lpe_engine(const OperatorKernel& k, const std::vector<FamilySample>& fam,
                          const CheckOptions& opts, const std::string& id) {
  PropertyReport rep;
  rep.id = id;
  rep.sampling = seed_descr(opts, static_cast<int>(fam.size()));
  double min_margin = kInf;
  double max_alpha = 0.0;
  bool any_saturated = false, any_exhausted = false;
  int idx = 0;
  for (const auto& fs : fam) {
    const EvalContext ctx = ctx_of(fs);
    const double scale =
        std::max({1.0, fs.A.frobenius(), std::abs(k.fn(ctx, 0.0, fs.v, fs.A))});
    const auto value = [&](double a) {
      return k.fn(ctx, 0.0, fs.v, fs.A.add_outer(fs.v, -a)) / scale;
    };
    const AlphaOutcome oc = alpha_search(value, opts.alpha_max, opts.pos_tol / scale);
    if (oc.kind == AlphaOutcome::found) {
      max_alpha = std::max(max_alpha, oc.alpha);
      min_margin = std::min(min_margin, oc.min_validated);
      rep.table.emplace_back(fs.dist, oc.alpha);
    } else if (oc.kind == AlphaOutcome::saturated) {
      any_saturated = true;
      min_margin = std::min(min_margin, oc.best - opts.pos_tol / scale);
      rep.witnesses.push_back({"sample " + std::to_string(idx) + " saturated nonpositive",
                               oc.best - opts.pos_tol / scale});
    } else {
      any_exhausted = true;
      rep.witnesses.push_back({"sample " + std::to_string(idx) + " alpha search exhausted",
                               oc.best - opts.pos_tol / scale});
    }
    ++idx;
  }
  if (any_saturated) rep.verdict = Verdict::fail;
  else if (any_exhausted) rep.verdict = Verdict::inconclusive;
  else rep.verdict = Verdict::pass;
  rep.min_margin = min_margin == kInf ? 0.0 : min_margin;
  if (rep.verdict == Verdict::pass) rep.alpha_threshold = max_alpha;
  return rep;
}

struct ScaledJet {
  const FamilySample* fs;
  double s;
  SymMat Qa;
  bool certified;  // s = 0 with alpha above this sample's own found threshold
};

PropertyReport lsp_engine(const OperatorKernel& k, const std::vector<ScaledJet>& jets,
                          const CheckOptions& opts, const std::string& id,
                          const std::string& sampling) {
  PropertyReport rep;
  rep.id = id;
  rep.sampling = sampling;
  std::vector<double> rhs(jets.size());
  for (std::size_t i = 0; i < jets.size(); ++i) {
    const auto& j = jets[i];
    rhs[i] = k.fn(ctx_of(*j.fs), j.s, j.fs->v, j.Qa);
    if (j.certified && rhs[i] <= 0.0)
      throw std::logic_error("lsp check: certified-positive sample has nonpositive value");
  }
  double min_margin = kInf;
  bool ok = true;
  std::vector<double> lhs(jets.size());
  for (int kc = 0; kc <= opts.c_min_exp; ++kc) {
    const double c = std::pow(2.0, -kc);
    double eta = kInf;
    for (std::size_t i = 0; i < jets.size(); ++i) {
      const auto& j = jets[i];
      lhs[i] = k.fn(ctx_of(*j.fs), c * j.s, c * j.fs->v, j.Qa.scaled(c));
      if (rhs[i] > 1e-9) eta = std::min(eta, lhs[i] / rhs[i]);
    }
    if (eta == kInf) eta = 1.0;  // no positive right-hand sides at this c
    rep.table.emplace_back(c, eta);
    if (eta <= 0.0) {
      ok = false;
      min_margin = std::min(min_margin, eta);
      if (rep.witnesses.size() < 4)
        rep.witnesses.push_back({"c = " + format_double(c) + ": fitted eta nonpositive", eta});
      continue;
    }
    for (std::size_t i = 0; i < jets.size(); ++i) {
      const double scale = std::max({1.0, std::abs(lhs[i]), std::abs(eta * rhs[i])});
      const double margin = (lhs[i] - eta * rhs[i]) / scale + opts.ineq_tol;
      if (margin < min_margin) min_margin = margin;
      if (margin < 0.0) {
        ok = false;
        if (rep.witnesses.size() < 4)
          rep.witnesses.push_back(
              {"c = " + format_double(c) + " sample " + std::to_string(i), margin});
      }
    }
  }
  rep.min_margin = min_margin == kInf ? 0.0 : min_margin;
  rep.verdict = ok ? Verdict::pass : Verdict::fail;
  return rep;
}

std::vector<double> s_grid(const CheckOptions& opts) {
  std::vector<double> g;
  for (int i = 0; i < opts.s_values; ++i)
    g.push_back(-1.0 + static_cast<double>(i) / (opts.s_values - 1));
  return g;
}

/// Build the (s, alpha)-expanded jet set over a dsq family. Samples whose own
/// alpha search failed reuse the largest threshold found elsewhere.
std::vector<ScaledJet> dsq_scaled_jets(const OperatorKernel& k,
                                       const std::vector<FamilySample>& fam,
                                       const CheckOptions& opts) {
  std::vector<double> thresholds(fam.size(), -1.0);
  double theta_bar = 1.0;
  for (std::size_t i = 0; i < fam.size(); ++i) {
    const auto& fs = fam[i];
    const EvalContext ctx = ctx_of(fs);
    const double scale =
        std::max({1.0, fs.A.frobenius(), std::abs(k.fn(ctx, 0.0, fs.v, fs.A))});
    const auto value = [&](double a) {
      return k.fn(ctx, 0.0, fs.v, fs.A.add_outer(fs.v, -a)) / scale;
    };
    const AlphaOutcome oc = alpha_search(value, opts.alpha_max, opts.pos_tol / scale);
    if (oc.kind == AlphaOutcome::found) {
      thresholds[i] = oc.alpha;
      theta_bar = std::max(theta_bar, oc.alpha);
    }
  }
  const std::vector<double> sg = s_grid(opts);
  std::vector<ScaledJet> jets;
  for (std::size_t i = 0; i < fam.size(); ++i) {
    const bool own = thresholds[i] > 0.0;
    const double theta = own ? thresholds[i] : theta_bar;
    for (int a = 0; a < opts.alpha_values; ++a) {
      const double alpha = std::max(theta, 1e-3) * 1.5 * std::pow(2.0, a);
      const SymMat Qa = fam[i].A.add_outer(fam[i].v, -alpha);
      for (double s : sg) jets.push_back(ScaledJet{&fam[i], s, Qa, own && s == 0.0});
    }
  }
  return jets;
}

Verdict vanish_verdict(const std::vector<std::pair<double, double>>& etahat_table) {
  double mx = 0.0;
  for (const auto& [c, v] : etahat_table) mx = std::max(mx, std::abs(v));
  const double at_min = std::abs(etahat_table.back().second);  // smallest c is last
  return at_min <= 1e-3 * (1.0 + mx) ? Verdict::pass : Verdict::fail;
}

}  // namespace

PropertyReport check_lpe(const OperatorKernel& k, const ManifoldModel& m, const PointRep& x0,
                         const CheckOptions& opts) {
  return lpe_engine(k, dsq_family(m, x0, &k, opts), opts, "lpe/" + k.id);
}

PropertyReport check_upe(const OperatorKernel& k, const ManifoldModel& m, const PointRep& x0,
                         const CheckOptions& opts) {
  PropertyReport rep = lpe_engine(reflect(k), dsq_family(m, x0, &k, opts), opts, "upe/" + k.id);
  return rep;
}

PropertyReport check_lpe_universal(const OperatorKernel& k, int n,
                                   const CheckOptions& opts) {
  auto fam = euclidean_family(n, opts.points * 2, opts.seed, -1.0, 0.0);
  // the rank-one degenerate witness family (A = 0) that defeats the
  // determinant belongs to the criterion's quantifier
  FamilySample zero;
  zero.v = Vec(static_cast<std::size_t>(n), 0.0);
  zero.v[0] = 1.0;
  zero.A = SymMat(n);
  fam.push_back(std::move(zero));
  for (auto& fs : fam) fs.s = 0.0;
  return lpe_engine(k, fam, opts, "lpe/" + k.id);
}

PropertyReport check_upe_universal(const OperatorKernel& k, int n,
                                   const CheckOptions& opts) {
  PropertyReport rep;
  {
    const OperatorKernel r = reflect(k);
    rep = check_lpe_universal(r, n, opts);
  }
  rep.id = "upe/" + k.id;
  return rep;
}

PropertyReport check_lpe_prime(const OperatorKernel& k, int n, const CheckOptions& opts) {
  std::vector<FamilySample> fam;
  for (int i = 0; i < opts.points; ++i) {
    Rng rng = Rng::stream(opts.seed, static_cast<std::uint64_t>(i));
    FamilySample fs;
    fs.v = random_grad(n, rng);
    fs.A = SymMat::identity(n);
    fam.push_back(std::move(fs));
  }
  if (k.special_point) {
    // one sample evaluated at the kernel's marked location
    Rng rng = Rng::stream(opts.seed, 777);
    FamilySample fs;
    fs.has_point = true;
    fs.m = ManifoldModel{n, 0.0};
    fs.x = *k.special_point;
    fs.node = k.special_node;
    fs.v = random_grad(n, rng);
    fs.A = SymMat::identity(n);
    fam.push_back(std::move(fs));
  }
  return lpe_engine(k, fam, opts, "lpe'/" + k.id);
}

PropertyReport check_upe_prime(const OperatorKernel& k, int n, const CheckOptions& opts) {
  PropertyReport rep = check_lpe_prime(reflect(k), n, opts);
  rep.id = "upe'/" + k.id;
  return rep;
}

PropertyReport check_lsp(const OperatorKernel& k, const ManifoldModel& m, const PointRep& x0,
                         const CheckOptions& opts) {
  const auto fam = dsq_family(m, x0, &k, opts);
  const auto jets = dsq_scaled_jets(k, fam, opts);
  std::ostringstream os;
  os << seed_descr(opts, static_cast<int>(fam.size())) << " family=dsq kappa="
     << format_double(m.kappa);
  return lsp_engine(k, jets, opts, "lsp/" + k.id, os.str());
}

PropertyReport check_usp(const OperatorKernel& k, const ManifoldModel& m, const PointRep& x0,
                         const CheckOptions& opts) {
  const OperatorKernel r = reflect(k);
  const auto fam = dsq_family(m, x0, &k, opts);
  const auto jets = dsq_scaled_jets(r, fam, opts);
  std::ostringstream os;
  os << seed_descr(opts, static_cast<int>(fam.size())) << " family=dsq-mirrored kappa="
     << format_double(m.kappa);
  return lsp_engine(r, jets, opts, "usp/" + k.id, os.str());
}

PropertyReport check_lsp_universal(const OperatorKernel& k, int n, const CheckOptions& opts) {
  const int count = opts.points * 4;
  const auto fam = euclidean_family(n, count, opts.seed, -1.0, 0.0);
  std::vector<ScaledJet> jets;
  jets.reserve(fam.size());
  for (const auto& fs : fam) jets.push_back(ScaledJet{&fs, fs.s, fs.A, false});
  return lsp_engine(k, jets, opts, "lsp/" + k.id,
                    seed_descr(opts, count) + " family=euclidean");
}

PropertyReport check_usp_universal(const OperatorKernel& k, int n, const CheckOptions& opts) {
  const OperatorKernel r = reflect(k);
  const int count = opts.points * 4;
  const auto fam = euclidean_family(n, count, opts.seed, -1.0, 0.0);
  std::vector<ScaledJet> jets;
  jets.reserve(fam.size());
  for (const auto& fs : fam) jets.push_back(ScaledJet{&fs, fs.s, fs.A, false});
  PropertyReport rep = lsp_engine(r, jets, opts, "usp/" + k.id,
                                  seed_descr(opts, count) + " family=euclidean-mirrored");
  return rep;
}

PropertyReport check_lsp_prime(const OperatorKernel& k, const OperatorKernel& hat,
                               const ManifoldModel& m, const PointRep& x0,
                               const CheckOptions& opts) {
  PropertyReport rep;
  rep.id = "lsp'/" + k.id;
  const PropertyReport hat_rep = check_lsp(hat, m, x0, opts);
  if (!hat_rep.passed()) {
    rep.verdict = Verdict::fail;
    rep.note = "majorant " + hat.id + " fails the lower scaling property";
    rep.min_margin = hat_rep.min_margin;
    return rep;
  }
  const auto fam = dsq_family(m, x0, &k, opts);
  const auto jets = dsq_scaled_jets(hat, fam, opts);
  rep.sampling = seed_descr(opts, static_cast<int>(fam.size())) + " majorant=" + hat.id;
  for (int kc = 0; kc <= opts.c_min_exp; ++kc) {
    const double c = std::pow(2.0, -kc);
    const double eta = hat_rep.table[static_cast<std::size_t>(kc)].second;
    double etahat = kInf;
    for (const auto& j : jets) {
      const EvalContext ctx = ctx_of(*j.fs);
      const double diff =
          k.fn(ctx, c * j.s, c * j.fs->v, j.Qa.scaled(c)) -
          hat.fn(ctx, c * j.s, c * j.fs->v, j.Qa.scaled(c));
      etahat = std::min(etahat, diff / eta);
    }
    rep.table.emplace_back(c, etahat == kInf ? 0.0 : etahat);
  }
  rep.verdict = vanish_verdict(rep.table);
  rep.min_margin = rep.verdict == Verdict::pass ? 0.0 : -std::abs(rep.table.back().second);
  if (rep.verdict != Verdict::pass)
    rep.witnesses.push_back({"fitted etahat does not vanish as c -> 0",
                             -std::abs(rep.table.back().second)});
  return rep;
}

PropertyReport check_usp_prime(const OperatorKernel& k, const OperatorKernel& hat,
                               const ManifoldModel& m, const PointRep& x0,
                               const CheckOptions& opts) {
  PropertyReport rep = check_lsp_prime(reflect(k), reflect(hat), m, x0, opts);
  rep.id = "usp'/" + k.id;
  return rep;
}

OperatorKernel default_scaling_majorant(const OperatorKernel& k) {
  if (k.id.rfind("mean-curvature", 0) == 0) {
    OperatorKernel hat;
    hat.id = "mean-curvature-principal";
    hat.fn = [](const EvalContext&, double, const Vec& v, const SymMat& A) {
      return -std::pow(1.0 + dot(v, v), -1.5) * A.trace();
    };
    hat.profile.proper = Expect::yes;
    return hat;
  }
  if (k.id.rfind("capillary", 0) == 0) {
    const double nh = k.params.size() > 1 ? k.params[1] : 0.0;
    OperatorKernel hat;
    hat.id = "capillary-principal";
    hat.fn = [nh](const EvalContext&, double s, const Vec&, const SymMat& A) {
      return nh * s - A.trace();
    };
    hat.homogeneity = 1.0;
    hat.profile.proper = Expect::yes;
    return hat;
  }
  return k;
}

PropertyReport check_uniform_ellipticity(const OperatorKernel& k, int n,
                                         std::optional<Ellipticity> constants,
                                         const CheckOptions& opts) {
  PropertyReport rep;
  rep.id = "uniform-ellipticity/" + k.id;
  const int count = opts.points * 20;
  rep.sampling = seed_descr(opts, count);
  const EvalContext ctx = no_context();
  struct Bucket {
    double lo = kInf, hi = -kInf;
  };
  Bucket buckets[4];
  double gmin = kInf, gmax = -kInf;
  double min_margin = kInf;
  for (int i = 0; i < count; ++i) {
    Rng rng = Rng::stream(opts.seed, static_cast<std::uint64_t>(i));
    const double s = rng.uniform(-1.0, 1.0);
    const Vec v = random_grad(n, rng);
    const SymMat a = random_sym(n, rng);
    SymMat p(n);
    const int kind = rng.uniform_int(0, 2);
    if (kind == 0) p = random_psd(n, rng);
    else if (kind == 1) p = SymMat::outer(random_grad(n, rng));
    else {
      // unit rank-one deviator orthogonal to v: detects vanishing lower bounds
      Vec w = random_unit(n, rng);
      const double nv = norm(v);
      if (nv > 0.0) {
        const double c = dot(w, v) / (nv * nv);
        for (std::size_t t = 0; t < w.size(); ++t) w[t] -= c * v[t];
      }
      double nw = norm(w);
      while (nw < 1e-6) {
        w = random_unit(n, rng);
        if (nv > 0.0) {
          const double c = dot(w, v) / (nv * nv);
          for (std::size_t t = 0; t < w.size(); ++t) w[t] -= c * v[t];
        }
        nw = norm(w);
      }
      p = SymMat::outer((1.0 / nw) * w);
    }
    const double trp = p.trace();
    if (trp < 1e-8) continue;
    const double ratio = (k.fn(ctx, s, v, a) - k.fn(ctx, s, v, a + p)) / trp;
    const double nv = norm(v);
    const int b = nv < 0.1 ? 0 : nv < 1.0 ? 1 : nv < 10.0 ? 2 : 3;
    buckets[b].lo = std::min(buckets[b].lo, ratio);
    buckets[b].hi = std::max(buckets[b].hi, ratio);
    gmin = std::min(gmin, ratio);
    gmax = std::max(gmax, ratio);
    if (constants) {
      const double scale = std::max(1.0, constants->Lambda);
      const double margin =
          std::min(ratio - constants->lambda, constants->Lambda - ratio) / scale + opts.ineq_tol;
      if (margin < min_margin) min_margin = margin;
      if (margin < 0.0 && rep.witnesses.size() < 4)
        rep.witnesses.push_back({"sample " + std::to_string(i) + " |v|=" + format_double(nv),
                                 margin});
    }
  }
  if (constants) {
    rep.min_margin = min_margin == kInf ? 0.0 : min_margin;
    rep.verdict = rep.min_margin >= 0.0 ? Verdict::pass : Verdict::fail;
    rep.note = "declared constants (" + format_double(constants->lambda) + ", " +
               format_double(constants->Lambda) + ")";
    return rep;
  }
  rep.table.emplace_back(0.0, gmin);
  rep.table.emplace_back(1.0, gmax);
  bool diverging = false;
  const Bucket* first = nullptr;
  const Bucket* last = nullptr;
  for (const auto& b : buckets)
    if (b.hi >= b.lo) {
      if (!first) first = &b;
      last = &b;
    }
  if (first && last && first != last) {
    if (last->hi > 4.0 * std::max(1e-300, first->hi) ||
        (first->lo > 0.0 && last->lo < first->lo / 4.0))
      diverging = true;
  }
  if (gmin <= opts.pos_tol || diverging) {
    rep.verdict = Verdict::fail;
    rep.min_margin = std::min(gmin - opts.pos_tol, 0.0);
    rep.note = diverging ? "difference quotients diverge across |v| decades"
                         : "no positive lower ellipticity constant";
    rep.witnesses.push_back({"fitted bounds", rep.min_margin});
  } else {
    rep.verdict = Verdict::pass;
    rep.min_margin = gmin;
    rep.note = "fitted constants (" + format_double(gmin) + ", " + format_double(gmax) + ")";
  }
  return rep;
}

PropertyReport check_proper(const OperatorKernel& k, int n, const CheckOptions& opts) {
  PropertyReport rep;
  rep.id = "proper/" + k.id;
  const int count = opts.points * 10;
  rep.sampling = seed_descr(opts, count);
  const EvalContext ctx = no_context();
  double min_margin = kInf;
  for (int i = 0; i < count; ++i) {
    Rng rng = Rng::stream(opts.seed, static_cast<std::uint64_t>(i));
    const Vec v = random_grad(n, rng);
    const SymMat a = random_sym(n, rng);
    const SymMat p = random_psd(n, rng);
    const double s1 = rng.uniform(-1.0, 1.0);
    const double s2 = s1 + rng.uniform(0.0, 1.0);
    const double fa = k.fn(ctx, s1, v, a);
    const double fap = k.fn(ctx, s1, v, a + p);
    double scale = std::max({1.0, std::abs(fa), std::abs(fap)});
    double margin = (fa - fap) / scale + opts.ineq_tol;  // non-increasing in A
    const double fs1 = fa;
    const double fs2 = k.fn(ctx, s2, v, a);
    scale = std::max({1.0, std::abs(fs1), std::abs(fs2)});
    margin = std::min(margin, (fs2 - fs1) / scale + opts.ineq_tol);  // non-decreasing in s
    if (margin < min_margin) min_margin = margin;
    if (margin < 0.0 && rep.witnesses.size() < 4)
      rep.witnesses.push_back({"sample " + std::to_string(i), margin});
  }
  rep.min_margin = min_margin;
  rep.verdict = min_margin >= 0.0 ? Verdict::pass : Verdict::fail;
  return rep;
}

PropertyReport check_homogeneity(const OperatorKernel& k, int n, const CheckOptions& opts) {
  PropertyReport rep;
  rep.id = "homogeneity/" + k.id;
  if (!k.homogeneity) {
    rep.verdict = Verdict::inconclusive;
    rep.note = "no declared homogeneity degree";
    return rep;
  }
  const double h = *k.homogeneity;
  const int count = opts.points;
  rep.sampling = seed_descr(opts, count) + " c=2^[-6..6]";
  const EvalContext ctx = no_context();
  double min_margin = kInf;
  for (int i = 0; i < count; ++i) {
    Rng rng = Rng::stream(opts.seed, static_cast<std::uint64_t>(i));
    const double s = rng.uniform(-1.0, 1.0);
    const Vec v = random_grad(n, rng);
    const SymMat a = random_sym(n, rng);
    const double base = k.fn(ctx, s, v, a);
    for (int e = -6; e <= 6; ++e) {
      const double c = std::pow(2.0, e);
      const double lhs = k.fn(ctx, c * s, c * v, a.scaled(c));
      const double want = std::pow(c, h) * base;
      const double scale = std::max({1.0, std::abs(lhs), std::abs(want)});
      const double margin = -std::abs(lhs - want) / scale + 1e-9;
      if (margin < min_margin) min_margin = margin;
      if (margin < 0.0 && rep.witnesses.size() < 4)
        rep.witnesses.push_back({"sample " + std::to_string(i) + " c=2^" + std::to_string(e),
                                 margin});
    }
  }
  rep.min_margin = min_margin;
  rep.verdict = min_margin >= 0.0 ? Verdict::pass : Verdict::fail;
  return rep;
}

PropertyReport check_invariance(const OperatorKernel& k, int n, const CheckOptions& opts) {
  PropertyReport rep;
  rep.id = "invariance/" + k.id;
  rep.sampling = seed_descr(opts, opts.rotations) + " rotations=" + std::to_string(opts.rotations);
  const EvalContext ctx = no_context();
  double min_margin = kInf;
  for (int i = 0; i < opts.rotations; ++i) {
    Rng rng = Rng::stream(opts.seed, static_cast<std::uint64_t>(i));
    const double s = rng.uniform(-1.0, 1.0);
    const Vec v = random_grad(n, rng);
    const SymMat a = random_sym(n, rng);
    const auto rot = random_rotation(n, rng);
    const double f0 = k.fn(ctx, s, v, a);
    const double f1 = k.fn(ctx, s, mat_apply(rot, v), rotate_sym(rot, a));
    const double scale = std::max({1.0, std::abs(f0), std::abs(f1)});
    const double margin = -std::abs(f1 - f0) / scale + 1e-11;
    if (margin < min_margin) min_margin = margin;
    if (margin < 0.0 && rep.witnesses.size() < 4)
      rep.witnesses.push_back({"rotation " + std::to_string(i), margin});
  }
  rep.min_margin = min_margin;
  rep.verdict = min_margin >= 0.0 ? Verdict::pass : Verdict::fail;
  return rep;
}

PropertyReport check_iuc(const OperatorKernel& k, const ManifoldModel& m,
                         const CheckOptions& opts) {
  PropertyReport rep;
  rep.id = "iuc/" + k.id;
  rep.sampling = seed_descr(opts, opts.points);
  double max_rel = 0.0;
  for (int i = 0; i < opts.points; ++i) {
    Rng rng = Rng::stream(opts.seed, static_cast<std::uint64_t>(i));
    const PointRep x = random_point(m, rng);
    double reach = 1.0;
    if (m.kappa > 0.0) reach = 0.4 * injectivity_radius(m, x);
    const TangentRep step = random_tangent(m, x, rng, reach);
    const PointRep y = exp_map(m, x, step);
    if (distance(m, x, y) < 1e-8) continue;
    const Frame ex = some_frame(m, x);
    const Frame ey = some_frame(m, y);
    Vec q(static_cast<std::size_t>(m.n));
    for (auto& c : q) c = rng.normal();
    if (k.singular_at_zero && norm(q) < 1e-6) q[0] += 1.0;
    const Jet2 jy = make_jet(rng.uniform(-1.0, 1.0), q, random_sym(m.n, rng));
    const Jet2 jx = jet_pullback(m, x, y, jy, ex, ey);
    EvalContext cy;
    cy.manifold = &m;
    cy.point = &y;
    EvalContext cx;
    cx.manifold = &m;
    cx.point = &x;
    const double fy = evaluate(k, cy, jy);
    const double fx = evaluate(k, cx, jx);
    const double scale = std::max({1.0, std::abs(fy), std::abs(fx)});
    max_rel = std::max(max_rel, std::abs(fy - fx) / scale);
  }
  if (k.x_dependent) {
    // directed pair across the marked point: the empirical modulus jumps
    if (k.special_point) {
      const PointRep y = *k.special_point;
      const Frame ey = some_frame(m, y);
      Rng rng = Rng::stream(opts.seed, 991);
      const PointRep x = exp_map(m, y, random_tangent(m, y, rng, 0.05));
      const Frame ex = some_frame(m, x);
      Vec qy(static_cast<std::size_t>(m.n), 0.0);
      qy[0] = 1.0;
      const Jet2 jy = make_jet(0.0, qy, random_sym(m.n, rng));
      const Jet2 jx = jet_pullback(m, x, y, jy, ex, ey);
      EvalContext cy;
      cy.manifold = &m;
      cy.point = &y;
      cy.node = k.special_node;
      EvalContext cx;
      cx.manifold = &m;
      cx.point = &x;
      const double jump = std::abs(evaluate(k, cy, jy) - evaluate(k, cx, jx));
      rep.table.emplace_back(distance(m, x, y), jump);
    }
    rep.verdict = Verdict::inconclusive;
    rep.note = "x-dependent kernel: empirical modulus reported";
    rep.min_margin = -max_rel;
    return rep;
  }
  rep.min_margin = 1e-10 - max_rel;
  rep.verdict = rep.min_margin >= 0.0 ? Verdict::pass : Verdict::fail;
  if (rep.verdict == Verdict::fail)
    rep.witnesses.push_back({"transport modulus exceeds tolerance", rep.min_margin});
  return rep;
}

PropertyReport check_ulp(const OperatorKernel& k, int n, std::optional<double> C,
                         const CheckOptions& opts) {
  PropertyReport rep;
  rep.id = "ulp/" + k.id;
  const int count = opts.points * 10;
  rep.sampling = seed_descr(opts, count);
  const EvalContext ctx = no_context();
  double best = 0.0;
  struct Bucket {
    double hi = 0.0;
  };
  Bucket buckets[4];
  for (int i = 0; i < count; ++i) {
    Rng rng = Rng::stream(opts.seed, static_cast<std::uint64_t>(i));
    const SymMat a = random_sym(n, rng);
    const Vec q1 = random_grad(n, rng);
    Vec q2 = q1;
    const int mode = rng.uniform_int(0, 1);
    if (mode == 0) q2 = random_grad(n, rng);
    const double s1 = rng.uniform(-1.0, 1.0);
    const double s2 = rng.uniform(-1.0, 1.0);
    const double denom = std::abs(s1 - s2) + norm(q1 - q2);
    if (denom < 1e-9) continue;
    const double ratio = std::abs(k.fn(ctx, s1, q1, a) - k.fn(ctx, s2, q2, a)) / denom;
    best = std::max(best, ratio);
    const double nv = std::max(norm(q1), norm(q2));
    const int b = nv < 0.1 ? 0 : nv < 1.0 ? 1 : nv < 10.0 ? 2 : 3;
    buckets[b].hi = std::max(buckets[b].hi, ratio);
  }
  rep.table.emplace_back(0.0, best);  // empirical best constant
  if (C) {
    rep.min_margin = (*C - best) / std::max(1.0, *C) + opts.ineq_tol;
    rep.verdict = rep.min_margin >= 0.0 ? Verdict::pass : Verdict::fail;
    rep.note = "declared C = " + format_double(*C);
    if (rep.verdict == Verdict::fail)
      rep.witnesses.push_back({"empirical constant " + format_double(best), rep.min_margin});
    return rep;
  }
  bool diverging = false;
  double prev = -1.0;
  for (const auto& b : buckets) {
    if (b.hi == 0.0) continue;
    if (prev > 0.0 && b.hi > 4.0 * prev) diverging = true;
    prev = b.hi;
  }
  if (diverging) {
    rep.verdict = Verdict::fail;
    rep.note = "Lipschitz quotients diverge across |v| decades";
    rep.min_margin = -best;
    rep.witnesses.push_back({"diverging witness sequence, best " + format_double(best), -best});
  } else {
    rep.verdict = Verdict::pass;
    rep.min_margin = 0.0;
    rep.note = "empirical constant " + format_double(best);
  }
  return rep;
}

PropertyReport check_uepe_chain(const OperatorKernel& k, int n, const CheckOptions& opts) {
  if (!k.ellipticity) throw std::invalid_argument("check_uepe_chain: no declared constants");
  PropertyReport rep;
  rep.id = "uepe-chain/" + k.id;
  const int count = opts.points * 10;
  rep.sampling = seed_descr(opts, count);
  const EvalContext ctx = no_context();
  const double lambda = k.ellipticity->lambda;
  const double Lambda = k.ellipticity->Lambda;
  double min_margin = kInf;
  for (int i = 0; i < count; ++i) {
    Rng rng = Rng::stream(opts.seed, static_cast<std::uint64_t>(i));
    const Vec q = random_grad(n, rng);
    const SymMat Q = random_sym(n, rng);
    const double alpha = std::pow(2.0, rng.uniform(-2.0, 6.0));
    const double lhs = k.fn(ctx, 0.0, q, Q.add_outer(q, -alpha));
    const double base = k.fn(ctx, 0.0, q, SymMat(n));
    const double mminus = pucci_minus_value(lambda, Lambda, sym_eigenvalues(Q), Q.frobenius());
    const double rhs = base + mminus + alpha * lambda * dot(q, q);
    const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
    const double margin = (lhs - rhs) / scale + opts.ineq_tol;
    if (margin < min_margin) min_margin = margin;
    if (margin < 0.0 && rep.witnesses.size() < 4)
      rep.witnesses.push_back({"sample " + std::to_string(i), margin});
  }
  rep.min_margin = min_margin;
  rep.verdict = min_margin >= 0.0 ? Verdict::pass : Verdict::fail;
  return rep;
}

// ---------------------------------------------------------------------------

namespace {

bool cell_match(Expect expected, Verdict observed) {
  switch (expected) {
    case Expect::yes: return observed == Verdict::pass;
    case Expect::no: return observed != Verdict::pass;
    case Expect::none: return true;
  }
  return true;
}

void push_row(std::vector<MatrixRow>& rows, const std::string& kernel,
              const std::string& condition, Verdict obs, Expect exp) {
  rows.push_back(MatrixRow{kernel, condition, obs, exp, cell_match(exp, obs)});
}

}  // namespace

std::vector<MatrixRow> run_condition_matrix(int n, double kappa, std::uint64_t seed) {
  CheckOptions opts;
  opts.seed = seed;
  const ManifoldModel m{n, kappa};
  std::vector<MatrixRow> rows;

  const std::vector<std::string> ids = {
      "laplace-beltrami", "pucci+:1:2",        "pucci-:1:2",    "pucci-orig+:0.3",
      "pucci-orig-:0.3",  "p-laplacian:3",     "game-p-laplacian:3", "inf-laplacian",
      "mean-curvature",   "monge-ampere",      "counterexample"};

  for (const auto& id : ids) {
    OperatorKernel k = make_kernel(id, n, kappa);
    PointRep x0 = base_point(m);
    if (k.special_point) {
      // center the family so the marked point sits inside the sampled ball
      const Frame e = some_frame(m, *k.special_point);
      Vec dir(static_cast<std::size_t>(n), 0.0);
      dir[0] = 0.5;
      x0 = exp_map(m, *k.special_point, from_frame_coords(m, e, dir));
    }

    push_row(rows, k.id, "proper", check_proper(k, n, opts).verdict, k.profile.proper);
    if (k.homogeneity)
      push_row(rows, k.id, "homogeneous", check_homogeneity(k, n, opts).verdict, Expect::yes);
    const Verdict lpe = k.x_dependent ? check_lpe(k, m, x0, opts).verdict
                                      : check_lpe_universal(k, n, opts).verdict;
    push_row(rows, k.id, "lpe", lpe, k.profile.lpe);
    const Verdict upe = k.x_dependent ? check_upe(k, m, x0, opts).verdict
                                      : check_upe_universal(k, n, opts).verdict;
    push_row(rows, k.id, "upe", upe, k.profile.upe);
    if (k.profile.lpe_prime != Expect::none)
      push_row(rows, k.id, "lpe'", check_lpe_prime(k, n, opts).verdict, k.profile.lpe_prime);

    const Verdict lsp = k.x_dependent ? check_lsp(k, m, x0, opts).verdict
                                      : check_lsp_universal(k, n, opts).verdict;
    push_row(rows, k.id, "lsp", lsp, k.profile.lsp);
    const Verdict usp = k.x_dependent ? check_usp(k, m, x0, opts).verdict
                                      : check_usp_universal(k, n, opts).verdict;
    push_row(rows, k.id, "usp", usp, k.profile.usp);

    if (k.profile.lsp_prime != Expect::none) {
      const OperatorKernel hat = default_scaling_majorant(k);
      push_row(rows, k.id, "lsp'", check_lsp_prime(k, hat, m, x0, opts).verdict,
               k.profile.lsp_prime);
      push_row(rows, k.id, "usp'", check_usp_prime(k, hat, m, x0, opts).verdict,
               k.profile.usp_prime);
    }

    const Verdict ue = check_uniform_ellipticity(k, n, k.ellipticity, opts).verdict;
    push_row(rows, k.id, "uniformly-elliptic", ue, k.profile.uniformly_elliptic);
  }
  return rows;
}

std::vector<PropertyReport> run_kernel_suite(const OperatorKernel& k, int n, double kappa,
                                             std::uint64_t seed) {
  CheckOptions opts;
  opts.seed = seed;
  const ManifoldModel m{n, kappa};
  PointRep x0 = base_point(m);
  if (k.special_point) {
    const Frame e = some_frame(m, *k.special_point);
    Vec dir(static_cast<std::size_t>(n), 0.0);
    dir[0] = 0.5;
    x0 = exp_map(m, *k.special_point, from_frame_coords(m, e, dir));
  }
  std::vector<PropertyReport> out;
  out.push_back(check_proper(k, n, opts));
  out.push_back(check_homogeneity(k, n, opts));
  out.push_back(check_invariance(k, n, opts));
  out.push_back(k.x_dependent ? check_lpe(k, m, x0, opts) : check_lpe_universal(k, n, opts));
  out.push_back(k.x_dependent ? check_upe(k, m, x0, opts) : check_upe_universal(k, n, opts));
  if (k.profile.lpe_prime != Expect::none) out.push_back(check_lpe_prime(k, n, opts));
  out.push_back(k.x_dependent ? check_lsp(k, m, x0, opts) : check_lsp_universal(k, n, opts));
  out.push_back(k.x_dependent ? check_usp(k, m, x0, opts) : check_usp_universal(k, n, opts));
  if (k.profile.lsp_prime != Expect::none) {
    const OperatorKernel hat = default_scaling_majorant(k);
    out.push_back(check_lsp_prime(k, hat, m, x0, opts));
    out.push_back(check_usp_prime(k, hat, m, x0, opts));
  }
  out.push_back(check_uniform_ellipticity(k, n, k.ellipticity, opts));
  out.push_back(check_iuc(k, m, opts));
  out.push_back(check_ulp(k, n, k.lipschitz_sq, opts));
  return out;
}

int count_profile_mismatches(const OperatorKernel& k, const std::vector<PropertyReport>& suite) {
  int mismatches = 0;
  const auto expect_for = [&](const std::string& id) -> Expect {
    const auto head = id.substr(0, id.find('/'));
    if (head == "proper") return k.profile.proper;
    if (head == "lpe") return k.profile.lpe;
    if (head == "upe") return k.profile.upe;
    if (head == "lpe'") return k.profile.lpe_prime;
    if (head == "lsp") return k.profile.lsp;
    if (head == "usp") return k.profile.usp;
    if (head == "lsp'") return k.profile.lsp_prime;
    if (head == "usp'") return k.profile.usp_prime;
    if (head == "uniform-ellipticity") return k.profile.uniformly_elliptic;
    if (head == "homogeneity") return k.homogeneity ? Expect::yes : Expect::none;
    if (head == "invariance") return Expect::yes;
    return Expect::none;
  };
  for (const auto& r : suite)
    if (!cell_match(expect_for(r.id), r.verdict)) ++mismatches;
  return mismatches;
}

void write_matrix_csv(std::ostream& os, const std::vector<MatrixRow>& rows) {
  os << "kernel,condition,observed,expected,match\n";
  for (const auto& r : rows) {
    const char* exp = r.expected == Expect::yes ? "yes" : r.expected == Expect::no ? "no" : "-";
    os << r.kernel << "," << r.condition << "," << to_string(r.observed) << "," << exp << ","
       << (r.match ? "yes" : "NO") << "\n";
  }
}

void write_matrix_text(std::ostream& os, const std::vector<MatrixRow>& rows) {
  std::string current;
  for (const auto& r : rows) {
    if (r.kernel != current) {
      current = r.kernel;
      os << current << "\n";
    }
    const char* exp = r.expected == Expect::yes ? "pass" : r.expected == Expect::no ? "fail" : "-";
    os << "  " << r.condition << ": " << to_string(r.observed) << " (claimed " << exp << ") "
       << (r.match ? "ok" : "MISMATCH") << "\n";
  }
}

}  // namespace curvops
