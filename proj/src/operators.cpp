#include "curvops/operators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace curvops {

namespace {

double off_diag_norm(const SymMat& b) {
  const int n = b.dim();
  double s = 0.0;
  for (int p = 0; p < n; ++p)
    for (int q = p + 1; q < n; ++q) s += b(p, q) * b(p, q);
  return std::sqrt(2.0 * s);
}

}  // namespace

EigenSym sym_eigen(const SymMat& A) {
  const int n = A.dim();
  SymMat b = A;
  std::vector<Vec> vecs(static_cast<std::size_t>(n), Vec(static_cast<std::size_t>(n), 0.0));
  for (int i = 0; i < n; ++i) vecs[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1.0;
  const double anorm = A.frobenius();
  if (anorm > 0.0) {
    for (int sweep = 0; sweep < 256 && off_diag_norm(b) > 1e-13 * anorm; ++sweep) {
      for (int p = 0; p < n; ++p) {
        for (int q = p + 1; q < n; ++q) {
          const double apq = b(p, q);
          if (std::abs(apq) <= 1e-300) continue;
          const double theta = (b(q, q) - b(p, p)) / (2.0 * apq);
          const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
          const double c = 1.0 / std::sqrt(t * t + 1.0);
          const double s = t * c;
          const double app = b(p, p), aqq = b(q, q);
          b.set(p, p, c * c * app - 2.0 * s * c * apq + s * s * aqq);
          b.set(q, q, s * s * app + 2.0 * s * c * apq + c * c * aqq);
          b.set(p, q, 0.0);
          for (int i = 0; i < n; ++i) {
            if (i == p || i == q) continue;
            const double aip = b(i, p), aiq = b(i, q);
            b.set(i, p, c * aip - s * aiq);
            b.set(i, q, s * aip + c * aiq);
          }
          for (int i = 0; i < n; ++i) {
            auto& vp = vecs[static_cast<std::size_t>(p)][static_cast<std::size_t>(i)];
            auto& vq = vecs[static_cast<std::size_t>(q)][static_cast<std::size_t>(i)];
            const double xp = vp, xq = vq;
            vp = c * xp - s * xq;
            vq = s * xp + c * xq;
          }
        }
      }
    }
  }
  EigenSym out;
  out.values.resize(static_cast<std::size_t>(n));
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return b(i, i) < b(j, j); });
  out.vectors.resize(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    out.values[static_cast<std::size_t>(k)] = b(order[static_cast<std::size_t>(k)],
                                                order[static_cast<std::size_t>(k)]);
    out.vectors[static_cast<std::size_t>(k)] =
        vecs[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])];
  }
  return out;
}

Vec sym_eigenvalues(const SymMat& A) { return sym_eigen(A).values; }

double pucci_plus_value(double lambda, double Lambda, const Vec& mu, double scale) {
  const double thr = 1e-12 * scale;
  double s = 0.0;
  for (double m : mu) {
    if (m > thr) s -= lambda * m;
    else if (m < -thr) s -= Lambda * m;
  }
  return s;
}

double pucci_minus_value(double lambda, double Lambda, const Vec& mu, double scale) {
  const double thr = 1e-12 * scale;
  double s = 0.0;
  for (double m : mu) {
    if (m > thr) s -= Lambda * m;
    else if (m < -thr) s -= lambda * m;
  }
  return s;
}

// ---------------------------------------------------------------------------

OperatorKernel laplace_beltrami() {
  OperatorKernel k;
  k.id = "laplace-beltrami";
  k.fn = [](const EvalContext&, double, const Vec&, const SymMat& A) { return -A.trace(); };
  k.homogeneity = 1.0;
  k.ellipticity = Ellipticity{1.0, 1.0};
  k.lipschitz_sq = 0.0;
  k.profile.proper = Expect::yes;
  k.profile.lpe = k.profile.upe = Expect::yes;
  k.profile.lpe_prime = Expect::yes;
  k.profile.lsp = k.profile.usp = Expect::yes;
  k.profile.uniformly_elliptic = Expect::yes;
  return k;
}

OperatorKernel monge_ampere() {
  OperatorKernel k;
  k.id = "monge-ampere";
  k.fn = [](const EvalContext&, double, const Vec&, const SymMat& A) {
    const int n = A.dim();
    if (n == 1) return A(0, 0);
    if (n == 2) return A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0);
    if (n == 3)
      return A(0, 0) * (A(1, 1) * A(2, 2) - A(1, 2) * A(2, 1)) -
             A(0, 1) * (A(1, 0) * A(2, 2) - A(1, 2) * A(2, 0)) +
             A(0, 2) * (A(1, 0) * A(2, 1) - A(1, 1) * A(2, 0));
    const Vec mu = sym_eigenvalues(A);
    double d = 1.0;
    for (double m : mu) d *= m;
    return d;
  };
  k.profile.lpe = k.profile.upe = Expect::no;  // the catalog's negative example
  return k;
}

namespace {

OperatorKernel pucci_common(std::string id, double lambda, double Lambda, bool plus) {
  if (!(0.0 < lambda && lambda <= Lambda))
    throw std::invalid_argument("pucci: require 0 < lambda <= Lambda");
  OperatorKernel k;
  k.id = std::move(id);
  k.fn = [lambda, Lambda, plus](const EvalContext&, double, const Vec&, const SymMat& A) {
    const Vec mu = sym_eigenvalues(A);
    const double scale = A.frobenius();
    return plus ? pucci_plus_value(lambda, Lambda, mu, scale)
                : pucci_minus_value(lambda, Lambda, mu, scale);
  };
  k.homogeneity = 1.0;
  k.ellipticity = Ellipticity{lambda, Lambda};
  k.lipschitz_sq = 0.0;
  k.profile.proper = Expect::yes;
  k.profile.lpe = k.profile.upe = Expect::yes;
  k.profile.lpe_prime = Expect::yes;
  k.profile.lsp = k.profile.usp = Expect::yes;
  k.profile.uniformly_elliptic = Expect::yes;
  return k;
}

std::string with_params(const std::string& base, std::initializer_list<double> params) {
  std::ostringstream os;
  os << base;
  for (double p : params) {
    os << ":";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", p);
    os << buf;
  }
  return os.str();
}

}  // namespace

OperatorKernel pucci_plus(double lambda, double Lambda) {
  OperatorKernel k = pucci_common(with_params("pucci+", {lambda, Lambda}), lambda, Lambda, true);
  k.params = {lambda, Lambda};
  return k;
}

OperatorKernel pucci_minus(double lambda, double Lambda) {
  OperatorKernel k = pucci_common(with_params("pucci-", {lambda, Lambda}), lambda, Lambda, false);
  k.params = {lambda, Lambda};
  return k;
}

OperatorKernel pucci_orig_plus(double alpha, int n) {
  if (!(0.0 < alpha && alpha <= 1.0 / n))
    throw std::invalid_argument("original pucci: require 0 < alpha <= 1/n");
  OperatorKernel k;
  k.id = with_params("pucci-orig+", {alpha});
  k.fn = [alpha, n](const EvalContext&, double, const Vec&, const SymMat& A) {
    const Vec mu = sym_eigenvalues(A);
    return -alpha * A.trace() - (1.0 - n * alpha) * mu.front();
  };
  k.homogeneity = 1.0;
  k.ellipticity = Ellipticity{alpha, 1.0 - (n - 1) * alpha};
  k.lipschitz_sq = 0.0;
  k.profile = pucci_common("x", alpha, 1.0 - (n - 1) * alpha, true).profile;
  k.params = {alpha, static_cast<double>(n)};
  return k;
}

OperatorKernel pucci_orig_minus(double alpha, int n) {
  OperatorKernel k = pucci_orig_plus(alpha, n);
  k.id = with_params("pucci-orig-", {alpha});
  k.fn = [alpha, n](const EvalContext&, double, const Vec&, const SymMat& A) {
    const Vec mu = sym_eigenvalues(A);
    return -alpha * A.trace() - (1.0 - n * alpha) * mu.back();
  };
  return k;
}

OperatorKernel p_laplacian(double p) {
  if (!(1.0 < p)) throw std::invalid_argument("p-laplacian: require p > 1");
  OperatorKernel k;
  k.id = with_params("p-laplacian", {p});
  k.fn = [p](const EvalContext&, double, const Vec& v, const SymMat& A) {
    const double nv = norm(v);
    if (nv == 0.0) {
      if (p < 2.0) throw std::domain_error("p-laplacian singular at zero gradient for p < 2");
      return p == 2.0 ? -A.trace() : 0.0;
    }
    return -std::pow(nv, p - 2.0) * (A.trace() + (p - 2.0) * A.quad(v) / (nv * nv));
  };
  k.singular_at_zero = p < 2.0;
  k.homogeneity = p - 1.0;
  k.profile.proper = Expect::yes;
  k.profile.lpe = k.profile.upe = Expect::yes;
  k.profile.lpe_prime = Expect::yes;
  k.profile.lsp = k.profile.usp = Expect::yes;
  k.profile.uniformly_elliptic = Expect::no;
  k.params = {p};
  return k;
}

OperatorKernel game_p_laplacian(double p) {
  if (!(1.0 < p)) throw std::invalid_argument("game p-laplacian: require p > 1");
  OperatorKernel k;
  k.id = with_params("game-p-laplacian", {p});
  k.fn = [p](const EvalContext&, double, const Vec& v, const SymMat& A) {
    const double nv = norm(v);
    if (nv == 0.0) {
      if (p == 2.0) return -A.trace();
      throw std::domain_error("game p-laplacian singular at zero gradient");
    }
    return -A.trace() - (p - 2.0) * A.quad(v) / (nv * nv);
  };
  k.singular_at_zero = true;
  k.homogeneity = 1.0;
  k.profile.proper = Expect::yes;
  k.profile.lpe = k.profile.upe = Expect::yes;
  k.profile.lpe_prime = Expect::yes;
  k.profile.lsp = k.profile.usp = Expect::yes;
  k.params = {p};
  return k;
}

OperatorKernel inf_laplacian() {
  OperatorKernel k;
  k.id = "inf-laplacian";
  k.fn = [](const EvalContext&, double, const Vec& v, const SymMat& A) { return -A.quad(v); };
  k.homogeneity = 3.0;
  k.profile.proper = Expect::yes;
  k.profile.lpe = k.profile.upe = Expect::yes;
  k.profile.lpe_prime = Expect::yes;
  k.profile.lsp = k.profile.usp = Expect::yes;
  return k;
}

OperatorKernel inf_laplacian_h(double h) {
  if (!(1.0 < h)) throw std::invalid_argument("inf-laplacian-h: require h > 1");
  OperatorKernel k;
  k.id = with_params("inf-laplacian-h", {h});
  k.fn = [h](const EvalContext&, double, const Vec& v, const SymMat& A) {
    const double nv = norm(v);
    if (nv == 0.0) {
      if (h < 3.0) throw std::domain_error("inf-laplacian-h singular at zero gradient");
      return 0.0;
    }
    return -std::pow(nv, h - 3.0) * A.quad(v);
  };
  k.singular_at_zero = h < 3.0;
  k.homogeneity = h;
  k.profile.proper = Expect::yes;
  k.profile.lpe = k.profile.upe = Expect::yes;
  k.profile.lpe_prime = Expect::yes;
  k.params = {h};
  return k;
}

OperatorKernel mean_curvature() {
  OperatorKernel k;
  k.id = "mean-curvature";
  k.fn = [](const EvalContext&, double, const Vec& v, const SymMat& A) {
    const double g2 = dot(v, v);
    return std::pow(1.0 + g2, -1.5) * (-(1.0 + g2) * A.trace() + A.quad(v));
  };
  k.profile.proper = Expect::yes;
  k.profile.lpe = k.profile.upe = Expect::yes;
  k.profile.lpe_prime = Expect::yes;
  k.profile.lsp = k.profile.usp = Expect::no;
  k.profile.lsp_prime = k.profile.usp_prime = Expect::yes;
  return k;
}

OperatorKernel grad_power_pucci(double beta, double lambda, double Lambda, int sign) {
  if (!(beta > 1.0)) throw std::invalid_argument("grad-power-pucci: require beta > 1");
  OperatorKernel k;
  k.id = with_params(sign >= 0 ? "grad-power-pucci+" : "grad-power-pucci-",
                     {beta, lambda, Lambda});
  const bool plus = sign >= 0;
  k.fn = [beta, lambda, Lambda, plus](const EvalContext&, double, const Vec& v, const SymMat& A) {
    const double nv = norm(v);
    if (nv == 0.0) return 0.0;
    const Vec mu = sym_eigenvalues(A);
    const double scale = A.frobenius();
    const double m = plus ? pucci_plus_value(lambda, Lambda, mu, scale)
                          : pucci_minus_value(lambda, Lambda, mu, scale);
    return std::pow(nv, beta) * m;
  };
  k.homogeneity = beta + 1.0;
  k.profile.proper = Expect::yes;
  k.profile.lpe = k.profile.upe = Expect::yes;
  k.profile.lsp = k.profile.usp = Expect::yes;
  k.params = {beta, lambda, Lambda};
  return k;
}

OperatorKernel capillary(double H, int n) {
  OperatorKernel k;
  k.id = with_params("capillary", {H});
  const double nh = n * H;
  k.fn = [nh](const EvalContext&, double s, const Vec& v, const SymMat& A) {
    const double g2 = dot(v, v);
    return nh * s * std::pow(1.0 + g2, 1.5) - (1.0 + g2) * A.trace() + A.quad(v);
  };
  if (H >= 0.0) k.profile.proper = Expect::yes;
  k.profile.lpe = k.profile.upe = Expect::yes;
  k.profile.lsp = k.profile.usp = Expect::no;
  k.profile.lsp_prime = k.profile.usp_prime = Expect::yes;
  k.params = {H, nh};
  return k;
}

OperatorKernel zeroth_order_wrap(OperatorKernel base, ScalarField a, ScalarField c, double kpow) {
  OperatorKernel k;
  k.id = base.id + "+zeroth";
  KernelFn bfn = base.fn;
  k.fn = [bfn, a, c, kpow](const EvalContext& ctx, double s, const Vec& v, const SymMat& A) {
    const double av = a(ctx);
    const double cv = c(ctx);
    const double zero = cv * std::pow(std::abs(s), kpow - 1.0) * s;
    return av * bfn(ctx, s, v, A) + zero;
  };
  k.singular_at_zero = base.singular_at_zero;
  k.x_dependent = true;
  k.profile.proper = base.profile.proper;
  return k;
}

OperatorKernel hessian_drift(OperatorKernel base, double p, VectorField b) {
  OperatorKernel k;
  k.id = base.id + "+drift";
  KernelFn bfn = base.fn;
  k.fn = [bfn, p, b](const EvalContext& ctx, double s, const Vec& v, const SymMat& A) {
    const double nv = norm(v);
    if (nv == 0.0) {
      if (p < 2.0) throw std::domain_error("hessian drift singular at zero gradient");
      return p == 2.0 ? bfn(ctx, s, v, A) : 0.0;
    }
    return std::pow(nv, p - 2.0) * (bfn(ctx, s, v, A) + dot(v, b(ctx)));
  };
  k.singular_at_zero = p < 2.0;
  k.x_dependent = true;
  k.profile.proper = base.profile.proper;
  return k;
}

OperatorKernel counterexample(const ManifoldModel& m, const PointRep& x0, long x0_node) {
  validate_point(m, x0);
  OperatorKernel k;
  k.id = "counterexample";
  const long node = x0_node < 0 ? 0 : x0_node;
  k.fn = [node](const EvalContext& ctx, double, const Vec&, const SymMat& A) {
    const double t = A.trace();
    const double f = (ctx.node >= 0 && ctx.node == node) ? -1.0 : 0.0;
    return -t / (1.0 + std::abs(t)) + f;
  };
  k.x_dependent = true;
  k.special_point = x0;
  k.special_node = node;
  k.profile.proper = Expect::yes;
  k.profile.lpe_prime = Expect::no;
  k.profile.lsp = Expect::no;
  return k;
}

OperatorKernel reflect(const OperatorKernel& k) {
  OperatorKernel r = k;
  r.id = k.id + "^-";
  KernelFn base = k.fn;
  r.fn = [base](const EvalContext& ctx, double s, const Vec& v, const SymMat& A) {
    return -base(ctx, -s, negate(v), A.scaled(-1.0));
  };
  std::swap(r.profile.lpe, r.profile.upe);
  std::swap(r.profile.lsp, r.profile.usp);
  std::swap(r.profile.lsp_prime, r.profile.usp_prime);
  return r;
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

double num(const std::vector<std::string>& parts, std::size_t i, double fallback) {
  if (i >= parts.size() || parts[i].empty()) return fallback;
  return std::stod(parts[i]);
}

}  // namespace

OperatorKernel make_kernel(const std::string& spec, int n, double kappa) {
  const auto parts = split(spec, ':');
  const std::string& name = parts[0];
  if (name == "laplace-beltrami" || name == "lb") return laplace_beltrami();
  if (name == "monge-ampere") return monge_ampere();
  if (name == "pucci+") return pucci_plus(num(parts, 1, 1.0), num(parts, 2, 2.0));
  if (name == "pucci-") return pucci_minus(num(parts, 1, 1.0), num(parts, 2, 2.0));
  if (name == "pucci-orig+") return pucci_orig_plus(num(parts, 1, 0.3), n);
  if (name == "pucci-orig-") return pucci_orig_minus(num(parts, 1, 0.3), n);
  if (name == "p-laplacian") return p_laplacian(num(parts, 1, 3.0));
  if (name == "game-p-laplacian" || name == "game-p") return game_p_laplacian(num(parts, 1, 3.0));
  if (name == "inf-laplacian") return inf_laplacian();
  if (name == "inf-laplacian-h") return inf_laplacian_h(num(parts, 1, 2.0));
  if (name == "mean-curvature") return mean_curvature();
  if (name == "grad-power-pucci+" || name == "grad-power-pucci")
    return grad_power_pucci(num(parts, 1, 2.0), num(parts, 2, 1.0), num(parts, 3, 2.0), +1);
  if (name == "grad-power-pucci-")
    return grad_power_pucci(num(parts, 1, 2.0), num(parts, 2, 1.0), num(parts, 3, 2.0), -1);
  if (name == "capillary") return capillary(num(parts, 1, 1.0), n);
  if (name == "counterexample") {
    ManifoldModel m{n, kappa};
    return counterexample(m, base_point(m), 0);
  }
  throw std::invalid_argument("unknown kernel id: " + spec);
}

std::vector<std::string> kernel_catalog_ids() {
  return {"laplace-beltrami", "monge-ampere",   "pucci+:1:2",        "pucci-:1:2",
          "pucci-orig+:0.3",  "pucci-orig-:0.3", "p-laplacian:3",     "game-p-laplacian:3",
          "inf-laplacian",    "inf-laplacian-h:2", "mean-curvature",  "grad-power-pucci+:2:1:2",
          "capillary:1",      "counterexample"};
}

double evaluate(const OperatorKernel& k, const EvalContext& ctx, const Jet2& jet) {
  if (k.singular_at_zero && !jet.nonsingular())
    throw std::domain_error("evaluate: kernel is singular at q = 0 (restricted jet bundle)");
  return k.fn(ctx, jet.s, jet.q, jet.Q);
}

// ---------------------------------------------------------------------------

PropertyReport pucci_sandwich_check(const OperatorKernel& k, int n, int samples,
                                    std::uint64_t seed) {
  if (!k.ellipticity) throw std::invalid_argument("pucci_sandwich_check: no declared constants");
  const auto [lam, Lam] = *k.ellipticity;
  PropertyReport rep;
  rep.id = "pucci-sandwich/" + k.id;
  rep.sampling = "seed=" + std::to_string(seed) + " n=" + std::to_string(n) +
                 " samples=" + std::to_string(samples);
  double min_margin = std::numeric_limits<double>::infinity();
  const SymMat zero(n);
  for (int i = 0; i < samples; ++i) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(i));
    const double s = rng.uniform(-1.0, 1.0);
    const Vec v = random_grad(n, rng);
    const SymMat a = random_sym(n, rng);
    const EvalContext ctx = no_context();
    const double diff = k.fn(ctx, s, v, a) - k.fn(ctx, s, v, zero);
    const Vec mu = sym_eigenvalues(a);
    const double scale = std::max(1.0, a.frobenius());
    const double lo = pucci_minus_value(lam, Lam, mu, a.frobenius());
    const double hi = pucci_plus_value(lam, Lam, mu, a.frobenius());
    const double margin = std::min(diff - lo, hi - diff) / scale + 1e-9;
    if (margin < min_margin) min_margin = margin;
    if (margin < 0.0 && rep.witnesses.size() < 4)
      rep.witnesses.push_back({"sample " + std::to_string(i), margin});
  }
  rep.min_margin = min_margin;
  rep.verdict = min_margin >= 0.0 ? Verdict::pass : Verdict::fail;
  return rep;
}

std::pair<double, double> pucci_rank1_inequality(double lambda, double Lambda, const SymMat& A,
                                                 const Vec& v, double alpha) {
  const SymMat shifted = A.add_outer(v, -alpha);
  const double lhs =
      pucci_minus_value(lambda, Lambda, sym_eigenvalues(shifted), shifted.frobenius());
  const double rhs = pucci_minus_value(lambda, Lambda, sym_eigenvalues(A), A.frobenius()) +
                     alpha * lambda * dot(v, v);
  return {lhs, rhs};
}

PropertyReport subadditivity_check(const OperatorKernel& k, int n, int samples,
                                   std::uint64_t seed) {
  PropertyReport rep;
  rep.id = "subadditivity/" + k.id;
  rep.sampling = "seed=" + std::to_string(seed) + " n=" + std::to_string(n) +
                 " samples=" + std::to_string(samples);
  double min_margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(i));
    const EvalContext ctx = no_context();
    const double s1 = rng.uniform(-1.0, 1.0), s2 = rng.uniform(-1.0, 1.0);
    Vec v1 = random_grad(n, rng), v2 = random_grad(n, rng);
    if (norm(v1 - v2) < 1e-9) v2 = 2.0 * v2;
    const SymMat a1 = random_sym(n, rng), a2 = random_sym(n, rng);
    const double lhs = k.fn(ctx, s1 - s2, v1 - v2, a1 - a2);
    const double rhs = k.fn(ctx, s1, v1, a1) - k.fn(ctx, s2, v2, a2);
    const double scale = std::max(1.0, std::abs(rhs));
    const double margin = (rhs - lhs) / scale + 1e-9;
    if (margin < min_margin) min_margin = margin;
    if (margin < 0.0 && rep.witnesses.size() < 4)
      rep.witnesses.push_back({"sample " + std::to_string(i), margin});
  }
  rep.min_margin = min_margin;
  rep.verdict = min_margin >= 0.0 ? Verdict::pass : Verdict::fail;
  return rep;
}

std::pair<double, double> exact_rank1_identity(const OperatorKernel& k, const Jet2& jet,
                                               double alpha) {
  const double nv = norm(jet.q);
  double offset;
  if (k.id.rfind("p-laplacian", 0) == 0) {
    const double p = std::stod(k.id.substr(k.id.find(':') + 1));
    offset = (p - 1.0) * std::pow(nv, p);
  } else if (k.id.rfind("inf-laplacian-h", 0) == 0) {
    const double h = std::stod(k.id.substr(k.id.find(':') + 1));
    offset = std::pow(nv, h - 3.0) * std::pow(nv, 4.0);
  } else if (k.id.rfind("inf-laplacian", 0) == 0) {
    offset = std::pow(nv, 4.0);
  } else if (k.id.rfind("mean-curvature", 0) == 0) {
    offset = nv * nv * std::pow(1.0 + nv * nv, -1.5);
  } else if (k.id.rfind("game-p-laplacian", 0) == 0) {
    const double p = std::stod(k.id.substr(k.id.find(':') + 1));
    offset = (p - 1.0) * nv * nv;
  } else {
    throw std::invalid_argument("exact_rank1_identity: unsupported kernel " + k.id);
  }
  const EvalContext ctx = no_context();
  const double lhs = k.fn(ctx, jet.s, jet.q, jet.Q.add_outer(jet.q, -alpha));
  const double rhs = k.fn(ctx, jet.s, jet.q, jet.Q) + alpha * offset;
  return {lhs, rhs};
}

}  // namespace curvops
