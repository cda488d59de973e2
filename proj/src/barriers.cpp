#include "curvops/barriers.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace curvops {

double barrier_value(const BarrierSpec& spec, const ManifoldModel& m, const PointRep& x) {
  const double d = distance(m, spec.y0, x);
  return -std::exp(-spec.alpha * 0.5 * d * d) + std::exp(-spec.alpha * 0.5 * spec.r0 * spec.r0);
}

Jet2 barrier_jet(const BarrierSpec& spec, const ManifoldModel& m, const PointRep& x,
                 const Frame& frame) {
  const double d = distance(m, spec.y0, x);
  if (d < 1e-10) throw std::domain_error("barrier_jet: x coincides with the annulus center");
  const Jet2 fjet = jet_of_dsq(m, spec.y0, x, frame);
  const double aE = spec.alpha * std::exp(-spec.alpha * fjet.s);
  Jet2 out;
  out.s = -std::exp(-spec.alpha * fjet.s) + std::exp(-spec.alpha * 0.5 * spec.r0 * spec.r0);
  out.q = aE * fjet.q;
  out.Q = fjet.Q.add_outer(fjet.q, -spec.alpha).scaled(aE);
  out.gradient_is_zero = false;
  return out;
}

namespace {

std::vector<PointRep> annulus_samples(const ManifoldModel& m, const PointRep& y0, double r0,
                                      const PointRep& x0, double r, const CertifyOptions& opts) {
  // concentric geodesic spheres biased toward the outer sphere S(y0, r0),
  // restricted to the lens U = B(x0, r) & B(y0, r0)
  std::vector<PointRep> out;
  const Frame e0 = some_frame(m, y0);
  const double rho_lo = std::max(0.2 * r0, r0 - 0.9 * r);
  for (int i = 0; i < opts.radii; ++i) {
    const double rho =
        rho_lo + (r0 * 0.999 - rho_lo) * static_cast<double>(i) / (opts.radii - 1);
    for (int j = 0; j < opts.directions; ++j) {
      Rng rng = Rng::stream(opts.seed, static_cast<std::uint64_t>(i) * 1000 + j);
      Vec dir(static_cast<std::size_t>(m.n));
      for (auto& c : dir) c = rng.normal();
      const double nn = norm(dir);
      if (nn < 1e-12) continue;
      const PointRep x = exp_map(m, y0, from_frame_coords(m, e0, (rho / nn) * dir));
      if (distance(m, x, x0) < r) out.push_back(x);
    }
  }
  // the radial probe toward x0 is always in the lens
  const TangentRep to_x0 = log_map(m, y0, x0);
  for (int i = 0; i < opts.radii; ++i) {
    const double rho =
        rho_lo + (r0 * 0.999 - rho_lo) * static_cast<double>(i) / (opts.radii - 1);
    const PointRep x = exp_map(m, y0, TangentRep{y0, (rho / r0) * to_x0.vec});
    if (distance(m, x, x0) < r) out.push_back(x);
  }
  return out;
}

}  // namespace

Certification certify_strict_supersolution(const OperatorKernel& k, const ManifoldModel& m,
                                           const PointRep& y0, double r0,
                                           const CertifyOptions& opts) {
  const double R = convexity_radius(m, y0);
  if (!(r0 > 0.0) || r0 >= R)
    throw std::invalid_argument("certify: require 0 < r0 < convexity radius of y0");
  Certification cert;
  cert.r = opts.r > 0.0 ? opts.r : 0.5 * std::min(r0, (std::isfinite(R) ? R : 2.0 * r0) - r0);
  // touching point on the outer sphere, along the first frame direction
  const Frame e0 = some_frame(m, y0);
  Vec dir(static_cast<std::size_t>(m.n), 0.0);
  dir[0] = r0;
  cert.x0 = exp_map(m, y0, from_frame_coords(m, e0, dir));
  cert.samples = annulus_samples(m, y0, r0, cert.x0, cert.r, opts);
  if (cert.samples.empty()) throw std::runtime_error("certify: empty annulus sample set");

  const auto min_residual = [&](double alpha) {
    const BarrierSpec spec{y0, r0, alpha};
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& x : cert.samples) {
      const Jet2 jet = barrier_jet(spec, m, x, radial_frame(m, y0, x));
      EvalContext ctx;
      ctx.manifold = &m;
      ctx.point = &x;
      worst = std::min(worst, evaluate(k, ctx, jet));
    }
    return worst;
  };

  // doubling then bisection on the least certifying alpha
  double lo = 0.0, hi = -1.0;
  if (min_residual(1.0) > opts.pos_tol) {
    hi = 1.0;
  } else {
    lo = 1.0;
    for (double a = 2.0; a <= opts.alpha_max; a *= 2.0) {
      if (min_residual(a) > opts.pos_tol) {
        hi = a;
        break;
      }
      lo = a;
    }
  }
  PropertyReport rep;
  rep.id = "barrier-certification/" + k.id;
  std::ostringstream os;
  os << "seed=" << opts.seed << " kappa=" << format_double(m.kappa) << " r0=" << format_double(r0)
     << " r=" << format_double(cert.r) << " samples=" << cert.samples.size();
  rep.sampling = os.str();
  if (hi < 0.0) {
    rep.verdict = Verdict::inconclusive;
    rep.note = "alpha search exhausted";
    cert.found = false;
    cert.report = rep;
    return cert;
  }
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (min_residual(mid) > opts.pos_tol) hi = mid;
    else lo = mid;
  }
  cert.alpha = hi;
  cert.margin = min_residual(hi);
  cert.c = BarrierSpec{y0, r0, cert.alpha}.c();
  cert.found = true;

  // push alpha until the barrier constant drops below one, positivity intact
  double au = cert.alpha;
  while (BarrierSpec{y0, r0, au}.c() >= 1.0 && au <= opts.alpha_max) au *= 2.0;
  cert.alpha_unit_c = au;
  cert.c_unit = BarrierSpec{y0, r0, au}.c();
  cert.margin_unit_c = min_residual(au);

  // eps h must stay a strict supersolution across the eps grid
  const BarrierSpec spec{y0, r0, cert.alpha};
  bool eps_ok = true;
  for (int i = 1; i <= opts.epsilon_grid; ++i) {
    const double eps = static_cast<double>(i) / (opts.epsilon_grid + 1);
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& x : cert.samples) {
      const Jet2 jet = scaled_jet(barrier_jet(spec, m, x, radial_frame(m, y0, x)), eps);
      EvalContext ctx;
      ctx.manifold = &m;
      ctx.point = &x;
      worst = std::min(worst, evaluate(k, ctx, jet));
    }
    cert.epsilon_margins.push_back(worst);
    if (worst <= 0.0) eps_ok = false;
  }
  rep.verdict = eps_ok ? Verdict::pass : Verdict::fail;
  rep.alpha_threshold = cert.alpha;
  rep.min_margin = cert.margin;
  rep.note = "certified on samples; c = " + format_double(cert.c);
  for (std::size_t i = 0; i < cert.epsilon_margins.size(); ++i)
    rep.table.emplace_back(static_cast<double>(i + 1) / (opts.epsilon_grid + 1),
                           cert.epsilon_margins[i]);
  cert.report = rep;
  return cert;
}

double lb_flat_alpha_requirement(int n, double d_min) { return n / (d_min * d_min); }

double hopf_lower_bound(const OperatorKernel& k, const ManifoldModel& m, const PointRep& y,
                        double r, const PointRep& x0, const Certification& cert, double epsilon,
                        const TangentRep& direction) {
  (void)k;
  if (!cert.found) throw std::invalid_argument("hopf_lower_bound: certification not available");
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("hopf_lower_bound: epsilon must lie in (0,1)");
  const double d = distance(m, y, x0);
  if (std::abs(d - r) > 1e-8 * std::max(1.0, r))
    throw std::invalid_argument("hopf_lower_bound: x0 is not on the sphere S(y,r)");
  const DsqValueGrad vg = dsq_value_grad(m, y, x0);
  const double g = metric_dot(m, vg.grad, direction);
  if (g <= 1e-12)
    throw std::domain_error("hopf_lower_bound: approach direction has no inward radial part");
  return epsilon * cert.c * g;
}

double hopf_epsilon_for(const std::function<double(const PointRep&)>& u, double u_x0,
                        const BarrierSpec& spec, const ManifoldModel& m, const PointRep& x0,
                        double r_tilde, int boundary_samples) {
  // eps <= (u(x) - u(x0)) / h(x) on the inner part of the lens boundary,
  // where both sides are negative; the spherical part has h = 0.
  double eps = 0.999;
  const Frame ex = some_frame(m, x0);
  for (int i = 0; i < boundary_samples; ++i) {
    Rng rng = Rng::stream(20240808, static_cast<std::uint64_t>(i));
    Vec dir(static_cast<std::size_t>(m.n));
    for (auto& c : dir) c = rng.normal();
    const double nn = norm(dir);
    if (nn < 1e-12) continue;
    const PointRep x = exp_map(m, x0, from_frame_coords(m, ex, (r_tilde / nn) * dir));
    const double d_center = distance(m, spec.y0, x);
    if (d_center >= spec.r0) continue;  // outside the lens
    const double h = barrier_value(spec, m, x);
    if (h >= -1e-14) continue;
    const double gap = u(x) - u_x0;
    if (gap >= 0.0) throw std::domain_error("hopf_epsilon_for: u does not stay below u(x0)");
    eps = std::min(eps, gap / h);
  }
  return std::min(eps, 0.999);
}

}  // namespace curvops
