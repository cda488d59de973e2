#include "curvops/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace curvops {

namespace {

double clamp(double x, double lo, double hi) { return std::min(hi, std::max(lo, x)); }

Vec axpy(double c, const Vec& x, const Vec& y) {  // c*x + y
  Vec r(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) r[i] = c * x[i] + y[i];
  return r;
}

}  // namespace

double ambient_dot(const ManifoldModel& m, const Vec& a, const Vec& b) {
  if (m.kappa >= 0.0) return dot(a, b);
  double s = -a[0] * b[0];
  for (std::size_t i = 1; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double metric_dot(const ManifoldModel& m, const TangentRep& u, const TangentRep& v) {
  return ambient_dot(m, u.vec, v.vec);
}

double metric_norm(const ManifoldModel& m, const TangentRep& v) {
  return std::sqrt(std::max(0.0, metric_dot(m, v, v)));
}

PointRep base_point(const ManifoldModel& m) {
  Vec c(static_cast<std::size_t>(m.ambient_dim()), 0.0);
  if (m.kappa != 0.0) c[0] = m.radius();
  return PointRep{c};
}

void validate_point(const ManifoldModel& m, const PointRep& p, double tol) {
  if (static_cast<int>(p.coords.size()) != m.ambient_dim())
    throw std::invalid_argument("point has wrong ambient dimension");
  if (m.kappa == 0.0) return;
  const double r2 = m.radius() * m.radius();
  const double c = ambient_dot(m, p.coords, p.coords) - (m.kappa > 0.0 ? r2 : -r2);
  const double scale = std::max({1.0, r2, dot(p.coords, p.coords)});
  if (std::abs(c) > tol * scale)
    throw std::invalid_argument("point violates the model constraint");
  if (m.kappa < 0.0 && p.coords[0] <= 0.0)
    throw std::invalid_argument("point is not on the upper hyperboloid sheet");
}

namespace {

// snap a nearly-on-model point back onto the constraint surface
PointRep reproject(const ManifoldModel& m, PointRep p) {
  if (m.kappa == 0.0) return p;
  const double r = m.radius();
  const double q = m.kappa > 0.0 ? dot(p.coords, p.coords)
                                 : -ambient_dot(m, p.coords, p.coords);
  if (q > 0.0) p.coords = (r / std::sqrt(q)) * p.coords;
  return p;
}

}  // namespace

void validate_tangent(const ManifoldModel& m, const TangentRep& v, double tol) {
  validate_point(m, v.base, 1e-10);
  if (v.vec.size() != v.base.coords.size())
    throw std::invalid_argument("tangent vector has wrong ambient dimension");
  if (m.kappa == 0.0) return;
  const double c = ambient_dot(m, v.base.coords, v.vec);
  const double scale = std::max(1.0, metric_norm(m, v) * m.radius());
  if (std::abs(c) > tol * scale)
    throw std::invalid_argument("vector is not tangent at its base point");
}

void validate_frame(const ManifoldModel& m, const Frame& e, double tol) {
  if (static_cast<int>(e.vectors.size()) != m.n)
    throw std::invalid_argument("frame must have n vectors");
  for (const auto& v : e.vectors) validate_tangent(m, TangentRep{e.base, v}, 1e-8);
  for (std::size_t i = 0; i < e.vectors.size(); ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      const double g = ambient_dot(m, e.vectors[i], e.vectors[j]);
      const double want = i == j ? 1.0 : 0.0;
      if (std::abs(g - want) > tol) throw std::invalid_argument("frame is not orthonormal");
    }
}

double distance(const ManifoldModel& m, const PointRep& x, const PointRep& y) {
  validate_point(m, x);
  validate_point(m, y);
  if (m.kappa == 0.0) return norm(y.coords - x.coords);
  const double r = m.radius();
  if (m.kappa > 0.0) {
    const double c = clamp(dot(x.coords, y.coords) / (r * r), -1.0, 1.0);
    return r * std::acos(c);
  }
  const double c = std::max(1.0, -ambient_dot(m, x.coords, y.coords) / (r * r));
  return r * std::acosh(c);
}

PointRep exp_map(const ManifoldModel& m, const PointRep& x, const TangentRep& v) {
  validate_point(m, x);
  if (norm(v.base.coords - x.coords) > 1e-9 * std::max(1.0, norm(x.coords)))
    throw std::invalid_argument("exp_map: tangent vector is based at a different point");
  if (m.kappa == 0.0) return PointRep{x.coords + v.vec};
  const double r = m.radius();
  const double t = metric_norm(m, v);
  if (t < 1e-300) return x;
  const double th = t / r;
  if (m.kappa > 0.0)
    return reproject(m, PointRep{axpy(std::sin(th) * r / t, v.vec, std::cos(th) * x.coords)});
  return reproject(m, PointRep{axpy(std::sinh(th) * r / t, v.vec, std::cosh(th) * x.coords)});
}

TangentRep log_map(const ManifoldModel& m, const PointRep& x, const PointRep& y) {
  const double d = distance(m, x, y);
  const int adim = m.ambient_dim();
  if (d < 1e-300) return TangentRep{x, Vec(static_cast<std::size_t>(adim), 0.0)};
  if (m.kappa == 0.0) return TangentRep{x, y.coords - x.coords};
  const double r = m.radius();
  if (m.kappa > 0.0 && d > 3.14159265358979312 * r * (1.0 - 1e-9))
    throw std::domain_error("log_map: target at or beyond the injectivity radius");
  const double r2 = r * r;
  // remove the x-component of y; the remainder is tangent at x along the geodesic
  const double xy = ambient_dot(m, x.coords, y.coords);
  const double coef = m.kappa > 0.0 ? -xy / r2 : xy / r2;
  Vec u = axpy(coef, x.coords, y.coords);
  const double nu = std::sqrt(std::max(0.0, ambient_dot(m, u, u)));
  if (nu < 1e-300) throw std::domain_error("log_map: direction degenerate (antipodal pair)");
  return TangentRep{x, (d / nu) * u};
}

TangentRep parallel_transport(const ManifoldModel& m, const PointRep& x, const PointRep& y,
                              const TangentRep& v) {
  validate_tangent(m, v, 1e-8);
  if (norm(v.base.coords - x.coords) > 1e-9 * std::max(1.0, norm(x.coords)))
    throw std::invalid_argument("parallel_transport: vector not based at x");
  const double d = distance(m, x, y);
  if (m.kappa == 0.0) return TangentRep{y, v.vec};
  if (d < 1e-14) return TangentRep{y, v.vec};
  if (d >= std::min(injectivity_radius(m, x), injectivity_radius(m, y)) * (1.0 - 1e-12))
    throw std::domain_error("parallel_transport: beyond the injectivity radius");
  const TangentRep lx = log_map(m, x, y);
  const TangentRep ly = log_map(m, y, x);
  const Vec u = (1.0 / d) * lx.vec;        // unit tangent at x toward y
  const Vec ty = (-1.0 / d) * ly.vec;      // unit tangent at y away from x
  const double a = ambient_dot(m, v.vec, u);
  Vec w = axpy(-a, u, v.vec);              // component normal to the geodesic plane
  return TangentRep{y, axpy(a, ty, w)};
}

double injectivity_radius(const ManifoldModel& m, const PointRep& x) {
  validate_point(m, x);
  if (m.kappa > 0.0) return 3.14159265358979312 / std::sqrt(m.kappa);
  return infinite_radius();
}

double convexity_radius(const ManifoldModel& m, const PointRep& x) {
  if (m.kappa > 0.0) return 0.5 * 3.14159265358979312 / std::sqrt(m.kappa);
  (void)x;
  return infinite_radius();
}

double dsq_tangential_eigenvalue(double kappa, double d) {
  if (kappa == 0.0) return 1.0;
  const double s = std::sqrt(std::abs(kappa)) * d;
  if (s < 1e-8) return kappa > 0.0 ? 1.0 - s * s / 3.0 : 1.0 + s * s / 3.0;
  return kappa > 0.0 ? s * std::cos(s) / std::sin(s) : s * std::cosh(s) / std::sinh(s);
}

DsqValueGrad dsq_value_grad(const ManifoldModel& m, const PointRep& x0, const PointRep& x) {
  const double d = distance(m, x0, x);
  if (d >= injectivity_radius(m, x0) * (1.0 - 1e-12))
    throw std::domain_error("dsq_value_grad: beyond the injectivity radius");
  if (d < 1e-300)
    return DsqValueGrad{0.0, TangentRep{x, Vec(static_cast<std::size_t>(m.ambient_dim()), 0.0)}};
  TangentRep g = log_map(m, x, x0);
  g.vec = negate(g.vec);
  return DsqValueGrad{0.5 * d * d, g};
}

SymForm dsq_hessian(const ManifoldModel& m, const PointRep& x0, const PointRep& x,
                    const Frame& frame) {
  const double d = distance(m, x0, x);
  if (d < 1e-8) throw std::domain_error("dsq_hessian: x too close to x0 (frame degenerate)");
  if (d >= injectivity_radius(m, x0) * (1.0 - 1e-12))
    throw std::domain_error("dsq_hessian: beyond the injectivity radius");
  if (norm(frame.base.coords - x.coords) > 1e-9 * std::max(1.0, norm(x.coords)))
    throw std::invalid_argument("dsq_hessian: frame based at a different point");
  const double ct = dsq_tangential_eigenvalue(m.kappa, d);
  const DsqValueGrad vg = dsq_value_grad(m, x0, x);
  const Vec er = (1.0 / d) * vg.grad.vec;
  // D^2 f = ct * g + (1 - ct) * er (x) er, written in the caller's frame
  SymForm h(m.n);
  Vec r(static_cast<std::size_t>(m.n));
  for (int i = 0; i < m.n; ++i) r[i] = ambient_dot(m, frame.vectors[i], er);
  for (int i = 0; i < m.n; ++i)
    for (int j = 0; j <= i; ++j)
      h.set(i, j, ct * (i == j ? 1.0 : 0.0) + (1.0 - ct) * r[i] * r[j]);
  return h;
}

TangentRep project_tangent(const ManifoldModel& m, const PointRep& x, const Vec& ambient) {
  if (m.kappa == 0.0) return TangentRep{x, ambient};
  const double r2 = m.radius() * m.radius();
  const double c = ambient_dot(m, x.coords, ambient) / (m.kappa > 0.0 ? r2 : -r2);
  return TangentRep{x, axpy(-c, x.coords, ambient)};
}

namespace {

Frame gram_schmidt_frame(const ManifoldModel& m, const PointRep& x, const Vec* seed) {
  Frame e{x, {}};
  const int adim = m.ambient_dim();
  std::vector<Vec> candidates;
  if (seed) candidates.push_back(*seed);
  for (int k = 0; k < adim; ++k) {
    Vec axis(static_cast<std::size_t>(adim), 0.0);
    axis[static_cast<std::size_t>(k)] = 1.0;
    candidates.push_back(axis);
  }
  for (const Vec& c : candidates) {
    if (static_cast<int>(e.vectors.size()) == m.n) break;
    Vec v = project_tangent(m, x, c).vec;
    for (const Vec& prev : e.vectors) v = axpy(-ambient_dot(m, prev, v), prev, v);
    const double nn = std::sqrt(std::max(0.0, ambient_dot(m, v, v)));
    if (nn < 1e-10) continue;
    e.vectors.push_back((1.0 / nn) * v);
  }
  if (static_cast<int>(e.vectors.size()) != m.n)
    throw std::runtime_error("could not complete an orthonormal frame");
  return e;
}

}  // namespace

Frame radial_frame(const ManifoldModel& m, const PointRep& x0, const PointRep& x) {
  const DsqValueGrad vg = dsq_value_grad(m, x0, x);
  const double d = metric_norm(m, vg.grad);
  if (d < 1e-10) throw std::domain_error("radial_frame: x coincides with x0");
  const Vec er = (1.0 / d) * vg.grad.vec;
  return gram_schmidt_frame(m, x, &er);
}

Frame some_frame(const ManifoldModel& m, const PointRep& x) {
  return gram_schmidt_frame(m, x, nullptr);
}

TangentRep from_frame_coords(const ManifoldModel& m, const Frame& e, const Vec& coords) {
  Vec v(static_cast<std::size_t>(m.ambient_dim()), 0.0);
  for (int i = 0; i < m.n; ++i) v = axpy(coords[static_cast<std::size_t>(i)], e.vectors[i], v);
  return TangentRep{e.base, v};
}

PointRep random_point(const ManifoldModel& m, Rng& rng, double max_dist) {
  const PointRep o = base_point(m);
  if (m.kappa > 0.0) max_dist = std::min(max_dist, 0.9 * injectivity_radius(m, o));
  const Frame e = some_frame(m, o);
  Vec c(static_cast<std::size_t>(m.n));
  for (auto& x : c) x = rng.normal();
  const double nn = norm(c);
  const double t = rng.uniform(0.0, max_dist);
  if (nn < 1e-12) return o;
  return exp_map(m, o, from_frame_coords(m, e, (t / nn) * c));
}

TangentRep random_tangent(const ManifoldModel& m, const PointRep& x, Rng& rng, double max_norm) {
  const Frame e = some_frame(m, x);
  Vec c(static_cast<std::size_t>(m.n));
  for (auto& v : c) v = rng.normal();
  const double nn = norm(c);
  const double t = rng.uniform(0.0, max_norm);
  if (nn < 1e-12) return TangentRep{x, Vec(static_cast<std::size_t>(m.ambient_dim()), 0.0)};
  return from_frame_coords(m, e, (t / nn) * c);
}

}  // namespace curvops
