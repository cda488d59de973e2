#include "curvops/discrete.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>
#include <stdexcept>

namespace curvops {

namespace {

constexpr double kPi = 3.14159265358979312;

struct Dir {
  int a, b;
  double len2;
  double angle;  // in [0, pi)
};

const std::vector<Dir>& stencil16() {
  static const std::vector<Dir> dirs = [] {
    std::vector<Dir> d;
    const int offs[16][2] = {{1, 0},  {3, 1},  {2, 1},  {3, 2},  {1, 1},  {2, 3},
                             {1, 2},  {1, 3},  {0, 1},  {-1, 3}, {-1, 2}, {-2, 3},
                             {-1, 1}, {-3, 2}, {-2, 1}, {-3, 1}};
    for (const auto& o : offs) {
      Dir dd;
      dd.a = o[0];
      dd.b = o[1];
      dd.len2 = static_cast<double>(o[0] * o[0] + o[1] * o[1]);
      dd.angle = std::atan2(static_cast<double>(o[1]), static_cast<double>(o[0]));
      if (dd.angle < 0.0) dd.angle += kPi;
      d.push_back(dd);
    }
    std::sort(d.begin(), d.end(), [](const Dir& x, const Dir& y) { return x.angle < y.angle; });
    return d;
  }();
  return dirs;
}

double sn_kappa(double kappa, double rho) {
  if (kappa == 0.0) return rho;
  const double sk = std::sqrt(std::abs(kappa));
  return kappa > 0.0 ? std::sin(sk * rho) / sk : std::sinh(sk * rho) / sk;
}

double sn_kappa_prime(double kappa, double rho) {
  if (kappa == 0.0) return 1.0;
  const double sk = std::sqrt(std::abs(kappa));
  return kappa > 0.0 ? std::cos(sk * rho) : std::cosh(sk * rho);
}

}  // namespace

PointRep Grid2D::point(int i, int j) const {
  if (m.kappa == 0.0) return PointRep{{cx(i), cy(j)}};
  return exp_map(m, center, from_frame_coords(m, center_frame, {cx(i), cy(j)}));
}

long Grid2D::interior_count() const {
  long c = 0;
  for (auto f : interior) c += f;
  return c;
}

Grid2D make_grid(const ManifoldModel& m, int size, double spacing) {
  if (m.n != 2) throw std::invalid_argument("make_grid: the grid testbed is two-dimensional");
  if (size < 9) throw std::invalid_argument("make_grid: size must be at least 9");
  Grid2D g;
  g.m = m;
  g.size = size;
  g.spacing = spacing;
  g.center = base_point(m);
  g.center_frame = some_frame(m, g.center);
  g.interior.assign(static_cast<std::size_t>(size) * size, 0);
  for (int j = 3; j < size - 3; ++j)
    for (int i = 3; i < size - 3; ++i) g.interior[static_cast<std::size_t>(g.index(i, j))] = 1;
  if (m.kappa > 0.0) {
    const double extent = 0.5 * (size - 1) * spacing * 1.4143;
    if (extent >= 0.95 * convexity_radius(m, g.center))
      throw std::invalid_argument("make_grid: grid exceeds the convexity radius");
  }
  return g;
}

void mask_domain(Grid2D& g, const std::function<bool(double, double)>& inside) {
  for (int j = 0; j < g.size; ++j)
    for (int i = 0; i < g.size; ++i) {
      auto& f = g.interior[static_cast<std::size_t>(g.index(i, j))];
      if (f && !inside(g.cx(i), g.cy(j))) f = 0;
    }
}

DiscreteField sample_field(const Grid2D& g, const std::function<double(double, double)>& f) {
  DiscreteField u;
  u.values.resize(static_cast<std::size_t>(g.node_count()));
  for (int j = 0; j < g.size; ++j)
    for (int i = 0; i < g.size; ++i)
      u.values[static_cast<std::size_t>(g.index(i, j))] = f(g.cx(i), g.cy(j));
  return u;
}

// ---------------------------------------------------------------------------

Scheme::Scheme(OperatorKernel kernel, const Grid2D& g) : kernel_(std::move(kernel)) {
  const std::string& id = kernel_.id;
  const auto starts = [&](const char* p) { return id.rfind(p, 0) == 0; };
  if (g.m.kappa != 0.0) {
    form_ = Form::generic;
  } else if (starts("laplace-beltrami")) {
    form_ = Form::trace;
  } else if (starts("pucci-orig+")) {
    form_ = Form::orig_plus;
    a_ = kernel_.params.at(0);
  } else if (starts("pucci-orig-")) {
    form_ = Form::orig_minus;
    a_ = kernel_.params.at(0);
  } else if (starts("pucci+")) {
    form_ = Form::pucci_plus;
    a_ = kernel_.params.at(0);
    b_ = kernel_.params.at(1);
  } else if (starts("pucci-")) {
    form_ = Form::pucci_minus;
    a_ = kernel_.params.at(0);
    b_ = kernel_.params.at(1);
  } else if (starts("game-p-laplacian")) {
    form_ = Form::game;
    a_ = kernel_.params.at(0);
  } else if (starts("p-laplacian")) {
    form_ = Form::p_lap;
    a_ = kernel_.params.at(0);
  } else if (starts("inf-laplacian-h")) {
    form_ = Form::inf_lap_h;
    a_ = kernel_.params.at(0);
  } else if (starts("inf-laplacian")) {
    form_ = Form::inf_lap;
  } else if (starts("mean-curvature")) {
    form_ = Form::mean_curv;
  } else if (starts("capillary")) {
    form_ = Form::capillary;
    a_ = kernel_.params.at(1);  // n H
  } else if (starts("counterexample")) {
    form_ = Form::counterex;
  } else {
    form_ = Form::generic;
  }
  monotone_ = form_ != Form::generic;
}

SchemeSpec Scheme::spec() const { return SchemeSpec{kernel_.id, 16, monotone_}; }

namespace {

struct NodeStencil {
  const Grid2D* g;
  const std::vector<double>* u;
  int i, j;

  double value(int di, int dj) const {
    return (*u)[static_cast<std::size_t>(g->index(i + di, j + dj))];
  }
  double center() const { return value(0, 0); }
  double second(const Dir& d) const {
    const double h2 = g->spacing * g->spacing;
    return (value(d.a, d.b) + value(-d.a, -d.b) - 2.0 * center()) / (d.len2 * h2);
  }
  double second_axis_x() const {
    const double h2 = g->spacing * g->spacing;
    return (value(1, 0) + value(-1, 0) - 2.0 * center()) / h2;
  }
  double second_axis_y() const {
    const double h2 = g->spacing * g->spacing;
    return (value(0, 1) + value(0, -1) - 2.0 * center()) / h2;
  }
  double grad_x() const { return (value(1, 0) - value(-1, 0)) / (2.0 * g->spacing); }
  double grad_y() const { return (value(0, 1) - value(0, -1)) / (2.0 * g->spacing); }

  /// Angle-interpolated directional second difference: a convex combination
  /// of the two stencil directions bracketing theta, so monotone in the
  /// neighbor values.
  double second_dir(double theta) const {
    const auto& dirs = stencil16();
    theta = std::fmod(theta, kPi);
    if (theta < 0.0) theta += kPi;
    std::size_t hi = 0;
    while (hi < dirs.size() && dirs[hi].angle <= theta) ++hi;
    const std::size_t lo = hi == 0 ? dirs.size() - 1 : hi - 1;
    double a0 = dirs[lo].angle, a1;
    if (hi == dirs.size()) {
      a1 = dirs[0].angle + kPi;
    } else {
      a1 = dirs[hi].angle;
      if (hi == 0) a0 = dirs[dirs.size() - 1].angle - kPi;
    }
    const std::size_t hidx = hi == dirs.size() ? 0 : hi;
    const double t = a1 > a0 ? (theta - a0) / (a1 - a0) : 0.0;
    return (1.0 - t) * second(dirs[lo]) + t * second(dirs[hidx]);
  }

  void extremes(double* mn, double* mx) const {
    *mn = std::numeric_limits<double>::infinity();
    *mx = -std::numeric_limits<double>::infinity();
    for (const auto& d : stencil16()) {
      const double s = second(d);
      *mn = std::min(*mn, s);
      *mx = std::max(*mx, s);
    }
  }
};

}  // namespace

double Scheme::residual_at(const Grid2D& g, const std::vector<double>& u, int i, int j,
                           bool* flagged) const {
  return residual_core(g, u, u, i, j, flagged);
}

double Scheme::residual_frozen(const Grid2D& g, const std::vector<double>& base,
                               const std::vector<double>& u, int i, int j) const {
  return residual_core(g, base, u, i, j, nullptr);
}

double Scheme::residual_core(const Grid2D& g, const std::vector<double>& cf,
                             const std::vector<double>& uf, int i, int j,
                             bool* flagged) const {
  if (flagged) *flagged = false;
  const NodeStencil st{&g, &uf, i, j};       // second differences
  const NodeStencil co{&g, &cf, i, j};       // frozen gradient coefficients
  const double h = g.spacing;
  const double grad_tol = 1e-12 / h;

  switch (form_) {
    case Form::trace:
      return -(st.second_axis_x() + st.second_axis_y());
    case Form::pucci_plus: {
      double mn, mx;
      st.extremes(&mn, &mx);
      const double tr = st.second_axis_x() + st.second_axis_y();
      return -a_ * tr - (b_ - a_) * std::min({0.0, mn, tr});
    }
    case Form::pucci_minus: {
      double mn, mx;
      st.extremes(&mn, &mx);
      const double tr = st.second_axis_x() + st.second_axis_y();
      return -a_ * tr - (b_ - a_) * std::max({0.0, mx, tr});
    }
    case Form::orig_plus: {
      double mn, mx;
      st.extremes(&mn, &mx);
      const double tr = st.second_axis_x() + st.second_axis_y();
      return -a_ * tr - (1.0 - 2.0 * a_) * mn;
    }
    case Form::orig_minus: {
      double mn, mx;
      st.extremes(&mn, &mx);
      const double tr = st.second_axis_x() + st.second_axis_y();
      return -a_ * tr - (1.0 - 2.0 * a_) * mx;
    }
    case Form::game:
    case Form::p_lap: {
      const double p = a_;
      const double gx = co.grad_x(), gy = co.grad_y();
      const double nv = std::hypot(gx, gy);
      const double tr = st.second_axis_x() + st.second_axis_y();
      if (nv <= grad_tol) {
        if (flagged) *flagged = true;
        double mn, mx;
        st.extremes(&mn, &mx);
        return -tr - (p - 2.0) * (p >= 2.0 ? mx : mn);  // normalized fallback
      }
      const double theta = std::atan2(gy, gx);
      double game;
      if (p >= 2.0) game = -tr - (p - 2.0) * st.second_dir(theta);
      else game = -(p - 1.0) * tr + (p - 2.0) * st.second_dir(theta + 0.5 * kPi);
      return form_ == Form::game ? game : std::pow(nv, p - 2.0) * game;
    }
    case Form::inf_lap:
    case Form::inf_lap_h: {
      const double gx = co.grad_x(), gy = co.grad_y();
      const double nv = std::hypot(gx, gy);
      if (nv <= grad_tol) {
        if (flagged) *flagged = true;
        double mn, mx;
        st.extremes(&mn, &mx);
        return -mx;  // normalized fallback
      }
      const double par = st.second_dir(std::atan2(gy, gx));
      const double power = form_ == Form::inf_lap ? 2.0 : a_ - 1.0;
      return -std::pow(nv, power) * par;
    }
    case Form::mean_curv: {
      const double gx = co.grad_x(), gy = co.grad_y();
      const double g2 = gx * gx + gy * gy;
      const double tr = st.second_axis_x() + st.second_axis_y();
      double perp = 0.0;
      if (g2 > grad_tol * grad_tol) perp = st.second_dir(std::atan2(gy, gx) + 0.5 * kPi);
      return std::pow(1.0 + g2, -1.5) * (-tr - g2 * perp);
    }
    case Form::capillary: {
      const double gx = co.grad_x(), gy = co.grad_y();
      const double g2 = gx * gx + gy * gy;
      const double tr = st.second_axis_x() + st.second_axis_y();
      double perp = 0.0;
      if (g2 > grad_tol * grad_tol) perp = st.second_dir(std::atan2(gy, gx) + 0.5 * kPi);
      return a_ * st.center() * std::pow(1.0 + g2, 1.5) - tr - g2 * perp;
    }
    case Form::counterex: {
      const double t = st.second_axis_x() + st.second_axis_y();
      double f = g.index(i, j) == kernel_.special_node ? -1.0 : 0.0;
      if (reflected_sign_) f = -f;
      return -t / (1.0 + std::abs(t)) + f;
    }
    case Form::generic:
      break;
  }

  // assembled jet: chart derivatives corrected to an orthonormal frame in
  // geodesic polar coordinates around the grid center
  const double gx = co.grad_x(), gy = co.grad_y();
  const double x = g.cx(i), y = g.cy(j);
  const double rho = std::hypot(x, y);
  double vr, vt, hrr, htt, hrt;
  if (rho < 1e-12 || g.m.kappa == 0.0) {
    const double dx = st.second_axis_x(), dy = st.second_axis_y();
    const double mixed = 0.5 * (st.second_dir(0.25 * kPi) - st.second_dir(0.75 * kPi));
    vr = gx;
    vt = gy;
    hrr = dx;
    htt = dy;
    hrt = mixed;
  } else {
    const double theta = std::atan2(y, x);
    const double crr = st.second_dir(theta);
    const double ctt = st.second_dir(theta + 0.5 * kPi);
    const double crt = 0.5 * (st.second_dir(theta + 0.25 * kPi) - st.second_dir(theta - 0.25 * kPi));
    const double ur = (x * gx + y * gy) / rho;
    const double ut = (-y * gx + x * gy) / rho;
    const double s = sn_kappa(g.m.kappa, rho);
    const double sp = sn_kappa_prime(g.m.kappa, rho);
    vr = ur;
    vt = (rho / s) * ut;
    hrr = crr;
    htt = (rho * rho / (s * s)) * ctt + (sp / s - rho / (s * s)) * ur;
    hrt = (rho / s) * crt + (1.0 / s - rho * sp / (s * s)) * ut;
  }
  SymMat A(2);
  A.set(0, 0, hrr);
  A.set(1, 1, htt);
  A.set(0, 1, hrt);
  Vec v{vr, vt};
  EvalContext ctx;
  ctx.manifold = &g.m;
  ctx.node = g.index(i, j);
  const PointRep p = g.point(i, j);
  ctx.point = &p;
  if (kernel_.singular_at_zero && norm(v) <= grad_tol) {
    if (flagged) *flagged = true;
    return -A.trace();  // consistency-probe fallback only
  }
  return kernel_.fn(ctx, uf[static_cast<std::size_t>(g.index(i, j))], v, A);
}

double Scheme::update_residual_at(const Grid2D& g, const std::vector<double>& u, int i,
                                  int j) const {
  if (form_ != Form::inf_lap && form_ != Form::inf_lap_h)
    return residual_core(g, u, u, i, j, nullptr);
  const NodeStencil st{&g, &u, i, j};
  const double grad_tol = 1e-12 / g.spacing;
  const double gx = st.grad_x(), gy = st.grad_y();
  const double nv = std::hypot(gx, gy);
  if (nv <= grad_tol) {
    double mn, mx;
    st.extremes(&mn, &mx);
    return -mx;
  }
  return -st.second_dir(std::atan2(gy, gx));
}

Residuals Scheme::residuals(const Grid2D& g, const DiscreteField& u) const {
  Residuals r;
  r.values.assign(static_cast<std::size_t>(g.node_count()), 0.0);
  r.flagged.assign(static_cast<std::size_t>(g.node_count()), 0);
  for (int j = 0; j < g.size; ++j)
    for (int i = 0; i < g.size; ++i) {
      if (!g.is_interior(i, j)) continue;
      bool fl = false;
      r.values[static_cast<std::size_t>(g.index(i, j))] = residual_at(g, u.values, i, j, &fl);
      r.flagged[static_cast<std::size_t>(g.index(i, j))] = fl ? 1 : 0;
    }
  return r;
}

double Scheme::coefficient_bound(const Grid2D& g, const std::vector<double>& u) const {
  const double h2 = g.spacing * g.spacing;
  double gmax2 = 0.0;
  double smax = 0.0;
  for (int j = 1; j + 1 < g.size; ++j)
    for (int i = 1; i + 1 < g.size; ++i) {
      if (!g.is_interior(i, j)) continue;
      const NodeStencil st{&g, &u, i, j};
      const double gx = st.grad_x(), gy = st.grad_y();
      gmax2 = std::max(gmax2, gx * gx + gy * gy);
      smax = std::max(smax, std::abs(st.center()));
    }
  switch (form_) {
    case Form::trace:
      return 4.0 / h2;
    case Form::pucci_plus:
    case Form::pucci_minus:
      return 4.0 * b_ / h2;
    case Form::orig_plus:
    case Form::orig_minus:
      return 4.0 / h2;
    case Form::game:
      return (4.0 + 2.0 * std::abs(a_ - 2.0) + 4.0 * std::abs(a_ - 1.0)) / h2;
    case Form::p_lap: {
      const double fac = std::pow(std::max(std::sqrt(gmax2), 1e-3), a_ - 2.0);
      return fac * (4.0 + 2.0 * std::abs(a_ - 2.0) + 4.0 * std::abs(a_ - 1.0)) / h2;
    }
    case Form::inf_lap:
    case Form::inf_lap_h:
      return 4.0 / h2;  // the relaxation drives the normalized residual
    case Form::mean_curv:
      return 6.0 / h2;
    case Form::capillary:
      return (4.0 + 2.0 * gmax2) / h2 + std::abs(a_) * std::pow(1.0 + gmax2, 1.5) + 1.0;
    case Form::counterex:
      return 4.0 / h2;
    case Form::generic:
      return 16.0 * (1.0 + gmax2 + smax) / h2;
  }
  return 16.0 / h2;
}

Scheme Scheme::reflected(const Grid2D& g) const {
  Scheme r(reflect(kernel_), g);
  r.form_ = form_;
  r.a_ = a_;
  r.b_ = b_;
  r.monotone_ = monotone_;
  r.reflected_sign_ = !reflected_sign_;
  switch (form_) {
    case Form::pucci_plus: r.form_ = Form::pucci_minus; break;
    case Form::pucci_minus: r.form_ = Form::pucci_plus; break;
    case Form::orig_plus: r.form_ = Form::orig_minus; break;
    case Form::orig_minus: r.form_ = Form::orig_plus; break;
    default: break;  // the remaining structural forms are odd, hence self-mirrored
  }
  return r;
}

bool Scheme::axis_forcing_certificate(const Grid2D& g, const std::vector<double>& u, int i, int j,
                                      double res_tol) const {
  const NodeStencil st{&g, &u, i, j};
  const double tol = 10.0 * res_tol + 1e-12;
  double c_tr = 1.0;
  switch (form_) {
    case Form::trace: c_tr = 1.0; break;
    case Form::pucci_plus:
    case Form::pucci_minus: c_tr = a_; break;
    case Form::orig_plus:
    case Form::orig_minus: c_tr = a_; break;
    case Form::game: c_tr = std::min(1.0, a_ - 1.0); break;
    case Form::p_lap: c_tr = std::min(1.0, a_ - 1.0); break;  // fallback form at a max node
    case Form::mean_curv: c_tr = 1.0; break;
    case Form::capillary: c_tr = 1.0; break;
    case Form::inf_lap:
    case Form::inf_lap_h: {
      double mn, mx;
      st.extremes(&mn, &mx);
      return -mx <= tol;
    }
    case Form::counterex:
    case Form::generic:
      return false;
  }
  const double tr = st.second_axis_x() + st.second_axis_y();
  return -tr <= tol / c_tr;
}

// ---------------------------------------------------------------------------

SolveResult solve_dirichlet(const Scheme& scheme, const Grid2D& g, const DiscreteField& data,
                            const SolveOptions& opts) {
  if (static_cast<long>(data.values.size()) != g.node_count())
    throw std::invalid_argument("solve_dirichlet: field size does not match the grid");
  SolveResult out;
  out.u.values = data.values;
  auto& u = out.u.values;
  double tau =
      opts.damping > 0.0 ? opts.damping : 0.9 / scheme.coefficient_bound(g, u);
  double sup = std::numeric_limits<double>::infinity();
  for (long sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
    for (int color = 0; color < 2; ++color)
      for (int j = 0; j < g.size; ++j)
        for (int i = 0; i < g.size; ++i) {
          if (!g.is_interior(i, j) || ((i + j) & 1) != color) continue;
          u[static_cast<std::size_t>(g.index(i, j))] -=
              tau * scheme.update_residual_at(g, u, i, j);
        }
    out.sweeps = sweep;
    if (sweep % 16 == 0 || sweep == opts.max_sweeps) {
      sup = 0.0;
      for (int j = 0; j < g.size; ++j)
        for (int i = 0; i < g.size; ++i) {
          if (!g.is_interior(i, j)) continue;
          sup = std::max(sup, std::abs(scheme.residual_at(g, u, i, j, nullptr)));
        }
      if (sup <= opts.tol) {
        out.converged = true;
        break;
      }
      if (sweep % 64 == 0) tau = opts.damping > 0.0 ? opts.damping
                                                    : 0.9 / scheme.coefficient_bound(g, u);
    }
  }
  out.residual_sup = sup;
  const Residuals res = scheme.residuals(g, out.u);
  for (long n = 0; n < g.node_count(); ++n)
    if (res.flagged[static_cast<std::size_t>(n)]) out.flagged_nodes.push_back(n);
  return out;
}

PropagationResult smp_propagation_test(const Scheme& scheme, const Grid2D& g,
                                       const DiscreteField& u, const PropagationOptions& opts) {
  PropagationResult out;
  out.interior_nodes = g.interior_count();
  // subsolution precondition
  out.worst_residual = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < g.size; ++j)
    for (int i = 0; i < g.size; ++i) {
      if (!g.is_interior(i, j)) continue;
      const double r = scheme.residual_at(g, u.values, i, j, nullptr);
      if (r > out.worst_residual) {
        out.worst_residual = r;
        out.worst_node = g.index(i, j);
      }
    }
  out.is_subsolution = out.worst_residual <= opts.res_tol;
  if (!out.is_subsolution) return out;

  double M = -std::numeric_limits<double>::infinity();
  long argmax = -1;
  for (int j = 0; j < g.size; ++j)
    for (int i = 0; i < g.size; ++i) {
      if (!g.is_interior(i, j)) continue;
      const double val = u.values[static_cast<std::size_t>(g.index(i, j))];
      if (val > M) {
        M = val;
        argmax = g.index(i, j);
      }
    }
  out.max_value = M;
  out.hypothesis_met = M >= -opts.eq_tol;
  if (!out.hypothesis_met) return out;

  // propagate the max-set through the stencil from the argmax node
  std::vector<std::uint8_t> in_set(static_cast<std::size_t>(g.node_count()), 0);
  std::vector<std::uint8_t> visited(static_cast<std::size_t>(g.node_count()), 0);
  for (long n = 0; n < g.node_count(); ++n)
    if (g.interior[static_cast<std::size_t>(n)] &&
        u.values[static_cast<std::size_t>(n)] >= M - opts.eq_tol)
      in_set[static_cast<std::size_t>(n)] = 1;
  std::deque<long> frontier{argmax};
  visited[static_cast<std::size_t>(argmax)] = 1;
  out.fronts.push_back({argmax});
  out.covered = 1;
  while (!frontier.empty()) {
    std::vector<long> next;
    for (long node : frontier) {
      const int i = static_cast<int>(node % g.size);
      const int j = static_cast<int>(node / g.size);
      if (scheme.axis_forcing_certificate(g, u.values, i, j, opts.res_tol))
        ++out.certified_front_nodes;
      for (const auto& d : stencil16())
        for (int sgn : {1, -1}) {
          const int ni = i + sgn * d.a, nj = j + sgn * d.b;
          if (!g.in_bounds(ni, nj)) continue;
          const long nn = g.index(ni, nj);
          if (visited[static_cast<std::size_t>(nn)] || !in_set[static_cast<std::size_t>(nn)])
            continue;
          visited[static_cast<std::size_t>(nn)] = 1;
          next.push_back(nn);
        }
    }
    if (next.empty()) break;
    std::sort(next.begin(), next.end());
    out.covered += static_cast<long>(next.size());
    out.fronts.push_back(std::move(next));
    frontier.assign(out.fronts.back().begin(), out.fronts.back().end());
  }
  out.constant = out.covered == out.interior_nodes;
  return out;
}

PropagationResult smp_minimum_test(const Scheme& scheme, const Grid2D& g, const DiscreteField& v,
                                   const PropagationOptions& opts) {
  DiscreteField neg;
  neg.values.resize(v.values.size());
  for (std::size_t i = 0; i < v.values.size(); ++i) neg.values[i] = -v.values[i];
  return smp_propagation_test(scheme.reflected(g), g, neg, opts);
}

PropertyReport counterexample_subsolution_check(int n, std::uint64_t seed) {
  PropertyReport rep;
  rep.id = "counterexample-subsolution";
  rep.sampling = "seed=" + std::to_string(seed);
  const OperatorKernel k = make_kernel("counterexample", n);
  EvalContext at_x0;
  at_x0.node = k.special_node;
  EvalContext away;
  double min_margin = std::numeric_limits<double>::infinity();
  const double traces[] = {0.0, 1.0, -1.0, 1e3, -1e3, 1e6, -1e6};
  for (double t : traces) {
    SymMat Q(n);
    for (int i = 0; i < n; ++i) Q.set(i, i, t / n);
    Vec q(static_cast<std::size_t>(n), 0.0);
    q[0] = 1.0;
    const double val = k.fn(at_x0, 1.0, q, Q);
    min_margin = std::min(min_margin, -val);
  }
  for (int i = 0; i < 200; ++i) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(i));
    const SymMat Q = random_sym(n, rng).scaled(std::pow(10.0, rng.uniform(-2.0, 6.0)));
    const Vec q = random_grad(n, rng);
    const double val = k.fn(at_x0, 1.0, q, Q);
    min_margin = std::min(min_margin, -val);
  }
  {
    // away from x0, the zero function: F(x, 0, 0, 0) = 0 <= 0
    const double val = k.fn(away, 0.0, Vec(static_cast<std::size_t>(n), 0.0), SymMat(n));
    min_margin = std::min(min_margin, -val);
  }
  rep.min_margin = min_margin;
  rep.verdict = min_margin >= 0.0 ? Verdict::pass : Verdict::fail;
  rep.note = "spike at the marked node is a subsolution; its interior max does not propagate";
  return rep;
}

ComparisonResult strong_comparison_test(const Scheme& scheme, const Grid2D& g,
                                        const DiscreteField& u, const DiscreteField& v,
                                        const PropagationOptions& opts) {
  ComparisonResult out;
  double max_gap = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < g.size; ++j)
    for (int i = 0; i < g.size; ++i) {
      const long n = g.index(i, j);
      const double gap = u.values[static_cast<std::size_t>(n)] -
                         v.values[static_cast<std::size_t>(n)];
      if (g.is_interior(i, j)) max_gap = std::max(max_gap, gap);
      if (gap > 1e-12 * std::max(1.0, std::abs(u.values[static_cast<std::size_t>(n)]))) {
        out.verdict = ComparisonVerdict::order_violated;
        out.max_gap = gap;
        return out;
      }
    }
  out.max_gap = max_gap;
  // u must be a subsolution and v a (sampled) supersolution
  for (int j = 0; j < g.size; ++j)
    for (int i = 0; i < g.size; ++i) {
      if (!g.is_interior(i, j)) continue;
      if (scheme.residual_at(g, u.values, i, j, nullptr) > opts.res_tol ||
          scheme.residual_at(g, v.values, i, j, nullptr) < -opts.res_tol) {
        out.verdict = ComparisonVerdict::not_subsolution;
        return out;
      }
    }
  DiscreteField w;
  w.values.resize(u.values.size());
  for (std::size_t i = 0; i < u.values.size(); ++i) w.values[i] = u.values[i] - v.values[i];
  if (max_gap < -opts.eq_tol) {
    // the nonnegative-maximum hypothesis is not triggered: strict separation
    out.verdict = ComparisonVerdict::strict_separation;
    return out;
  }
  out.propagation = smp_propagation_test(scheme, g, w, opts);
  if (!out.propagation.is_subsolution) {
    out.verdict = ComparisonVerdict::not_subsolution;
    return out;
  }
  out.verdict = out.propagation.constant ? ComparisonVerdict::identity
                                         : ComparisonVerdict::strict_separation;
  return out;
}

PropertyReport linearized_domination_check(const OperatorKernel& k, int n, int samples,
                                           std::uint64_t seed) {
  if (!k.ellipticity || !k.lipschitz_sq)
    throw std::invalid_argument(
        "linearized_domination_check: kernel lacks declared (lambda, Lambda) or C");
  const double lambda = k.ellipticity->lambda;
  const double Lambda = k.ellipticity->Lambda;
  const double C = *k.lipschitz_sq;
  PropertyReport rep;
  rep.id = "linearized-domination/" + k.id;
  rep.sampling = "seed=" + std::to_string(seed) + " samples=" + std::to_string(samples);
  const EvalContext ctx = no_context();
  double min_margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(i));
    // base jet t and difference jet w; i == 0 exercises the zero difference
    const double st = rng.uniform(-1.0, 1.0);
    const Vec qt = random_grad(n, rng);
    const SymMat Qt = random_sym(n, rng);
    double sw = 0.0;
    Vec qw(static_cast<std::size_t>(n), 0.0);
    SymMat Qw(n);
    if (i > 0) {
      const int mode = rng.uniform_int(0, 2);
      Qw = random_sym(n, rng);
      if (mode > 0) {
        sw = rng.uniform(-1.0, 1.0);
        qw = random_grad(n, rng);
      }
    }
    const double lhs = k.fn(ctx, st - sw, qt - qw, Qt - Qw) - k.fn(ctx, st, qt, Qt);
    const double gq = std::abs(sw) + norm(qw);
    const double G =
        pucci_plus_value(lambda, Lambda, sym_eigenvalues(Qw), Qw.frobenius()) + C * gq;
    const double scale = std::max({1.0, std::abs(lhs), std::abs(G)});
    const double margin = (lhs + G) / scale + 1e-9;
    if (margin < min_margin) min_margin = margin;
    if (margin < 0.0 && rep.witnesses.size() < 4)
      rep.witnesses.push_back({"sample " + std::to_string(i), margin});
  }
  rep.min_margin = min_margin;
  rep.verdict = min_margin >= 0.0 ? Verdict::pass : Verdict::fail;
  return rep;
}

void write_field_csv(std::ostream& os, const Grid2D& g, const DiscreteField& u) {
  os << "node,i,j,x,y,value\n";
  for (int j = 0; j < g.size; ++j)
    for (int i = 0; i < g.size; ++i) {
      const long n = g.index(i, j);
      os << n << "," << i << "," << j << "," << format_double(g.cx(i)) << ","
         << format_double(g.cy(j)) << "," << format_double(u.values[static_cast<std::size_t>(n)])
         << "\n";
    }
}

}  // namespace curvops
