#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "curvops/geometry.hpp"

// Test-only oracles, independent of the closed forms they validate: geodesics
// and parallel transport by RK4 on the ambient ODEs, derivatives of the
// distance-squared function by finite differences along geodesics.

namespace curvops::testing {

struct OdeState {
  Vec pos;
  Vec vel;
};

inline OdeState geodesic_rhs(const ManifoldModel& m, const OdeState& s) {
  // gamma'' = -kappa <gamma', gamma'> gamma in both ambient models
  const double speed2 = ambient_dot(m, s.vel, s.vel);
  return OdeState{s.vel, (-m.kappa * speed2) * s.pos};
}

/// RK4 integration of the geodesic ODE from x with initial velocity v over
/// t in [0, 1]; also returns the numerically accumulated arclength.
inline std::pair<PointRep, double> integrate_geodesic(const ManifoldModel& m, const PointRep& x,
                                                      const Vec& v, int steps = 2000) {
  OdeState s{x.coords, v};
  const double dt = 1.0 / steps;
  double arclen = 0.0;
  for (int i = 0; i < steps; ++i) {
    arclen += dt * std::sqrt(std::max(0.0, ambient_dot(m, s.vel, s.vel)));
    const OdeState k1 = geodesic_rhs(m, s);
    const OdeState s2{s.pos + (0.5 * dt) * k1.pos, s.vel + (0.5 * dt) * k1.vel};
    const OdeState k2 = geodesic_rhs(m, s2);
    const OdeState s3{s.pos + (0.5 * dt) * k2.pos, s.vel + (0.5 * dt) * k2.vel};
    const OdeState k3 = geodesic_rhs(m, s3);
    const OdeState s4{s.pos + dt * k3.pos, s.vel + dt * k3.vel};
    const OdeState k4 = geodesic_rhs(m, s4);
    s.pos = s.pos + (dt / 6.0) * (k1.pos + 2.0 * k2.pos + 2.0 * k3.pos + k4.pos);
    s.vel = s.vel + (dt / 6.0) * (k1.vel + 2.0 * k2.vel + 2.0 * k3.vel + k4.vel);
  }
  return {PointRep{s.pos}, arclen};
}

/// RK4 on the joint system (geodesic, transported vector): the transport ODE
/// is w' = -kappa <w, gamma'> gamma.
inline Vec integrate_transport(const ManifoldModel& m, const PointRep& x, const Vec& v,
                               const Vec& w0, int steps = 2000) {
  OdeState s{x.coords, v};
  Vec w = w0;
  const double dt = 1.0 / steps;
  const auto wdot = [&](const OdeState& st, const Vec& ww) {
    return (-m.kappa * ambient_dot(m, ww, st.vel)) * st.pos;
  };
  for (int i = 0; i < steps; ++i) {
    const OdeState k1 = geodesic_rhs(m, s);
    const Vec l1 = wdot(s, w);
    const OdeState s2{s.pos + (0.5 * dt) * k1.pos, s.vel + (0.5 * dt) * k1.vel};
    const Vec w2 = w + (0.5 * dt) * l1;
    const OdeState k2 = geodesic_rhs(m, s2);
    const Vec l2 = wdot(s2, w2);
    const OdeState s3{s.pos + (0.5 * dt) * k2.pos, s.vel + (0.5 * dt) * k2.vel};
    const Vec w3 = w + (0.5 * dt) * l2;
    const OdeState k3 = geodesic_rhs(m, s3);
    const Vec l3 = wdot(s3, w3);
    const OdeState s4{s.pos + dt * k3.pos, s.vel + dt * k3.vel};
    const Vec w4 = w + dt * l3;
    const OdeState k4 = geodesic_rhs(m, s4);
    const Vec l4 = wdot(s4, w4);
    s.pos = s.pos + (dt / 6.0) * (k1.pos + 2.0 * k2.pos + 2.0 * k3.pos + k4.pos);
    s.vel = s.vel + (dt / 6.0) * (k1.vel + 2.0 * k2.vel + 2.0 * k3.vel + k4.vel);
    w = w + (dt / 6.0) * (l1 + 2.0 * l2 + 2.0 * l3 + l4);
  }
  return w;
}

inline double dsq_at(const ManifoldModel& m, const PointRep& x0, const PointRep& x) {
  const double d = distance(m, x0, x);
  return 0.5 * d * d;
}

/// Central difference of f_{x0} along the geodesic through x in direction w.
inline double fd_dsq_gradient(const ManifoldModel& m, const PointRep& x0, const PointRep& x,
                              const TangentRep& w, double t = 1e-4) {
  const PointRep plus = exp_map(m, x, TangentRep{x, t * w.vec});
  const PointRep minus = exp_map(m, x, TangentRep{x, -t * w.vec});
  return (dsq_at(m, x0, plus) - dsq_at(m, x0, minus)) / (2.0 * t);
}

/// Second difference along the geodesic: approximates D^2 f_{x0}(w, w).
inline double fd_dsq_hessian_diag(const ManifoldModel& m, const PointRep& x0, const PointRep& x,
                                  const TangentRep& w, double t = 1e-3) {
  const PointRep plus = exp_map(m, x, TangentRep{x, t * w.vec});
  const PointRep minus = exp_map(m, x, TangentRep{x, -t * w.vec});
  return (dsq_at(m, x0, plus) - 2.0 * dsq_at(m, x0, x) + dsq_at(m, x0, minus)) / (t * t);
}

/// Full Hessian entry by polarization of the diagonal second differences.
inline double fd_dsq_hessian(const ManifoldModel& m, const PointRep& x0, const PointRep& x,
                             const TangentRep& wi, const TangentRep& wj, double t = 1e-3) {
  const TangentRep sum{x, wi.vec + wj.vec};
  const TangentRep dif{x, wi.vec - wj.vec};
  return 0.25 * (fd_dsq_hessian_diag(m, x0, x, sum, t) - fd_dsq_hessian_diag(m, x0, x, dif, t));
}

}  // namespace curvops::testing
