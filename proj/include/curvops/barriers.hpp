#pragma once

#include "curvops/operators.hpp"
#include "curvops/properties.hpp"

namespace curvops {

/// Exponential barrier for the annulus argument:
///   h(x) = -exp(-alpha f_{y0}(x)) + exp(-alpha r0^2 / 2),
/// vanishing on the geodesic sphere S(y0, r0), negative inside, with
/// c = alpha exp(-alpha r0^2 / 2).
struct BarrierSpec {
  PointRep y0;
  double r0 = 0.5;
  double alpha = 1.0;

  double c() const { return alpha * std::exp(-alpha * r0 * r0 / 2.0); }
};

double barrier_value(const BarrierSpec& spec, const ManifoldModel& m, const PointRep& x);

/// Closed-form jet of the barrier at x in the given frame:
/// Dh = a E Df,  D2h = a E (D2f - alpha Df (x) Df), a E = alpha exp(-alpha f).
Jet2 barrier_jet(const BarrierSpec& spec, const ManifoldModel& m, const PointRep& x,
                 const Frame& frame);

struct CertifyOptions {
  std::uint64_t seed = 20240808;
  int radii = 8;
  int directions = 32;
  double alpha_max = 1099511627776.0;  // 2^40
  double pos_tol = 1e-9;
  int epsilon_grid = 9;  // eps in {0.1, ..., 0.9}
  double r = -1.0;       // annulus width; default min(r0, R(y0)-r0)/2
};

struct Certification {
  bool found = false;
  double alpha = 0.0;   // least sampled alpha certifying strictness
  double margin = 0.0;  // min F[h] over annulus samples at that alpha
  double c = 0.0;
  double r = 0.0;       // the inner-ball radius used for the annulus U
  // the proof's constant: alpha pushed further until c = a exp(-a r0^2/2)
  // drops below one while the margin stays positive
  double alpha_unit_c = 0.0;
  double c_unit = 0.0;
  double margin_unit_c = 0.0;
  PointRep x0;          // touching point on S(y0, r0)
  std::vector<PointRep> samples;
  std::vector<double> epsilon_margins;  // min F[eps h] per epsilon grid point
  PropertyReport report;
};

/// Search the least alpha such that F[h] >= margin > 0 on the sampled annulus
/// U = B(x0, r) & B(y0, r0), and certify eps h stays strict on the eps grid.
Certification certify_strict_supersolution(const OperatorKernel& k, const ManifoldModel& m,
                                           const PointRep& y0, double r0,
                                           const CertifyOptions& opts = {});

/// Closed-form requirement for the Laplace-Beltrami barrier on a flat
/// annulus: alpha * d^2 > n on every sample, so alpha* = n / d_min^2.
double lb_flat_alpha_requirement(int n, double d_min);

/// The Hopf bound eps * c * g(grad f_y(x0), dir) for an inward approach
/// direction at x0 in S(y, r); rejects directions with nonpositive radial
/// component.
double hopf_lower_bound(const OperatorKernel& k, const ManifoldModel& m, const PointRep& y,
                        double r, const PointRep& x0, const Certification& cert, double epsilon,
                        const TangentRep& direction);

/// Largest eps in (0,1) with u - u(x0) <= eps h on the boundary of
/// U = B(x0, r_tilde) & B(y, r), for a supplied function u; this is the
/// comparison constant the Hopf argument needs.
double hopf_epsilon_for(const std::function<double(const PointRep&)>& u, double u_x0,
                        const BarrierSpec& spec, const ManifoldModel& m, const PointRep& x0,
                        double r_tilde, int boundary_samples = 256);

}  // namespace curvops
