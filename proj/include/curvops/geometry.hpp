#pragma once

#include <limits>
#include <string>
#include <vector>

#include "curvops/linalg.hpp"

namespace curvops {

/// Constant-curvature model manifold of dimension n and sectional curvature
/// kappa. Points live in an ambient space: R^n for kappa = 0, the sphere of
/// radius 1/sqrt(kappa) in R^{n+1} for kappa > 0, and the upper hyperboloid
/// sheet <x,x> = -1/|kappa| in Minkowski R^{n,1} for kappa < 0.
struct ManifoldModel {
  int n = 2;
  double kappa = 0.0;

  int ambient_dim() const { return kappa == 0.0 ? n : n + 1; }
  double radius() const { return 1.0 / std::sqrt(std::abs(kappa)); }
};

struct PointRep {
  Vec coords;
};

struct TangentRep {
  PointRep base;
  Vec vec;
};

/// Orthonormal frame at a point: n ambient vectors, pairwise g-orthonormal.
struct Frame {
  PointRep base;
  std::vector<Vec> vectors;
};

using SymForm = SymMat;

inline double infinite_radius() { return std::numeric_limits<double>::infinity(); }

/// Ambient bilinear form: Euclidean for kappa >= 0, Minkowski for kappa < 0.
double ambient_dot(const ManifoldModel& m, const Vec& a, const Vec& b);

/// Riemannian inner product of tangent vectors at a common base point.
double metric_dot(const ManifoldModel& m, const TangentRep& u, const TangentRep& v);
double metric_norm(const ManifoldModel& m, const TangentRep& v);

/// Canonical origin: (0,...,0) flat, first-axis pole otherwise.
PointRep base_point(const ManifoldModel& m);

void validate_point(const ManifoldModel& m, const PointRep& p, double tol = 1e-12);
void validate_tangent(const ManifoldModel& m, const TangentRep& v, double tol = 1e-12);
void validate_frame(const ManifoldModel& m, const Frame& e, double tol = 1e-10);

double distance(const ManifoldModel& m, const PointRep& x, const PointRep& y);
PointRep exp_map(const ManifoldModel& m, const PointRep& x, const TangentRep& v);
TangentRep log_map(const ManifoldModel& m, const PointRep& x, const PointRep& y);

/// Parallel transport along the unique minimizing geodesic from x to y.
TangentRep parallel_transport(const ManifoldModel& m, const PointRep& x, const PointRep& y,
                              const TangentRep& v);

double injectivity_radius(const ManifoldModel& m, const PointRep& x);
double convexity_radius(const ManifoldModel& m, const PointRep& x);

/// Tangential eigenvalue of D^2 f_{x0} at distance d: sqrt(k) d cot(sqrt(k) d)
/// for k > 0, 1 for k = 0, sqrt(|k|) d coth(sqrt(|k|) d) for k < 0.
double dsq_tangential_eigenvalue(double kappa, double d);

struct DsqValueGrad {
  double value;       // d(x,x0)^2 / 2
  TangentRep grad;    // based at x, norm = d, radially outward from x0
};
DsqValueGrad dsq_value_grad(const ManifoldModel& m, const PointRep& x0, const PointRep& x);

/// Hessian of f_{x0} at x expressed in the caller's orthonormal frame.
/// Refuses d < 1e-8 (degenerate radial direction); callers needing the limit
/// use the identity matrix explicitly.
SymForm dsq_hessian(const ManifoldModel& m, const PointRep& x0, const PointRep& x,
                    const Frame& frame);

/// Orthonormal frame at x whose first vector is the unit radial direction
/// away from x0; completed by Gram-Schmidt over the ambient axes in order.
Frame radial_frame(const ManifoldModel& m, const PointRep& x0, const PointRep& x);

/// Any orthonormal frame at x (radial_frame from the model origin when
/// distinct, otherwise Gram-Schmidt over ambient axes).
Frame some_frame(const ManifoldModel& m, const PointRep& x);

/// Project an ambient vector onto the tangent space at x.
TangentRep project_tangent(const ManifoldModel& m, const PointRep& x, const Vec& ambient);

/// Tangent vector at x with the given coordinates in the given frame.
TangentRep from_frame_coords(const ManifoldModel& m, const Frame& e, const Vec& coords);

PointRep random_point(const ManifoldModel& m, Rng& rng, double max_dist = 1.5);
TangentRep random_tangent(const ManifoldModel& m, const PointRep& x, Rng& rng,
                          double max_norm = 1.0);

}  // namespace curvops
