#pragma once

#include <functional>

#include "curvops/geometry.hpp"

namespace curvops {

/// A point's 2-jet (s, q, Q) in the coordinates of an orthonormal frame.
/// q = 0 carries an explicit flag; operations restricted to the subbundle
/// of jets with nonzero gradient check it.
struct Jet2 {
  double s = 0.0;
  Vec q;
  SymForm Q;
  bool gradient_is_zero = false;

  bool nonsingular() const { return !gradient_is_zero && norm(q) > 0.0; }
};

inline Jet2 make_jet(double s, Vec q, SymForm Q) {
  Jet2 j{s, std::move(q), std::move(Q), false};
  j.gradient_is_zero = norm(j.q) == 0.0;
  return j;
}

inline Jet2 scaled_jet(const Jet2& j, double c) {
  return Jet2{c * j.s, c * j.q, j.Q.scaled(c), j.gradient_is_zero};
}

using BilinearEval = std::function<double(const TangentRep&, const TangentRep&)>;

/// Frame coordinates of an abstract jet: q_i = q(e_i), Q_ij = Q(e_i, e_j).
Jet2 frame_coords(const ManifoldModel& m, const Frame& e, double s, const TangentRep& q,
                  const BilinearEval& Q);

/// Pull a jet at y (in frame ey) back to x (in frame ex) through parallel
/// transport: (s, L*q, L*Q). Preserves |q| and the eigenvalues of Q.
Jet2 jet_pullback(const ManifoldModel& m, const PointRep& x, const PointRep& y,
                  const Jet2& jet_at_y, const Frame& ex, const Frame& ey);

/// Jet of f_{x0} at x in the given frame: s = d^2/2, |q| = d, Q = D^2 f.
Jet2 jet_of_dsq(const ManifoldModel& m, const PointRep& x0, const PointRep& x, const Frame& e);

}  // namespace curvops
