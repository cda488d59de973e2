#include "curvops/jets.hpp"

#include <stdexcept>

namespace curvops {

Jet2 frame_coords(const ManifoldModel& m, const Frame& e, double s, const TangentRep& q,
                  const BilinearEval& Q) {
  validate_frame(m, e);
  Vec qc(static_cast<std::size_t>(m.n));
  for (int i = 0; i < m.n; ++i)
    qc[static_cast<std::size_t>(i)] = ambient_dot(m, q.vec, e.vectors[i]);
  SymForm Qc(m.n);
  for (int i = 0; i < m.n; ++i)
    for (int j = 0; j <= i; ++j) {
      const TangentRep ei{e.base, e.vectors[static_cast<std::size_t>(i)]};
      const TangentRep ej{e.base, e.vectors[static_cast<std::size_t>(j)]};
      Qc.set(i, j, 0.5 * (Q(ei, ej) + Q(ej, ei)));
    }
  return make_jet(s, std::move(qc), std::move(Qc));
}

Jet2 jet_pullback(const ManifoldModel& m, const PointRep& x, const PointRep& y,
                  const Jet2& jet_at_y, const Frame& ex, const Frame& ey) {
  // M[k][i] = g(ey_k, L ex_i); orthogonal since transport is an isometry.
  std::vector<double> M(static_cast<std::size_t>(m.n) * m.n);
  for (int i = 0; i < m.n; ++i) {
    const TangentRep moved =
        parallel_transport(m, x, y, TangentRep{x, ex.vectors[static_cast<std::size_t>(i)]});
    for (int k = 0; k < m.n; ++k)
      M[static_cast<std::size_t>(k) * m.n + i] =
          ambient_dot(m, ey.vectors[static_cast<std::size_t>(k)], moved.vec);
  }
  // (L*q)_i = sum_k q_k M[k][i];  (L*Q)_ij = (M^T Q M)_ij
  Vec q(static_cast<std::size_t>(m.n), 0.0);
  for (int i = 0; i < m.n; ++i)
    for (int k = 0; k < m.n; ++k)
      q[static_cast<std::size_t>(i)] +=
          jet_at_y.q[static_cast<std::size_t>(k)] * M[static_cast<std::size_t>(k) * m.n + i];
  SymForm Q = jet_at_y.Q.conjugated(M);
  Jet2 out = make_jet(jet_at_y.s, std::move(q), std::move(Q));
  out.gradient_is_zero = jet_at_y.gradient_is_zero;
  return out;
}

Jet2 jet_of_dsq(const ManifoldModel& m, const PointRep& x0, const PointRep& x, const Frame& e) {
  const double d = distance(m, x0, x);
  if (d < 1e-10) throw std::domain_error("jet_of_dsq: regularity requires x != x0");
  const DsqValueGrad vg = dsq_value_grad(m, x0, x);
  Vec q(static_cast<std::size_t>(m.n));
  for (int i = 0; i < m.n; ++i)
    q[static_cast<std::size_t>(i)] =
        ambient_dot(m, vg.grad.vec, e.vectors[static_cast<std::size_t>(i)]);
  return make_jet(vg.value, std::move(q), dsq_hessian(m, x0, x, e));
}

}  // namespace curvops
