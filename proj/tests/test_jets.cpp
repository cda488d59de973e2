#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "curvops/jets.hpp"
#include "curvops/operators.hpp"

using namespace curvops;

namespace {

Frame rotated_frame(const ManifoldModel& m, const Frame& e, const std::vector<double>& rot) {
  Frame out{e.base, {}};
  for (int i = 0; i < m.n; ++i) {
    Vec v(e.base.coords.size(), 0.0);
    for (int j = 0; j < m.n; ++j)
      for (std::size_t a = 0; a < v.size(); ++a)
        v[a] += rot[static_cast<std::size_t>(i) * m.n + j] * e.vectors[static_cast<std::size_t>(j)][a];
    out.vectors.push_back(v);
  }
  return out;
}

}  // namespace

TEST_CASE("frame coordinates of metric-dual vectors and the metric itself") {
  const ManifoldModel m{3, 1.0};
  Rng rng(11);
  const PointRep x = random_point(m, rng, 1.0);
  const Frame e = some_frame(m, x);
  // q = (e1)^flat has coordinates (1, 0, 0)
  const TangentRep q{x, e.vectors[0]};
  const auto metric = [&](const TangentRep& a, const TangentRep& b) { return metric_dot(m, a, b); };
  const Jet2 j = frame_coords(m, e, 0.7, q, metric);
  CHECK(j.s == 0.7);
  CHECK(j.q[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(j.q[1]) < 1e-12);
  CHECK(std::abs(j.q[2]) < 1e-12);
  // Q = g is the identity in any orthonormal frame
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) CHECK(j.Q(i, k) == doctest::Approx(i == k ? 1.0 : 0.0));
}

TEST_CASE("frame covariance: coordinates conjugate by the frame change") {
  for (double kappa : {-1.0, 0.0, 1.0}) {
    const ManifoldModel m{3, kappa};
    Rng rng(23 + static_cast<int>(kappa));
    const PointRep x = random_point(m, rng, 0.8);
    const Frame e = some_frame(m, x);
    const TangentRep q = random_tangent(m, x, rng, 2.0);
    const SymMat B = random_sym(3, rng);  // abstract bilinear form via frame e
    const auto bilinear = [&](const TangentRep& a, const TangentRep& b) {
      Vec ca(3), cb(3);
      for (int i = 0; i < 3; ++i) {
        ca[i] = ambient_dot(m, a.vec, e.vectors[static_cast<std::size_t>(i)]);
        cb[i] = ambient_dot(m, b.vec, e.vectors[static_cast<std::size_t>(i)]);
      }
      double s = 0.0;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) s += ca[i] * B(i, j) * cb[j];
      return s;
    };
    const Jet2 j0 = frame_coords(m, e, 0.0, q, bilinear);
    for (int trial = 0; trial < 20; ++trial) {
      const auto rot = random_rotation(3, rng);
      const Frame e2 = rotated_frame(m, e, rot);
      const Jet2 j1 = frame_coords(m, e2, 0.0, q, bilinear);
      // e2_i = sum_j rot[i][j] e_j, so coordinates transform by rot as well
      const Vec want_q = mat_apply(rot, j0.q);
      CHECK(norm(j1.q - want_q) < 1e-12 * std::max(1.0, norm(j0.q)));
      const SymMat want_Q = rotate_sym(rot, j0.Q);
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b <= a; ++b)
          CHECK(std::abs(j1.Q(a, b) - want_Q(a, b)) < 1e-12 * std::max(1.0, j0.Q.frobenius()));
    }
  }
}

TEST_CASE("frame_coords rejects a non-orthonormal frame") {
  const ManifoldModel m{2, 0.0};
  const PointRep x{{0.0, 0.0}};
  Frame bad{x, {{1.0, 0.0}, {1.0, 1.0}}};
  const auto metric = [&](const TangentRep& a, const TangentRep& b) { return metric_dot(m, a, b); };
  CHECK_THROWS_AS((void)frame_coords(m, bad, 0.0, TangentRep{x, {1.0, 0.0}}, metric),
                  std::invalid_argument);
}

TEST_CASE("jet pullback: flat identity with axis frames") {
  const ManifoldModel m{2, 0.0};
  const PointRep x{{0.0, 0.0}}, y{{1.0, 0.5}};
  const Frame ex = some_frame(m, x), ey = some_frame(m, y);
  Rng rng(5);
  const Jet2 j = make_jet(0.3, {0.4, -1.1}, random_sym(2, rng));
  const Jet2 pulled = jet_pullback(m, x, y, j, ex, ey);
  CHECK(norm(pulled.q - j.q) < 1e-14);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) CHECK(std::abs(pulled.Q(a, b) - j.Q(a, b)) < 1e-14);
}

TEST_CASE("jet pullback preserves the zero-gradient flag and zero jet") {
  const ManifoldModel m{2, 1.0};
  Rng rng(9);
  const PointRep x = random_point(m, rng, 0.5);
  const PointRep y = random_point(m, rng, 0.5);
  const Jet2 zero = make_jet(0.25, {0.0, 0.0}, SymMat(2));
  CHECK(zero.gradient_is_zero);
  const Jet2 pulled = jet_pullback(m, x, y, zero, some_frame(m, x), some_frame(m, y));
  CHECK(pulled.gradient_is_zero);
  CHECK(pulled.s == 0.25);
  CHECK(norm(pulled.q) < 1e-14);
  CHECK(pulled.Q.frobenius() < 1e-14);
}

TEST_CASE("jet pullback preserves |q| and the spectrum of Q") {
  for (double kappa : {-1.0, 1.0}) {
    const ManifoldModel m{3, kappa};
    Rng rng(31 + static_cast<int>(kappa));
    for (int trial = 0; trial < 10; ++trial) {
      const PointRep x = random_point(m, rng, 0.6);
      const PointRep y = exp_map(m, x, random_tangent(m, x, rng, 0.8));
      Vec q(3);
      for (auto& c : q) c = rng.normal();
      const Jet2 j = make_jet(rng.uniform(-1.0, 1.0), q, random_sym(3, rng));
      const Jet2 pulled = jet_pullback(m, x, y, j, some_frame(m, x), some_frame(m, y));
      CHECK(std::abs(norm(pulled.q) - norm(j.q)) < 1e-10);
      Vec s0 = sym_eigenvalues(j.Q);
      Vec s1 = sym_eigenvalues(pulled.Q);
      for (int i = 0; i < 3; ++i) CHECK(std::abs(s0[i] - s1[i]) < 1e-10);
    }
  }
}

TEST_CASE("jet of the distance-squared function") {
  const ManifoldModel flat{2, 0.0};
  const PointRep x0{{0.2, -0.3}}, x{{1.0, 0.7}};
  const Frame e = some_frame(flat, x);
  const Jet2 j = jet_of_dsq(flat, x0, x, e);
  CHECK(j.s == doctest::Approx(0.5 * (0.8 * 0.8 + 1.0)));
  CHECK(norm(j.q - Vec{0.8, 1.0}) < 1e-12);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) CHECK(j.Q(a, b) == doctest::Approx(a == b ? 1.0 : 0.0));

  CHECK_THROWS_AS((void)jet_of_dsq(flat, x0, x0, some_frame(flat, x0)), std::domain_error);

  // sphere at distance pi/4: eigenvalues {1, (pi/4) cot(pi/4)}
  const ManifoldModel sph{2, 1.0};
  const PointRep c = base_point(sph);
  const Frame e0 = some_frame(sph, c);
  const double d = 3.14159265358979312 / 4.0;
  const PointRep y = exp_map(sph, c, from_frame_coords(sph, e0, {d, 0.0}));
  const Jet2 js = jet_of_dsq(sph, c, y, radial_frame(sph, c, y));
  CHECK(std::abs(norm(js.q) - d) < 1e-12);
  const Vec mu = sym_eigenvalues(js.Q);
  CHECK(mu[0] == doctest::Approx(d / std::tan(d)).epsilon(1e-12));
  CHECK(mu[1] == doctest::Approx(1.0).epsilon(1e-12));
}
