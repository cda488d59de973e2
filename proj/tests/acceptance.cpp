#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "curvops/barriers.hpp"
#include "curvops/discrete.hpp"
#include "curvops/properties.hpp"
#include "support.hpp"

using namespace curvops;
using namespace curvops::testing;

// Acceptance suite: one test case per criterion, one printed verdict line
// each. Every tolerance is pinned here, in code.

namespace {

void report_line(int criterion, bool ok, const std::string& what) {
  std::printf("[criterion %d] %s - %s\n", criterion, ok ? "PASS" : "FAIL", what.c_str());
  std::fflush(stdout);
}

constexpr std::uint64_t kSeed = 20240808;

}  // namespace

TEST_CASE("criterion 1: condition matrix reproduces the claimed verdicts") {
  const auto t0 = std::chrono::steady_clock::now();
  const auto rows = run_condition_matrix(2, 0.0, kSeed);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  int mismatches = 0;
  for (const auto& r : rows)
    if (!r.match) {
      ++mismatches;
      MESSAGE(r.kernel << " / " << r.condition << " observed " << to_string(r.observed));
    }
  const bool ok = mismatches == 0 && secs <= 60.0;
  CHECK(mismatches == 0);
  CHECK(secs <= 60.0);
  std::ostringstream os;
  os << "operator x condition table, " << rows.size() << " cells, " << mismatches
     << " mismatches, " << static_cast<int>(secs * 1000) << " ms";
  report_line(1, ok, os.str());
}

TEST_CASE("criterion 2: displayed identities and Pucci inequalities") {
  bool ok = true;
  // the three exact rank-one identities, 1e-10 relative on 1e4 samples each
  for (const char* id : {"p-laplacian:3", "inf-laplacian", "mean-curvature"}) {
    const OperatorKernel k = make_kernel(id, 3);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
      Rng rng = Rng::stream(kSeed + 1, static_cast<std::uint64_t>(i));
      Vec v = random_grad(3, rng);
      if (norm(v) < 1e-4) v = (1e-4 / norm(v)) * v;
      const Jet2 jet = make_jet(rng.uniform(-1.0, 1.0), v, random_sym(3, rng));
      const double alpha = rng.uniform(0.0, 50.0);
      const auto [lhs, rhs] = exact_rank1_identity(k, jet, alpha);
      worst = std::max(worst, std::abs(lhs - rhs) / std::max({1.0, std::abs(lhs), std::abs(rhs)}));
    }
    INFO(id << " worst " << worst);
    const bool this_ok = worst <= 1e-10;
    CHECK(this_ok);
    ok = ok && this_ok;
  }
  // pePucci inequality with margin >= -1e-9 on 1e4 samples
  {
    double worst = 1e300;
    for (int i = 0; i < 10000; ++i) {
      Rng rng = Rng::stream(kSeed + 2, static_cast<std::uint64_t>(i));
      const SymMat a = random_sym(3, rng);
      const Vec v = random_grad(3, rng);
      const double alpha = rng.uniform(0.0, 100.0);
      const auto [lhs, rhs] = pucci_rank1_inequality(1.0, 2.0, a, v, alpha);
      worst = std::min(worst, (lhs - rhs) / std::max(1.0, std::abs(rhs)));
    }
    const bool this_ok = worst >= -1e-9;
    CHECK(this_ok);
    ok = ok && this_ok;
  }
  // extremal sandwich for every uniformly elliptic catalog kernel
  for (const char* id :
       {"laplace-beltrami", "pucci+:1:2", "pucci-:1:2", "pucci-orig+:0.3", "pucci-orig-:0.3"}) {
    const PropertyReport rep = pucci_sandwich_check(make_kernel(id, 3), 3, 10000, kSeed + 3);
    INFO(id);
    CHECK(rep.passed());
    ok = ok && rep.passed();
  }
  report_line(2, ok, "rank-one identities 1e-10, pePucci margin -1e-9, extremal sandwich");
}

TEST_CASE("criterion 3: geometry oracles") {
  bool ok = true;
  for (double kappa : {-1.0, 0.0, 1.0}) {
    const ManifoldModel m{3, kappa};
    Rng rng(kSeed + 4);
    // exp/log roundtrip to 1e-10
    for (int trial = 0; trial < 100; ++trial) {
      const PointRep x = random_point(m, rng, 0.8);
      const double cap = kappa > 0.0 ? 0.9 * injectivity_radius(m, x) : 3.0;
      const TangentRep v = random_tangent(m, x, rng, std::min(3.0, cap));
      const TangentRep w = log_map(m, x, exp_map(m, x, v));
      const bool rt = norm(w.vec - v.vec) < 1e-10;
      CHECK(rt);
      ok = ok && rt;
    }
  }
  // closed-form Hessian vs the finite-difference oracle, 100 points per kappa
  for (double kappa : {-1.0, 0.0, 1.0}) {
    const ManifoldModel m{2, kappa};
    const PointRep c = base_point(m);
    Rng rng(kSeed + 5);
    for (int trial = 0; trial < 100; ++trial) {
      const double cap = kappa > 0.0 ? 0.8 * injectivity_radius(m, c) : 1.8;
      const TangentRep step = random_tangent(m, c, rng, cap);
      if (metric_norm(m, step) < 0.05) continue;
      const PointRep x = exp_map(m, c, step);
      const Frame fr = some_frame(m, x);
      const SymForm h = dsq_hessian(m, c, x, fr);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j <= i; ++j) {
          const TangentRep wi{x, fr.vectors[static_cast<std::size_t>(i)]};
          const TangentRep wj{x, fr.vectors[static_cast<std::size_t>(j)]};
          const bool fd_ok = std::abs(h(i, j) - fd_dsq_hessian(m, c, x, wi, wj)) < 1e-5;
          CHECK(fd_ok);
          ok = ok && fd_ok;
        }
    }
  }
  // Rauch: largest eigenvalue <= 1 + 1e-10 for kappa >= 0, tangential > 1 for kappa < 0
  {
    Rng rng(kSeed + 6);
    for (double kappa : {0.0, 1.0}) {
      const ManifoldModel m{3, kappa};
      const PointRep c = base_point(m);
      for (int trial = 0; trial < 50; ++trial) {
        const double cap = kappa > 0.0 ? 0.9 * injectivity_radius(m, c) : 2.0;
        const TangentRep step = random_tangent(m, c, rng, cap);
        if (metric_norm(m, step) < 0.05) continue;
        const PointRep x = exp_map(m, c, step);
        const Vec mu = sym_eigenvalues(dsq_hessian(m, c, x, radial_frame(m, c, x)));
        const bool rauch = mu.back() <= 1.0 + 1e-10;
        CHECK(rauch);
        ok = ok && rauch;
      }
    }
    const ManifoldModel m{3, -1.0};
    const PointRep c = base_point(m);
    for (int trial = 0; trial < 50; ++trial) {
      const TangentRep step = random_tangent(m, c, rng, 2.0);
      if (metric_norm(m, step) < 0.05) continue;
      const PointRep x = exp_map(m, c, step);
      const SymForm h = dsq_hessian(m, c, x, radial_frame(m, c, x));
      const bool strict = h(1, 1) > 1.0;
      CHECK(strict);
      ok = ok && strict;
    }
  }
  report_line(3, ok, "roundtrip 1e-10, Hessian vs finite differences 1e-5, Rauch bound");
}

TEST_CASE("criterion 4: barrier certification across kernels and curvatures") {
  bool ok = true;
  for (double kappa : {-1.0, 0.0, 1.0}) {
    const ManifoldModel m{2, kappa};
    for (const char* id : {"laplace-beltrami", "pucci+:1:2", "pucci-:1:2", "p-laplacian:3",
                           "inf-laplacian", "game-p-laplacian:3"}) {
      CertifyOptions copts;
      copts.seed = kSeed + 7;
      const Certification cert =
          certify_strict_supersolution(make_kernel(id, 2), m, base_point(m), 0.5, copts);
      INFO(id << " kappa " << kappa);
      const bool this_ok = cert.found && cert.margin > 0.0 && cert.report.passed();
      CHECK(this_ok);
      ok = ok && this_ok;
    }
  }
  // flat Laplace-Beltrami: found alpha within 10% of the closed-form value
  {
    const ManifoldModel m{2, 0.0};
    CertifyOptions copts;
    copts.seed = kSeed + 7;
    const Certification cert =
        certify_strict_supersolution(laplace_beltrami(), m, base_point(m), 0.5, copts);
    double d_min = 1e300;
    for (const auto& x : cert.samples) d_min = std::min(d_min, distance(m, base_point(m), x));
    const double want = lb_flat_alpha_requirement(2, d_min);
    const bool within = cert.found && std::abs(cert.alpha - want) <= 0.10 * want;
    CHECK(within);
    ok = ok && within;
  }
  report_line(4, ok, "strict supersolution certified on the r0 = 0.5 annulus, all kernels");
}

TEST_CASE("criterion 5: discrete SMP and SmP on the 41x41 grid") {
  bool ok = true;
  const ManifoldModel m{2, 0.0};
  const Grid2D g = make_grid(m, 41, 0.05);
  // every constructed subsolution with a nonnegative interior max is constant
  for (const char* id : {"laplace-beltrami", "pucci+:1:2", "pucci-:1:2", "pucci-orig+:0.3",
                         "p-laplacian:3", "game-p-laplacian:3", "inf-laplacian",
                         "mean-curvature"}) {
    const Scheme s(make_kernel(id, 2), g);
    for (double level : {0.0, 1.0}) {
      const DiscreteField u = sample_field(g, [&](double, double) { return level; });
      const PropagationResult res = smp_propagation_test(s, g, u);
      INFO(id << " level " << level);
      const bool this_ok = res.is_subsolution && res.hypothesis_met && res.constant &&
                           res.covered == res.interior_nodes;
      CHECK(this_ok);
      ok = ok && this_ok;
    }
  }
  // the counterexample produces a certified nonconstant violation
  {
    OperatorKernel ce = make_kernel("counterexample", 2);
    ce.special_node = g.index(20, 20);
    const Scheme s(ce, g);
    DiscreteField u = sample_field(g, [](double, double) { return 0.0; });
    u.values[static_cast<std::size_t>(g.index(20, 20))] = 1.0;
    const PropagationResult res = smp_propagation_test(s, g, u);
    const bool violated = res.is_subsolution && res.hypothesis_met && !res.constant;
    CHECK(violated);
    ok = ok && violated;
    CHECK(counterexample_subsolution_check(2, kSeed + 8).passed());
    // SmP mirror agrees verdict-for-verdict
    DiscreteField neg = u;
    for (auto& v : neg.values) v = -v;
    const PropagationResult minr = smp_minimum_test(s.reflected(g), g, neg);
    const bool mirror = minr.is_subsolution == res.is_subsolution &&
                        minr.constant == res.constant && minr.covered == res.covered;
    CHECK(mirror);
    ok = ok && mirror;
  }
  // SmP mirror for a conditioned kernel
  {
    const Scheme s(make_kernel("pucci-:1:2", 2), g);
    const DiscreteField zero = sample_field(g, [](double, double) { return 0.0; });
    const PropagationResult maxr = smp_propagation_test(s, g, zero);
    const PropagationResult minr = smp_minimum_test(s.reflected(g), g, zero);
    const bool mirror = maxr.constant && minr.constant && maxr.covered == minr.covered;
    CHECK(mirror);
    ok = ok && mirror;
  }
  report_line(5, ok, "subsolution maxima propagate; the counterexample spike does not");
}

TEST_CASE("criterion 6: Hopf bound on the flat annulus at two spacings") {
  bool ok = true;
  const ManifoldModel m{2, 0.0};
  const double r_in = 0.3, r_out = 0.8;
  for (const double h : {1.0 / 20.0, 1.0 / 40.0}) {
    const int size = static_cast<int>(std::lround(2.0 / h)) + 1;
    Grid2D g = make_grid(m, size, h);
    mask_domain(g, [&](double x, double y) {
      const double rr = std::hypot(x, y);
      return rr > r_in && rr < r_out;
    });
    const DiscreteField u =
        sample_field(g, [&](double x, double y) { return x * x + y * y - r_out * r_out; });
    const Scheme s(make_kernel("laplace-beltrami", 2), g);
    double worst = -1e300;
    for (int j = 0; j < g.size; ++j)
      for (int i = 0; i < g.size; ++i)
        if (g.is_interior(i, j)) worst = std::max(worst, s.residual_at(g, u.values, i, j));
    const bool subsolution = worst <= 1e-10;
    CHECK(subsolution);

    const double rho = 0.5 * (r_out - r_in);
    const PointRep x0{{r_out, 0.0}};
    const PointRep y{{r_out - rho, 0.0}};
    CertifyOptions copts;
    copts.seed = kSeed + 9;
    const Certification cert =
        certify_strict_supersolution(laplace_beltrami(), m, y, rho, copts);
    REQUIRE(cert.found);
    const BarrierSpec spec{y, rho, cert.alpha};
    const double eps = hopf_epsilon_for(
        [&](const PointRep& p) { return dot(p.coords, p.coords) - r_out * r_out; }, 0.0, spec,
        m, x0, cert.r);
    const DsqValueGrad vg = dsq_value_grad(m, y, x0);
    const TangentRep radial{x0, (1.0 / rho) * vg.grad.vec};
    const double bound =
        hopf_lower_bound(laplace_beltrami(), m, y, rho, x0, cert, eps, radial);
    const int i0 = (size - 1) / 2 + static_cast<int>(std::lround(r_out / h));
    const double u_in = u.values[static_cast<std::size_t>(g.index(i0 - 1, (size - 1) / 2))];
    const double quotient = (0.0 - u_in) / h;
    INFO("h = " << h << " quotient " << quotient << " bound " << bound);
    const bool this_ok = subsolution && bound > 0.0 && quotient >= bound * (1.0 - 5.0 * h);
    CHECK(this_ok);
    ok = ok && this_ok;
  }
  report_line(6, ok, "inner-normal quotient exceeds the certified bound at h = 1/20, 1/40");
}

TEST_CASE("criterion 7: discrete strong comparison for pucci-minus") {
  const ManifoldModel m{2, 0.0};
  const Grid2D g = make_grid(m, 41, 0.05);
  const Scheme s(make_kernel("pucci-:1:2", 2), g);
  const DiscreteField data =
      sample_field(g, [](double x, double y) { return 0.5 * (x * x - y * y) + 0.3 * x; });
  SolveOptions tight;
  tight.tol = 4e-11;
  const SolveResult sv = solve_dirichlet(s, g, data, tight);
  REQUIRE(sv.converged);
  DiscreteField lo = data;
  for (int j = 0; j < g.size; ++j)
    for (int i = 0; i < g.size; ++i)
      if (g.is_interior(i, j)) lo.values[static_cast<std::size_t>(g.index(i, j))] -= 1.0;
  const SolveResult su = solve_dirichlet(s, g, lo, tight);
  REQUIRE(su.converged);
  DiscreteField u = su.u;
  double shift = 0.0;
  for (long n = 0; n < g.node_count(); ++n)
    shift = std::max(shift, u.values[static_cast<std::size_t>(n)] -
                                sv.u.values[static_cast<std::size_t>(n)]);
  for (auto& v : u.values) v -= shift;
  const ComparisonResult touch = strong_comparison_test(s, g, u, sv.u);
  DiscreteField below = sv.u;
  for (auto& v : below.values) v -= 0.5;
  const ComparisonResult gap = strong_comparison_test(s, g, below, sv.u);
  const bool ok = touch.verdict == ComparisonVerdict::identity &&
                  gap.verdict == ComparisonVerdict::strict_separation;
  CHECK(touch.verdict == ComparisonVerdict::identity);
  CHECK(gap.verdict == ComparisonVerdict::strict_separation);
  report_line(7, ok, "touching pair forces identity; constant gap stays separated");
}

TEST_CASE("criterion 8: O(n)-invariance and zero transport modulus") {
  bool ok = true;
  CheckOptions opts;
  opts.seed = kSeed + 10;
  opts.rotations = 100;
  for (const auto& id : kernel_catalog_ids()) {
    const OperatorKernel k = make_kernel(id, 3);
    if (k.x_dependent) continue;  // universal kernels only
    const PropertyReport inv = check_invariance(k, 3, opts);
    INFO(id);
    CHECK(inv.passed());
    ok = ok && inv.passed();
  }
  for (double kappa : {-1.0, 0.0, 1.0}) {
    const ManifoldModel m{2, kappa};
    for (const auto& id : kernel_catalog_ids()) {
      const OperatorKernel k = make_kernel(id, 2);
      if (k.x_dependent) continue;
      const PropertyReport rep = check_iuc(k, m, opts);
      INFO(id << " kappa " << kappa);
      CHECK(rep.passed());
      ok = ok && rep.passed();
    }
  }
  report_line(8, ok, "100 rotations at 1e-11; jet transport modulus zero at 1e-10");
}

TEST_CASE("criterion 9: byte-identical reports under a fixed seed") {
  const auto run_all = [] {
    std::ostringstream os;
    const auto rows = run_condition_matrix(2, 0.0, kSeed);
    write_matrix_text(os, rows);
    write_matrix_csv(os, rows);
    const ManifoldModel m{2, 1.0};
    CheckOptions opts;
    opts.seed = kSeed;
    opts.points = 25;
    std::vector<PropertyReport> reps;
    reps.push_back(check_lpe(pucci_minus(1.0, 2.0), m, base_point(m), opts));
    reps.push_back(check_lsp_universal(mean_curvature(), 2, opts));
    reps.push_back(check_uniform_ellipticity(p_laplacian(3.0), 2, std::nullopt, opts));
    write_reports(os, reps, "determinism");
    const Grid2D g = make_grid(ManifoldModel{2, 0.0}, 21, 0.1);
    const Scheme s(make_kernel("pucci-:1:2", 2), g);
    const SolveResult sol = solve_dirichlet(
        s, g, sample_field(g, [](double x, double y) { return x * x - 0.3 * y; }));
    write_field_csv(os, g, sol.u);
    return os.str();
  };
  const std::string a = run_all();
  const std::string b = run_all();
  const bool ok = a == b && !a.empty();
  CHECK(ok);
  report_line(9, ok, "matrix, property reports and solve CSV repeat byte-for-byte");
}
