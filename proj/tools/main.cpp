#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "curvops/barriers.hpp"
#include "curvops/discrete.hpp"
#include "curvops/properties.hpp"

using namespace curvops;

namespace {

// exit codes: 0 pass, 1 property failure, 2 usage error, 3 inconclusive,
// 4 expected-violation confirmed
constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInconclusive = 3;
constexpr int kExitExpectedViolation = 4;

struct CommonOpts {
  std::string kernel = "laplace-beltrami";
  double kappa = 0.0;
  int dim = 2;
  std::uint64_t seed = 20240808;
  std::string out = "out";
  double spacing = 0.05;
  int size = 41;
  double alpha_max = 1099511627776.0;
};

std::ofstream open_out(const CommonOpts& o, const std::string& name) {
  std::filesystem::create_directories(o.out);
  return std::ofstream(std::filesystem::path(o.out) / name);
}

int verdict_exit(bool any_fail, bool any_inconclusive) {
  if (any_fail) return kExitFail;
  if (any_inconclusive) return kExitInconclusive;
  return kExitPass;
}

int run_check(const CommonOpts& o) {
  const OperatorKernel k = make_kernel(o.kernel, o.dim, o.kappa);
  const auto suite = run_kernel_suite(k, o.dim, o.kappa, o.seed);
  auto out = open_out(o, "check-" + o.kernel + ".txt");
  write_reports(out, suite, "curvops check kernel=" + o.kernel + " kappa=" +
                                format_double(o.kappa) + " seed=" + std::to_string(o.seed));
  bool fail_mismatch = false, inconclusive_mismatch = false;
  const int mismatches = count_profile_mismatches(k, suite);
  for (const auto& r : suite) {
    std::cout << r.id << ": " << to_string(r.verdict);
    if (!r.note.empty()) std::cout << " (" << r.note << ")";
    std::cout << "\n";
  }
  if (mismatches > 0) {
    for (const auto& r : suite)
      if (count_profile_mismatches(k, {r}) > 0) {
        if (r.verdict == Verdict::inconclusive) inconclusive_mismatch = true;
        else fail_mismatch = true;
      }
  }
  std::cout << "profile mismatches: " << mismatches << "\n";
  return verdict_exit(fail_mismatch, inconclusive_mismatch);
}

int run_matrix(const CommonOpts& o) {
  const auto rows = run_condition_matrix(o.dim, o.kappa, o.seed);
  {
    auto txt = open_out(o, "matrix.txt");
    txt << "# curvops matrix kappa=" << format_double(o.kappa) << " dim=" << o.dim
        << " seed=" << o.seed << "\n";
    write_matrix_text(txt, rows);
    auto csv = open_out(o, "matrix.csv");
    write_matrix_csv(csv, rows);
  }
  int mismatches = 0;
  bool any_inconclusive_mismatch = false;
  for (const auto& r : rows)
    if (!r.match) {
      ++mismatches;
      if (r.observed == Verdict::inconclusive) any_inconclusive_mismatch = true;
      std::cout << "MISMATCH " << r.kernel << " / " << r.condition << " observed "
                << to_string(r.observed) << "\n";
    }
  write_matrix_text(std::cout, rows);
  std::cout << "matrix cells: " << rows.size() << ", mismatches: " << mismatches << "\n";
  return verdict_exit(mismatches > 0 && !any_inconclusive_mismatch,
                      mismatches > 0 && any_inconclusive_mismatch);
}

int run_barrier(const CommonOpts& o, double r0) {
  const ManifoldModel m{o.dim, o.kappa};
  const OperatorKernel k = make_kernel(o.kernel, o.dim, o.kappa);
  CertifyOptions copts;
  copts.seed = o.seed;
  copts.alpha_max = o.alpha_max;
  const Certification cert = certify_strict_supersolution(k, m, base_point(m), r0, copts);
  auto out = open_out(o, "barrier-" + o.kernel + ".txt");
  write_reports(out, {cert.report}, "curvops barrier kernel=" + o.kernel + " kappa=" +
                                        format_double(o.kappa) + " r0=" + format_double(r0));
  if (!cert.found) {
    std::cout << "barrier certification: inconclusive (alpha search exhausted)\n";
    return kExitInconclusive;
  }
  std::cout << "barrier certification: alpha = " << format_double(cert.alpha)
            << ", c = " << format_double(cert.c) << ", margin = " << format_double(cert.margin)
            << ", annulus width r = " << format_double(cert.r) << "\n";
  return cert.report.passed() ? kExitPass : kExitFail;
}

DiscreteField boundary_preset(const Grid2D& g, const std::string& name) {
  if (name == "affine")
    return sample_field(g, [](double x, double y) { return 0.6 * x - 0.9 * y + 0.2; });
  if (name == "radial") return sample_field(g, [](double x, double y) { return x * x + y * y; });
  if (name == "saddle")
    return sample_field(g, [](double x, double y) { return 0.5 * (x * x - y * y); });
  if (name == "wave")
    return sample_field(g, [](double x, double y) { return std::sin(2.0 * x) * std::cos(y); });
  throw CLI::ValidationError("--boundary", "unknown boundary preset: " + name);
}

int run_solve(const CommonOpts& o, const std::string& boundary) {
  const ManifoldModel m{2, o.kappa};
  const Grid2D g = make_grid(m, o.size, o.spacing);
  const Scheme s(make_kernel(o.kernel, 2), g);
  const DiscreteField data = boundary_preset(g, boundary);
  const SolveResult sol = solve_dirichlet(s, g, data);
  auto csv = open_out(o, "solve-" + o.kernel + ".csv");
  write_field_csv(csv, g, sol.u);
  std::cout << "solve: kernel = " << o.kernel << ", sweeps = " << sol.sweeps
            << ", sup residual = " << format_double(sol.residual_sup)
            << ", flagged nodes = " << sol.flagged_nodes.size() << "\n";
  return sol.converged ? kExitPass : kExitFail;
}

int run_smp(const CommonOpts& o) {
  const ManifoldModel m{2, o.kappa};
  const Grid2D g = make_grid(m, o.size, o.spacing);
  OperatorKernel k = make_kernel(o.kernel, 2, o.kappa);
  const long center = g.index((g.size - 1) / 2, (g.size - 1) / 2);
  const bool is_counterexample = k.id == "counterexample";
  if (is_counterexample) k.special_node = center;
  const Scheme s(k, g);

  DiscreteField u;
  u.values.assign(static_cast<std::size_t>(g.node_count()), 0.0);
  if (is_counterexample) u.values[static_cast<std::size_t>(center)] = 1.0;

  const PropagationResult maxr = smp_propagation_test(s, g, u);
  DiscreteField neg;
  neg.values.assign(u.values.size(), 0.0);
  for (std::size_t i = 0; i < u.values.size(); ++i) neg.values[i] = -u.values[i];
  const PropagationResult minr = smp_minimum_test(s.reflected(g), g, neg);

  auto out = open_out(o, "smp-" + o.kernel + ".txt");
  out << "# curvops smp kernel=" << o.kernel << " kappa=" << format_double(o.kappa)
      << " size=" << o.size << "\n";
  out << "subsolution = " << (maxr.is_subsolution ? "yes" : "no") << "\n";
  out << "max_value = " << format_double(maxr.max_value) << "\n";
  out << "verdict = " << (maxr.constant ? "constant" : "nonconstant") << "\n";
  out << "covered = " << maxr.covered << " / " << maxr.interior_nodes << "\n";
  out << "mirror_verdict = " << (minr.constant ? "constant" : "nonconstant") << "\n";
  out << "fronts = " << maxr.fronts.size() << "\n";
  for (std::size_t wave = 0; wave < maxr.fronts.size() && wave < 8; ++wave)
    out << "front " << wave << " size = " << maxr.fronts[wave].size() << "\n";

  std::cout << "smp: subsolution = " << (maxr.is_subsolution ? "yes" : "no")
            << ", verdict = " << (maxr.constant ? "constant" : "nonconstant")
            << ", mirror agrees = " << (maxr.constant == minr.constant ? "yes" : "no") << "\n";
  if (!maxr.is_subsolution) {
    std::cout << "worst node " << maxr.worst_node << " residual "
              << format_double(maxr.worst_residual) << "\n";
    return kExitFail;
  }
  if (maxr.constant != minr.constant) return kExitFail;
  if (is_counterexample) {
    // the violation is the expected outcome for the counterexample operator
    return maxr.constant ? kExitFail : kExitExpectedViolation;
  }
  return maxr.constant ? kExitPass : kExitFail;
}

int run_hopf(const CommonOpts& o, double r_in, double r_out) {
  const ManifoldModel m{2, o.kappa};
  Grid2D g = make_grid(m, o.size, o.spacing);
  mask_domain(g, [&](double x, double y) {
    const double rr = std::hypot(x, y);
    return rr > r_in && rr < r_out;
  });
  // subsolution u = |x|^2 - r_out^2 < 0 on the annulus, = 0 at the touch point
  const DiscreteField u =
      sample_field(g, [&](double x, double y) { return x * x + y * y - r_out * r_out; });
  const Scheme s(make_kernel("laplace-beltrami", 2), g);
  double worst = -1e300;
  for (int j = 0; j < g.size; ++j)
    for (int i = 0; i < g.size; ++i)
      if (g.is_interior(i, j)) worst = std::max(worst, s.residual_at(g, u.values, i, j));
  if (worst > 1e-10) {
    std::cout << "hopf: the sampled function is not a subsolution\n";
    return kExitFail;
  }

  // interior ball tangent at x0 = (r_out, 0)
  const double rho = 0.5 * (r_out - r_in);
  const PointRep x0{{r_out, 0.0}};
  const PointRep y{{r_out - rho, 0.0}};
  const OperatorKernel lb = make_kernel("laplace-beltrami", 2);
  CertifyOptions copts;
  copts.seed = o.seed;
  Certification cert = certify_strict_supersolution(lb, m, y, rho, copts);
  if (!cert.found) return kExitInconclusive;
  const BarrierSpec spec{y, rho, cert.alpha};
  const double eps = hopf_epsilon_for(
      [&](const PointRep& p) { return dot(p.coords, p.coords) - r_out * r_out; }, 0.0, spec, m,
      x0, cert.r);
  const DsqValueGrad vg = dsq_value_grad(m, y, x0);
  const TangentRep radial{x0, (1.0 / rho) * vg.grad.vec};
  const double bound = hopf_lower_bound(lb, m, y, rho, x0, cert, eps, radial);

  // inner-normal difference quotient at x0 along the radial direction
  const double h = g.spacing;
  const int i0 = (g.size - 1) / 2 + static_cast<int>(std::lround(r_out / h));
  const int j0 = (g.size - 1) / 2;
  const double u_x0 = 0.0;
  const double u_in = u.values[static_cast<std::size_t>(g.index(i0 - 1, j0))];
  const double quotient = (u_x0 - u_in) / h;
  const double floor_value = bound * (1.0 - 5.0 * h);

  auto out = open_out(o, "hopf.txt");
  out << "# curvops hopf kappa=" << format_double(o.kappa) << " spacing=" << format_double(h)
      << "\n";
  out << "epsilon = " << format_double(eps) << "\n";
  out << "c = " << format_double(cert.c) << "\n";
  out << "bound = " << format_double(bound) << "\n";
  out << "quotient = " << format_double(quotient) << "\n";
  std::cout << "hopf: quotient = " << format_double(quotient)
            << ", certified bound x (1 - 5h) = " << format_double(floor_value) << "\n";
  return quotient >= floor_value && bound > 0.0 ? kExitPass : kExitFail;
}

int run_compare(const CommonOpts& o) {
  const ManifoldModel m{2, o.kappa};
  const Grid2D g = make_grid(m, o.size, o.spacing);
  const Scheme s(make_kernel("pucci-:1:2", 2), g);
  const DiscreteField data =
      sample_field(g, [](double x, double y) { return 0.5 * (x * x - y * y) + 0.3 * x; });
  SolveOptions tight;
  tight.tol = 4e-11;
  const SolveResult sv = solve_dirichlet(s, g, data, tight);
  DiscreteField lo = data;
  for (int j = 0; j < g.size; ++j)
    for (int i = 0; i < g.size; ++i)
      if (g.is_interior(i, j)) lo.values[static_cast<std::size_t>(g.index(i, j))] -= 1.0;
  const SolveResult su = solve_dirichlet(s, g, lo, tight);
  if (!sv.converged || !su.converged) return kExitInconclusive;
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

  auto out = open_out(o, "compare.txt");
  out << "# curvops compare kappa=" << format_double(o.kappa) << " size=" << o.size << "\n";
  const auto verdict_name = [](ComparisonVerdict v) {
    switch (v) {
      case ComparisonVerdict::identity: return "identity";
      case ComparisonVerdict::strict_separation: return "strict-separation";
      case ComparisonVerdict::order_violated: return "order-violated";
      case ComparisonVerdict::not_subsolution: return "not-subsolution";
    }
    return "?";
  };
  out << "touching_pair = " << verdict_name(touch.verdict) << "\n";
  out << "touching_max_gap = " << format_double(touch.max_gap) << "\n";
  out << "constant_gap = " << verdict_name(gap.verdict) << "\n";
  std::cout << "compare: touching pair -> " << verdict_name(touch.verdict)
            << ", constant gap -> " << verdict_name(gap.verdict) << "\n";
  return (touch.verdict == ComparisonVerdict::identity &&
          gap.verdict == ComparisonVerdict::strict_separation)
             ? kExitPass
             : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"curvops: structural checks and discrete experiments for fully nonlinear "
               "operators on constant-curvature model manifolds"};
  app.set_config("--config", "", "INI config with [subcommand] sections");
  app.require_subcommand(0, 1);

  CommonOpts o;
  double r0 = 0.5;
  double r_in = 0.3, r_out = 0.8;
  std::string boundary = "saddle";

  const auto add_common = [&](CLI::App* cmd, bool grid) {
    cmd->configurable(true);  // an INI [section] can select and fill the subcommand
    cmd->add_option("--kernel", o.kernel, "kernel id, e.g. pucci+:1:2, p-laplacian:3");
    cmd->add_option("--kappa", o.kappa, "sectional curvature of the model manifold");
    cmd->add_option("--dim", o.dim, "manifold dimension for jet-level checks");
    cmd->add_option("--seed", o.seed, "random seed for all sampling");
    cmd->add_option("--out", o.out, "output directory for reports and CSV");
    cmd->add_option("--alpha-max", o.alpha_max, "rank-one search ceiling");
    if (grid) {
      cmd->add_option("--spacing", o.spacing, "grid spacing");
      cmd->add_option("--size", o.size, "nodes per grid side");
    }
  };

  auto* check = app.add_subcommand("check", "run the structural-condition suite on a kernel");
  add_common(check, false);
  auto* matrix = app.add_subcommand("matrix", "reproduce the operator x condition table");
  add_common(matrix, false);
  auto* barrier = app.add_subcommand("barrier", "certify the exponential barrier");
  add_common(barrier, false);
  barrier->add_option("--r0", r0, "annulus radius (must sit inside the convexity radius)");
  auto* solve = app.add_subcommand("solve", "solve a Dirichlet problem on the grid");
  add_common(solve, true);
  solve->add_option("--boundary", boundary, "boundary preset: affine|radial|saddle|wave");
  auto* smp = app.add_subcommand("smp", "discrete strong maximum/minimum principle");
  add_common(smp, true);
  auto* hopf = app.add_subcommand("hopf", "Hopf boundary bound on the flat annulus");
  add_common(hopf, true);
  hopf->add_option("--r-in", r_in, "inner annulus radius");
  hopf->add_option("--r-out", r_out, "outer annulus radius");
  auto* compare = app.add_subcommand("compare", "discrete strong comparison for pucci-");
  add_common(compare, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (app.get_subcommands().empty()) {
    std::cout << app.help();
    return kExitUsage;
  }

  try {
    if (check->parsed()) return run_check(o);
    if (matrix->parsed()) return run_matrix(o);
    if (barrier->parsed()) return run_barrier(o, r0);
    if (solve->parsed()) return run_solve(o, boundary);
    if (smp->parsed()) return run_smp(o);
    if (hopf->parsed()) return run_hopf(o, r_in, r_out);
    if (compare->parsed()) return run_compare(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
