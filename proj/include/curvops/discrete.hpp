#pragma once

#include <cstdint>
#include <functional>

#include "curvops/operators.hpp"
#include "curvops/report.hpp"

namespace curvops {

/// Chart-indexed grid on a 2D model manifold. kappa = 0 uses the exact
/// Cartesian chart; kappa != 0 uses geodesic normal coordinates around the
/// grid center. A node is interior when the full stencil (radius 3) stays
/// in-grid and the node passes the domain mask; all other nodes carry data.
struct Grid2D {
  ManifoldModel m;
  int size = 41;
  double spacing = 0.05;
  std::vector<std::uint8_t> interior;
  PointRep center;
  Frame center_frame;

  long index(int i, int j) const { return static_cast<long>(j) * size + i; }
  long node_count() const { return static_cast<long>(size) * size; }
  double cx(int i) const { return (i - (size - 1) / 2) * spacing; }
  double cy(int j) const { return (j - (size - 1) / 2) * spacing; }
  bool in_bounds(int i, int j) const { return i >= 0 && i < size && j >= 0 && j < size; }
  bool is_interior(int i, int j) const { return interior[static_cast<std::size_t>(index(i, j))]; }
  PointRep point(int i, int j) const;
  long interior_count() const;
};

Grid2D make_grid(const ManifoldModel& m, int size, double spacing);

/// Restrict the interior to a chart-coordinate predicate (disks, annuli).
void mask_domain(Grid2D& g, const std::function<bool(double, double)>& inside);

struct DiscreteField {
  std::vector<double> values;
};

DiscreteField sample_field(const Grid2D& g, const std::function<double(double, double)>& f);

struct SchemeSpec {
  std::string kernel_id;
  int stencil_directions = 16;
  bool monotone = true;
};

struct Residuals {
  std::vector<double> values;         // zero at data nodes
  std::vector<std::uint8_t> flagged;  // zero-gradient fallback applied
};

/// Monotone wide-stencil discretization of a catalog kernel. On flat grids
/// every kernel uses a structural form built purely from directional second
/// differences (gradient coefficients frozen from centered differences);
/// curved grids assemble the metric-corrected jet and evaluate the kernel.
class Scheme {
 public:
  Scheme(OperatorKernel kernel, const Grid2D& g);

  const OperatorKernel& kernel() const { return kernel_; }
  SchemeSpec spec() const;
  bool monotone() const { return monotone_; }

  double residual_at(const Grid2D& g, const std::vector<double>& u, int i, int j,
                     bool* flagged = nullptr) const;
  Residuals residuals(const Grid2D& g, const DiscreteField& u) const;

  /// Residual with the gradient-direction coefficients frozen from `base`
  /// while the second differences read `u`: the sense in which the
  /// gradient-dependent updates are monotone in the neighbor values.
  double residual_frozen(const Grid2D& g, const std::vector<double>& base,
                         const std::vector<double>& u, int i, int j) const;

  /// Upper bound on d(residual)/d(center value); the damped update uses
  /// 0.9 / bound, the wide-stencil analogue of spacing^2 / (4 Lambda_eff).
  double coefficient_bound(const Grid2D& g, const std::vector<double>& u) const;

  /// Residual driving the relaxation sweeps. Identical to residual_at except
  /// for the infinity-Laplacian forms, which drop the |v|-power prefactor:
  /// the same zero set, without the degenerate stall at small gradients.
  double update_residual_at(const Grid2D& g, const std::vector<double>& u, int i, int j) const;

  /// Scheme for F^-(x,s,q,Q) = -F(x,-s,-q,-Q) with the same stencil.
  Scheme reflected(const Grid2D& g) const;

  /// True when the residual identity at an interior max node certifies that
  /// the axis neighbors must share the max (the discrete propagation step).
  bool axis_forcing_certificate(const Grid2D& g, const std::vector<double>& u, int i, int j,
                                double res_tol) const;

 private:
  enum class Form {
    trace,
    pucci_plus,
    pucci_minus,
    orig_plus,
    orig_minus,
    game,
    p_lap,
    inf_lap,
    inf_lap_h,
    mean_curv,
    capillary,
    counterex,
    generic
  };
  double residual_core(const Grid2D& g, const std::vector<double>& cf,
                       const std::vector<double>& uf, int i, int j, bool* flagged) const;

  Form form_ = Form::generic;
  bool reflected_sign_ = false;  // counterexample mirror flips f
  bool monotone_ = false;
  OperatorKernel kernel_;
  double a_ = 0.0, b_ = 0.0;  // form parameters
};

struct SolveOptions {
  double tol = 1e-8;
  long max_sweeps = 1000000;
  double damping = 0.0;  // 0 = automatic from coefficient_bound
};

struct SolveResult {
  DiscreteField u;
  long sweeps = 0;
  double residual_sup = 0.0;
  bool converged = false;
  std::vector<long> flagged_nodes;
};

/// Damped red-black relaxation u <- u - tau * residual to steady state.
/// `data` provides boundary values everywhere and the interior initial guess.
SolveResult solve_dirichlet(const Scheme& scheme, const Grid2D& g, const DiscreteField& data,
                            const SolveOptions& opts = {});

struct PropagationOptions {
  double res_tol = 1e-10;
  double eq_tol = 1e-7;
};

struct PropagationResult {
  bool is_subsolution = false;
  long worst_node = -1;
  double worst_residual = 0.0;
  bool hypothesis_met = false;  // nonnegative interior maximum attained
  bool constant = false;
  double max_value = 0.0;
  long covered = 0;
  long interior_nodes = 0;
  std::vector<std::vector<long>> fronts;  // BFS waves through the stencil
  long certified_front_nodes = 0;         // nodes with an axis-forcing certificate
};

/// Discrete strong maximum principle: verify the field is a subsolution,
/// locate the (nonnegative) interior maximum, and trace its propagation
/// through the stencil. Verdict `constant` means the max-set covers the
/// interior.
PropagationResult smp_propagation_test(const Scheme& scheme, const Grid2D& g,
                                       const DiscreteField& u,
                                       const PropagationOptions& opts = {});

/// Strong minimum principle via the reflected operator on the negated field.
PropagationResult smp_minimum_test(const Scheme& scheme, const Grid2D& g, const DiscreteField& v,
                                   const PropagationOptions& opts = {});

/// Verifies the spike at the marked node is a discrete (and viscosity-style)
/// subsolution of the counterexample operator: F(x0, 1, q, Q) < 0 for all
/// sampled test jets and F = 0 on the zero jet away from x0.
PropertyReport counterexample_subsolution_check(int n, std::uint64_t seed);

enum class ComparisonVerdict { identity, strict_separation, order_violated, not_subsolution };

struct ComparisonResult {
  ComparisonVerdict verdict = ComparisonVerdict::order_violated;
  double max_gap = 0.0;  // max of w = u - v
  PropagationResult propagation;
};

/// Discrete strong comparison: w = u - v must be a subsolution (checked),
/// then either w < 0 everywhere (strict separation) or the maximum 0
/// propagates over the whole interior (identity).
ComparisonResult strong_comparison_test(const Scheme& scheme, const Grid2D& g,
                                        const DiscreteField& u, const DiscreteField& v,
                                        const PropagationOptions& opts = {});

/// Sample-wise consequence of the linearization bound: for sampled base jets
/// t and difference jets w,
///   F(t - w) - F(t) >= -(M^+_{l,L}(Q_w) + C (|s_w| + |q_w|)) - tol.
PropertyReport linearized_domination_check(const OperatorKernel& k, int n, int samples,
                                           std::uint64_t seed);

void write_field_csv(std::ostream& os, const Grid2D& g, const DiscreteField& u);

}  // namespace curvops
