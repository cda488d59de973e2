#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>

#include "curvops/jets.hpp"
#include "curvops/report.hpp"

namespace curvops {

/// Location information threaded through kernel evaluation. Universal kernels
/// ignore it; x-dependent kernels read the point or (on grids) the node id.
struct EvalContext {
  const ManifoldModel* manifold = nullptr;
  const PointRep* point = nullptr;
  long node = -1;
};

inline EvalContext no_context() { return EvalContext{}; }

enum class Expect { yes, no, none };

/// The structural claims recorded for each catalog kernel; the condition
/// matrix and the CLI `check` command compare observed verdicts to these.
struct ConditionProfile {
  Expect proper = Expect::none;
  Expect lpe = Expect::none;
  Expect upe = Expect::none;
  Expect lpe_prime = Expect::none;
  Expect lsp = Expect::none;
  Expect usp = Expect::none;
  Expect lsp_prime = Expect::none;
  Expect usp_prime = Expect::none;
  Expect uniformly_elliptic = Expect::none;
};

struct Ellipticity {
  double lambda;
  double Lambda;
};

using KernelFn = std::function<double(const EvalContext&, double, const Vec&, const SymMat&)>;

/// An O(n)-invariant Euclidean operator (s, v, A) -> R with structural
/// metadata, evaluated on jets through orthonormal frames.
struct OperatorKernel {
  std::string id;
  KernelFn fn;
  bool singular_at_zero = false;
  bool x_dependent = false;
  std::optional<double> homogeneity;
  std::optional<Ellipticity> ellipticity;
  std::optional<double> lipschitz_sq;  // C in the uniform Lipschitz condition
  std::vector<double> params;          // constructor parameters, in order
  ConditionProfile profile;

  // x-dependent kernels with a distinguished location (the counterexample):
  // contexts match by node identity, never by floating-point coordinates.
  std::optional<PointRep> special_point;
  long special_node = -1;

  double operator()(const EvalContext& ctx, double s, const Vec& v, const SymMat& A) const {
    return fn(ctx, s, v, A);
  }
};

// ---------------------------------------------------------------------------
// Symmetric eigensolver (cyclic Jacobi; n is small everywhere in this library)

struct EigenSym {
  Vec values;                       // ascending
  std::vector<Vec> vectors;         // vectors[k] pairs with values[k]
};

Vec sym_eigenvalues(const SymMat& A);
EigenSym sym_eigen(const SymMat& A);

// Pucci closed forms on a spectrum (ascending eigenvalues). Eigenvalues with
// |mu| <= 1e-12 * ||A|| contribute to neither sum.
double pucci_plus_value(double lambda, double Lambda, const Vec& mu, double scale);
double pucci_minus_value(double lambda, double Lambda, const Vec& mu, double scale);

// ---------------------------------------------------------------------------
// Catalog

OperatorKernel laplace_beltrami();
OperatorKernel monge_ampere();
OperatorKernel pucci_plus(double lambda, double Lambda);
OperatorKernel pucci_minus(double lambda, double Lambda);
OperatorKernel pucci_orig_plus(double alpha, int n);
OperatorKernel pucci_orig_minus(double alpha, int n);
OperatorKernel p_laplacian(double p);
OperatorKernel game_p_laplacian(double p);
OperatorKernel inf_laplacian();
OperatorKernel inf_laplacian_h(double h);
OperatorKernel mean_curvature();
OperatorKernel grad_power_pucci(double beta, double lambda, double Lambda, int sign);
OperatorKernel capillary(double H, int n);

using ScalarField = std::function<double(const EvalContext&)>;
using VectorField = std::function<Vec(const EvalContext&)>;

/// a(x) F(v, A) + c(x) |s|^{k-1} s with a > 0, c >= 0.
OperatorKernel zeroth_order_wrap(OperatorKernel base, ScalarField a, ScalarField c, double k);

/// |v|^{p-2} (F(A) + <v, b(x)>) for a Hessian kernel F.
OperatorKernel hessian_drift(OperatorKernel base, double p, VectorField b);

/// -Tr(A)/(1+|Tr(A)|) + f(x) with f = -1 at the marked location, 0 elsewhere.
/// The location matches by grid-node identity (or by point coincidence when a
/// geometric point is supplied).
OperatorKernel counterexample(const ManifoldModel& m, const PointRep& x0, long x0_node = -1);

/// F^-(x,s,q,Q) = -F(x,-s,-q,-Q); swaps the lower/upper condition profile.
OperatorKernel reflect(const OperatorKernel& k);

/// Parse catalog ids like "pucci+:1:2", "p-laplacian:3", "mean-curvature".
/// kappa places x-dependent kernels (the counterexample's marked point) on
/// the right model manifold.
OperatorKernel make_kernel(const std::string& spec, int n, double kappa = 0.0);
std::vector<std::string> kernel_catalog_ids();

/// Evaluate on a jet in frame coordinates; singular kernels reject q = 0.
double evaluate(const OperatorKernel& k, const EvalContext& ctx, const Jet2& jet);

// ---------------------------------------------------------------------------
// Displayed identities and inequalities

/// Two-sided uniform-ellipticity sandwich M^-(Q) <= F(..Q) - F(..0) <= M^+(Q).
PropertyReport pucci_sandwich_check(const OperatorKernel& k, int n, int samples,
                                    std::uint64_t seed);

/// lhs = M^-(A - a v v^T), rhs = M^-(A) + a lambda |v|^2; lhs >= rhs holds.
std::pair<double, double> pucci_rank1_inequality(double lambda, double Lambda, const SymMat& A,
                                                 const Vec& v, double alpha);

/// F[phi1 - phi2] <= F[phi1] - F[phi2] sampled on random jet pairs.
PropertyReport subadditivity_check(const OperatorKernel& k, int n, int samples,
                                   std::uint64_t seed);

/// The displayed exact rank-1 identities: both sides of
/// F(v, A - a v v^T) = F(v, A) + a * offset(kernel, v). Supported for
/// p-laplacian, inf-laplacian and mean-curvature ids.
std::pair<double, double> exact_rank1_identity(const OperatorKernel& k, const Jet2& jet,
                                               double alpha);

}  // namespace curvops
