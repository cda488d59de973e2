#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "curvops/barriers.hpp"
#include "curvops/discrete.hpp"
#include "curvops/properties.hpp"

namespace py = pybind11;
using namespace curvops;

namespace {

SymMat to_sym(const std::vector<std::vector<double>>& rows) {
  const int n = static_cast<int>(rows.size());
  SymMat a(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) a.set(i, j, 0.5 * (rows[i][j] + rows[j][i]));
  return a;
}

std::vector<std::vector<double>> from_sym(const SymMat& a) {
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(a.dim()),
                                        std::vector<double>(static_cast<std::size_t>(a.dim())));
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < a.dim(); ++j) rows[i][j] = a(i, j);
  return rows;
}

py::dict report_dict(const PropertyReport& r) {
  py::dict d;
  d["id"] = r.id;
  d["verdict"] = std::string(to_string(r.verdict));
  d["min_margin"] = r.min_margin;
  if (r.alpha_threshold) d["alpha_threshold"] = *r.alpha_threshold;
  d["note"] = r.note;
  d["table"] = r.table;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Fully nonlinear operators on constant-curvature model manifolds: "
            "geometry, structural condition checks, barriers and the discrete "
            "maximum-principle testbed.";

  py::class_<ManifoldModel>(m, "Manifold")
      .def(py::init([](int n, double kappa) { return ManifoldModel{n, kappa}; }), py::arg("n"),
           py::arg("kappa"))
      .def_readonly("n", &ManifoldModel::n)
      .def_readonly("kappa", &ManifoldModel::kappa)
      .def("base_point", [](const ManifoldModel& mm) { return base_point(mm).coords; })
      .def("distance",
           [](const ManifoldModel& mm, const Vec& x, const Vec& y) {
             return distance(mm, PointRep{x}, PointRep{y});
           })
      .def("exp",
           [](const ManifoldModel& mm, const Vec& x, const Vec& v) {
             return exp_map(mm, PointRep{x}, TangentRep{PointRep{x}, v}).coords;
           })
      .def("log",
           [](const ManifoldModel& mm, const Vec& x, const Vec& y) {
             return log_map(mm, PointRep{x}, PointRep{y}).vec;
           })
      .def("transport",
           [](const ManifoldModel& mm, const Vec& x, const Vec& y, const Vec& v) {
             return parallel_transport(mm, PointRep{x}, PointRep{y},
                                       TangentRep{PointRep{x}, v})
                 .vec;
           })
      .def("injectivity_radius",
           [](const ManifoldModel& mm, const Vec& x) {
             return injectivity_radius(mm, PointRep{x});
           })
      .def("convexity_radius",
           [](const ManifoldModel& mm, const Vec& x) {
             return convexity_radius(mm, PointRep{x});
           })
      .def("dsq_hessian", [](const ManifoldModel& mm, const Vec& x0, const Vec& x) {
        const PointRep p0{x0}, p{x};
        return from_sym(dsq_hessian(mm, p0, p, radial_frame(mm, p0, p)));
      });

  py::class_<OperatorKernel>(m, "Kernel")
      .def_readonly("id", &OperatorKernel::id)
      .def_readonly("singular_at_zero", &OperatorKernel::singular_at_zero)
      .def_property_readonly("homogeneity",
                             [](const OperatorKernel& k) -> py::object {
                               if (k.homogeneity) return py::float_(*k.homogeneity);
                               return py::none();
                             })
      .def_property_readonly("ellipticity",
                             [](const OperatorKernel& k) -> py::object {
                               if (k.ellipticity)
                                 return py::make_tuple(k.ellipticity->lambda,
                                                       k.ellipticity->Lambda);
                               return py::none();
                             })
      .def("__call__",
           [](const OperatorKernel& k, double s, const Vec& v,
              const std::vector<std::vector<double>>& A) {
             return evaluate(k, no_context(), make_jet(s, v, to_sym(A)));
           },
           py::arg("s"), py::arg("v"), py::arg("A"))
      .def("reflected", [](const OperatorKernel& k) { return reflect(k); });

  m.def("kernel", &make_kernel, py::arg("id"), py::arg("n") = 2, py::arg("kappa") = 0.0,
        "construct a catalog kernel from its string id, e.g. 'pucci+:1:2'");
  m.def("catalog", &kernel_catalog_ids);
  m.def("eigenvalues",
        [](const std::vector<std::vector<double>>& A) { return sym_eigenvalues(to_sym(A)); });

  m.def(
      "condition_matrix",
      [](int n, double kappa, std::uint64_t seed) {
        py::list rows;
        for (const auto& r : run_condition_matrix(n, kappa, seed)) {
          py::dict d;
          d["kernel"] = r.kernel;
          d["condition"] = r.condition;
          d["observed"] = std::string(to_string(r.observed));
          d["claimed"] = r.expected == Expect::yes ? "pass"
                         : r.expected == Expect::no ? "fail"
                                                    : "";
          d["match"] = r.match;
          rows.append(d);
        }
        return rows;
      },
      py::arg("n") = 2, py::arg("kappa") = 0.0, py::arg("seed") = 20240808);

  m.def(
      "check_kernel",
      [](const std::string& id, int n, double kappa, std::uint64_t seed) {
        const OperatorKernel k = make_kernel(id, n);
        py::list out;
        for (const auto& r : run_kernel_suite(k, n, kappa, seed)) out.append(report_dict(r));
        return out;
      },
      py::arg("id"), py::arg("n") = 2, py::arg("kappa") = 0.0, py::arg("seed") = 20240808);

  m.def(
      "certify_barrier",
      [](const std::string& id, double kappa, double r0, std::uint64_t seed) {
        const ManifoldModel mm{2, kappa};
        CertifyOptions opts;
        opts.seed = seed;
        const Certification cert =
            certify_strict_supersolution(make_kernel(id, 2), mm, base_point(mm), r0, opts);
        py::dict d;
        d["found"] = cert.found;
        d["alpha"] = cert.alpha;
        d["c"] = cert.c;
        d["margin"] = cert.margin;
        d["annulus_width"] = cert.r;
        d["epsilon_margins"] = cert.epsilon_margins;
        return d;
      },
      py::arg("id"), py::arg("kappa") = 0.0, py::arg("r0") = 0.5,
      py::arg("seed") = 20240808);

  m.def(
      "smp_spike",
      [](const std::string& id, int size, double spacing) {
        const ManifoldModel mm{2, 0.0};
        const Grid2D g = make_grid(mm, size, spacing);
        OperatorKernel k = make_kernel(id, 2);
        const long center = g.index((size - 1) / 2, (size - 1) / 2);
        const bool spike = k.id == "counterexample";
        if (spike) k.special_node = center;
        const Scheme s(k, g);
        DiscreteField u;
        u.values.assign(static_cast<std::size_t>(g.node_count()), 0.0);
        if (spike) u.values[static_cast<std::size_t>(center)] = 1.0;
        const PropagationResult r = smp_propagation_test(s, g, u);
        py::dict d;
        d["is_subsolution"] = r.is_subsolution;
        d["constant"] = r.constant;
        d["covered"] = r.covered;
        d["interior_nodes"] = r.interior_nodes;
        return d;
      },
      py::arg("id"), py::arg("size") = 21, py::arg("spacing") = 0.1,
      "strong maximum principle probe: the zero field for conditioned kernels, "
      "the unit spike for the counterexample");

  m.def(
      "solve_dirichlet",
      [](const std::string& id, int size, double spacing, double kappa) {
        const ManifoldModel mm{2, kappa};
        const Grid2D g = make_grid(mm, size, spacing);
        const Scheme s(make_kernel(id, 2), g);
        const DiscreteField data =
            sample_field(g, [](double x, double y) { return x * x - 0.5 * y * y; });
        const SolveResult sol = solve_dirichlet(s, g, data);
        py::dict d;
        d["converged"] = sol.converged;
        d["sweeps"] = sol.sweeps;
        d["residual_sup"] = sol.residual_sup;
        d["values"] = sol.u.values;
        d["size"] = g.size;
        return d;
      },
      py::arg("id"), py::arg("size") = 21, py::arg("spacing") = 0.1, py::arg("kappa") = 0.0);
}
