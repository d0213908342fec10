#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "parea/functional.hpp"
#include "parea/heisenberg.hpp"
#include "parea/io.hpp"
#include "parea/measure.hpp"
#include "parea/solver.hpp"
#include "parea/variation.hpp"
#include "parea/verify.hpp"

namespace py = pybind11;
using namespace parea;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

// nodal values as a (ny+1, nx+1) array, row j holding y = y_j
Array node_array(const ScalarField& f) {
  const GridDomain& d = f.domain();
  Array a({d.ny() + 1, d.nx() + 1});
  std::copy(f.values().begin(), f.values().end(), a.mutable_data());
  return a;
}

ScalarField field_from_array(const GridDomain& d, const Array& a) {
  if (a.ndim() != 2 || a.shape(0) != d.ny() + 1 || a.shape(1) != d.nx() + 1)
    throw std::invalid_argument("expected an array of shape (ny+1, nx+1)");
  return ScalarField(d, std::vector<double>(a.data(), a.data() + a.size()));
}

py::tuple cell_arrays(const CellField& c) {
  Array v({c.dom.ny(), c.dom.nx()});
  py::array_t<bool> m({c.dom.ny(), c.dom.nx()});
  std::copy(c.values.begin(), c.values.end(), v.mutable_data());
  std::copy(c.valid.begin(), c.valid.end(), m.mutable_data());
  return py::make_tuple(v, m);
}

VectorMeasure measure_from(const Array& weights, const Array& densities) {
  if (weights.ndim() != 1 || densities.ndim() != 2 || densities.shape(0) != weights.shape(0))
    throw std::invalid_argument("weights must be (n,) and densities (n, d)");
  return VectorMeasure(static_cast<int>(densities.shape(1)),
                       std::vector<double>(weights.data(), weights.data() + weights.size()),
                       std::vector<double>(densities.data(), densities.data() + densities.size()));
}

GraphMode parse_mode(const std::string& s) {
  if (s == "horizontal") return GraphMode::horizontal;
  if (s == "riemannian") return GraphMode::riemannian;
  throw std::invalid_argument("mode must be 'horizontal' or 'riemannian'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "p-area minimizers, variations and Heisenberg graph geometry";

  py::register_exception<SchemaError>(m, "SchemaError", PyExc_ValueError);

  py::class_<GridDomain>(m, "Grid")
      .def_static("square", &GridDomain::square, py::arg("lo"), py::arg("hi"), py::arg("n"),
                  py::arg("quadrature_order") = 4)
      .def_static("rectangle", &GridDomain::rectangle, py::arg("x0"), py::arg("x1"), py::arg("nx"), py::arg("y0"),
                  py::arg("y1"), py::arg("ny"), py::arg("quadrature_order") = 4)
      .def_property_readonly("nx", &GridDomain::nx)
      .def_property_readonly("ny", &GridDomain::ny)
      .def_property_readonly("h", &GridDomain::h)
      .def_property_readonly("quadrature_order", &GridDomain::quadrature_order)
      .def("node_coords", [](const GridDomain& d) {
        Array x({d.ny() + 1, d.nx() + 1}), y({d.ny() + 1, d.nx() + 1});
        for (int n = 0; n < d.num_nodes(); ++n) {
          x.mutable_data()[n] = d.x(d.node_i(n));
          y.mutable_data()[n] = d.y(d.node_j(n));
        }
        return py::make_tuple(x, y);
      });

  py::class_<ScalarField>(m, "Field")
      .def(py::init(&field_from_array), py::arg("grid"), py::arg("values"))
      .def_static("sample", &ScalarField::sample, py::arg("grid"), py::arg("f"))
      .def_static("zeros", &ScalarField::zeros, py::arg("grid"))
      .def_property_readonly("grid", &ScalarField::domain)
      .def_property_readonly("values", &node_array)
      .def("__add__", [](const ScalarField& a, const ScalarField& b) { return a + b; })
      .def("__sub__", [](const ScalarField& a, const ScalarField& b) { return a - b; })
      .def("__rmul__", [](const ScalarField& a, double s) { return s * a; });

  py::class_<EnergySpec>(m, "EnergySpec")
      .def_static("least_gradient", &EnergySpec::least_gradient)
      .def_static("p_area", &EnergySpec::p_area)
      .def_property_readonly("preset", &EnergySpec::preset_name);

  py::class_<SolverConfig>(m, "SolverConfig")
      .def(py::init<>())
      .def_readwrite("a_schedule", &SolverConfig::a_schedule)
      .def_readwrite("newton_tol", &SolverConfig::newton_tol)
      .def_readwrite("max_newton_iters", &SolverConfig::max_newton_iters)
      .def_readwrite("continuation_stop", &SolverConfig::continuation_stop)
      .def_property(
          "zero_start", [](const SolverConfig& c) { return c.initial_guess == InitialGuess::zero_interior; },
          [](SolverConfig& c, bool z) { c.initial_guess = z ? InitialGuess::zero_interior : InitialGuess::coons; });

  py::class_<SolveResult>(m, "SolveResult")
      .def_readonly("u", &SolveResult::u)
      .def_readonly("residual_norm", &SolveResult::residual_norm)
      .def_readonly("a_final", &SolveResult::a_final)
      .def_readonly("iterations", &SolveResult::iterations)
      .def_readonly("energy", &SolveResult::energy)
      .def_readonly("converged", &SolveResult::converged)
      .def_readonly("message", &SolveResult::message);

  m.def("energy", &energy_FH, py::arg("u"), py::arg("spec"));
  m.def(
      "solve",
      [](const ScalarField& phi, const EnergySpec& spec, const SolverConfig& cfg) {
        py::gil_scoped_release release;
        return continuation_minimize(phi.domain(), spec, phi, cfg);
      },
      py::arg("phi"), py::arg("spec"), py::arg("config") = SolverConfig{},
      "Minimize the energy with boundary values taken from phi.");
  m.def(
      "singular_set",
      [](const ScalarField& u, const EnergySpec& spec, double tol) {
        const SingularSet s = singular_set(u, spec, tol);
        py::dict d;
        d["cells"] = s.cells;
        d["threshold"] = s.threshold;
        d["measure"] = s.measure;
        return d;
      },
      py::arg("u"), py::arg("spec"), py::arg("tol") = 1.0);

  py::class_<VectorMeasure>(m, "Measure")
      .def(py::init(&measure_from), py::arg("weights"), py::arg("densities"))
      .def_property_readonly("dim", &VectorMeasure::dim)
      .def_property_readonly("total_variation", [](const VectorMeasure& v) { return total_variation(v); });
  m.def("line_energy", &line_energy, py::arg("mu"), py::arg("nu"), py::arg("eps"));
  m.def(
      "first_variation",
      [](const VectorMeasure& mu, const VectorMeasure& nu, double eps) {
        const OneSided o = first_variation_pm(mu, nu, eps);
        return py::make_tuple(o.minus, o.plus);
      },
      py::arg("mu"), py::arg("nu"), py::arg("eps"), "One-sided derivatives (minus, plus) at eps.");
  m.def("second_variation", &second_variation, py::arg("mu"), py::arg("nu"), py::arg("eps"));
  m.def("structural_identity_residual", &structural_identity_residual, py::arg("mu"), py::arg("mu2"));

  m.def(
      "graph_first_variation",
      [](const ScalarField& u, const EnergySpec& spec, const ScalarField& phi, const std::string& mode) {
        const VariationReport r = minimizer_first_variation(u, spec, DirectionField(phi), 1.0, parse_mode(mode));
        return py::make_tuple(r.Fprime_minus, r.Fprime_plus);
      },
      py::arg("u"), py::arg("spec"), py::arg("phi"), py::arg("mode") = "horizontal");
  m.def(
      "graph_second_variation",
      [](const ScalarField& u, const EnergySpec& spec, const ScalarField& phi, const std::string& mode) {
        return second_variation_graph(u, spec, DirectionField(phi), parse_mode(mode));
      },
      py::arg("u"), py::arg("spec"), py::arg("phi"), py::arg("mode") = "horizontal");

  m.def(
      "area_density",
      [](const ScalarField& u, const std::string& kind) {
        return cell_arrays(area_density_field(u, parse_graph_kind(kind)));
      },
      py::arg("u"), py::arg("kind") = "heisenberg", "Per-cell (values, valid) arrays of shape (ny, nx).");
  m.def(
      "mean_curvature",
      [](const ScalarField& u, const std::string& scheme) {
        if (scheme == "h22") return cell_arrays(mean_curvature_h22_euclidean(u));
        if (scheme == "divergence") return cell_arrays(mean_curvature_divergence(u));
        if (scheme == "p_mean") return cell_arrays(p_mean_curvature(u));
        throw std::invalid_argument("scheme must be 'h22', 'divergence' or 'p_mean'");
      },
      py::arg("u"), py::arg("scheme") = "h22");

  m.def("invariant_names", &invariant_names);
  m.def(
      "verify_json",
      [](std::uint64_t seed) {
        py::gil_scoped_release release;
        return dump_json(run_invariant_suite(seed).to_json());
      },
      py::arg("seed") = 0);
}
