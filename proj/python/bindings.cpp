#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hyxc/config.hpp"
#include "hyxc/fci.hpp"
#include "hyxc/field_io.hpp"
#include "hyxc/integrals.hpp"
#include "hyxc/ks_dft.hpp"
#include "hyxc/loop.hpp"
#include "hyxc/second_quant.hpp"
#include "hyxc/vqe.hpp"
#include "hyxc/xc_correction.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace py = pybind11;
using namespace hyxc;

namespace {

Field field_from_array(const Grid& grid, const py::array_t<cplx>& values, FieldKind kind) {
  auto buf = values.unchecked<1>();
  if (static_cast<std::size_t>(buf.shape(0)) != grid.size())
    throw std::invalid_argument("value count does not match grid point count");
  std::vector<cplx> v(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) v[i] = buf(i);
  return Field(grid, std::move(v), kind);
}

py::array_t<cplx> array_from_field(const Field& f) {
  py::array_t<cplx> out(std::vector<py::ssize_t>{static_cast<py::ssize_t>(f.size())});
  auto buf = out.mutable_unchecked<1>();
  for (std::size_t i = 0; i < f.size(); ++i) buf(i) = f[i];
  return out;
}

Field density_from_array(const Grid& grid, const py::array_t<double>& values) {
  auto buf = values.unchecked<1>();
  if (static_cast<std::size_t>(buf.shape(0)) != grid.size())
    throw std::invalid_argument("value count does not match grid point count");
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) v[i] = buf(i);
  return Field::density(grid, std::move(v));
}

InteractionKernel kernel_from_name(const std::string& name, double softening) {
  if (name == "soft_coulomb") return InteractionKernel::soft_coulomb(softening);
  if (name == "coulomb") return InteractionKernel::coulomb();
  throw std::invalid_argument("unknown kernel: " + name);
}

HamiltonianTensors tensors_from_arrays(const Eigen::MatrixXcd& t, const Eigen::MatrixXcd& v_ext,
                                       const py::array_t<cplx>& vee) {
  HamiltonianTensors out;
  out.m = static_cast<int>(t.rows());
  out.t = t;
  out.v_ext = v_ext;
  if (vee.size() > 0) {
    auto buf = vee.unchecked<4>();
    out.v_ee.resize(static_cast<std::size_t>(out.m) * out.m * out.m * out.m);
    for (int i = 0; i < out.m; ++i)
      for (int j = 0; j < out.m; ++j)
        for (int k = 0; k < out.m; ++k)
          for (int l = 0; l < out.m; ++l)
            out.v_ee[((static_cast<std::size_t>(i) * out.m + j) * out.m + k) * out.m + l] =
                buf(i, j, k, l);
  }
  return out;
}

py::array_t<cplx> vee_array(const HamiltonianTensors& t) {
  py::array_t<cplx> out(std::vector<py::ssize_t>{t.m, t.m, t.m, t.m});
  auto buf = out.mutable_unchecked<4>();
  for (int i = 0; i < t.m; ++i)
    for (int j = 0; j < t.m; ++j)
      for (int k = 0; k < t.m; ++k)
        for (int l = 0; l < t.m; ++l) buf(i, j, k, l) = t.vee(i, j, k, l);
  return out;
}

py::array_t<cplx> gamma_array(const RdmPair& rdms) {
  py::array_t<cplx> out(std::vector<py::ssize_t>{rdms.m, rdms.m, rdms.m, rdms.m});
  auto buf = out.mutable_unchecked<4>();
  for (int i = 0; i < rdms.m; ++i)
    for (int j = 0; j < rdms.m; ++j)
      for (int k = 0; k < rdms.m; ++k)
        for (int l = 0; l < rdms.m; ++l) buf(i, j, k, l) = rdms.gamma(i, j, k, l);
  return out;
}

py::list operator_terms(const QubitOperator& op) {
  py::list out;
  for (const auto& [word, coeff] : op.terms()) out.append(py::make_tuple(coeff, word));
  return out;
}

}  // namespace

PYBIND11_MODULE(_hyxc, m) {
  m.doc() = "grid DFT core with a density-constrained basis and a simulated quantum eigensolver";
#ifdef _OPENMP
  // Keep the embedded OpenMP runtime off numpy's thread pools; results are
  // identical (per-element parallelism only) and the workloads are desk-scale.
  omp_set_num_threads(1);
#endif

  py::class_<Grid>(m, "Grid")
      .def(py::init([](int dim, std::array<double, 3> lo, std::array<double, 3> hi, int n) {
             return Grid(dim, lo, hi, n);
           }),
           py::arg("dim"), py::arg("lo"), py::arg("hi"), py::arg("points_per_axis"))
      .def_static("line", &Grid::line, py::arg("a1"), py::arg("a2"), py::arg("n"))
      .def_property_readonly("dim", &Grid::dim)
      .def_property_readonly("points_per_axis", &Grid::points_per_axis)
      .def_property_readonly("size", &Grid::size)
      .def("spacing", &Grid::spacing)
      .def("coords", [](const Grid& g, int axis) {
        py::array_t<double> out(std::vector<py::ssize_t>{g.points_per_axis()});
        auto buf = out.mutable_unchecked<1>();
        for (int i = 0; i < g.points_per_axis(); ++i) buf(i) = g.coord(axis, i);
        return out;
      });

  m.def("integrate", [](const Grid& g, const py::array_t<cplx>& v) {
    return integrate(field_from_array(g, v, FieldKind::generic));
  });
  m.def("laplacian", [](const Grid& g, const py::array_t<cplx>& v) {
    return array_from_field(laplacian(field_from_array(g, v, FieldKind::generic)));
  });
  m.def(
      "hartree_potential",
      [](const Grid& g, const py::array_t<double>& rho, const std::string& kernel, double a) {
        return array_from_field(
            hartree_potential(density_from_array(g, rho), kernel_from_name(kernel, a)));
      },
      py::arg("grid"), py::arg("rho"), py::arg("kernel") = "soft_coulomb",
      py::arg("softening") = 1.0);

  m.def(
      "solve_ks",
      [](const Grid& g, const py::array_t<cplx>& v_eff, int n_states) {
        const KsState st = solve_ks(field_from_array(g, v_eff, FieldKind::potential), n_states);
        py::list orbitals;
        for (const auto& phi : st.orbitals) orbitals.append(array_from_field(phi));
        return py::make_tuple(st.eigenvalues, orbitals);
      },
      py::arg("grid"), py::arg("v_eff"), py::arg("n_states"));

  m.def("fill_occupations", &fill_occupations);

  m.def(
      "build_orbitals",
      [](const Grid& g, const py::array_t<double>& rho,
         const std::vector<std::array<int, 3>>& wavevectors, int n_electrons) {
        const ZmOrbitalSet basis = build_orbitals(density_from_array(g, rho), wavevectors,
                                                  n_electrons);
        py::list orbitals;
        for (const auto& phi : basis.orbitals) orbitals.append(array_from_field(phi));
        return orbitals;
      },
      py::arg("grid"), py::arg("rho"), py::arg("wavevectors"), py::arg("n_electrons"));
  m.def("default_wavevectors", &default_wavevectors, py::arg("dim"), py::arg("m"));

  m.def(
      "assemble_tensors",
      [](const Grid& g, const py::array_t<double>& rho,
         const std::vector<std::array<int, 3>>& wavevectors, int n_electrons,
         const py::array_t<cplx>& v_ext, const std::string& kernel, double softening) {
        const ZmOrbitalSet basis =
            build_orbitals(density_from_array(g, rho), wavevectors, n_electrons);
        const Field v = field_from_array(g, v_ext, FieldKind::potential);
        std::optional<InteractionKernel> k;
        if (kernel != "none") k = kernel_from_name(kernel, softening);
        const HamiltonianTensors t = assemble_tensors(basis, v, k ? &*k : nullptr);
        return py::make_tuple(t.t, t.v_ext, vee_array(t));
      },
      py::arg("grid"), py::arg("rho"), py::arg("wavevectors"), py::arg("n_electrons"),
      py::arg("v_ext"), py::arg("kernel") = "none", py::arg("softening") = 1.0);

  m.def("count_configurations", [](int m_states, int n) {
    const BigUint c = count_configurations(m_states, n);
    return py::module_::import("builtins").attr("int")(c.str());
  });
  m.def("count_configurations_scientific",
        [](int m_states, int n) { return count_configurations(m_states, n).scientific(3); });

  m.def(
      "jordan_wigner",
      [](int mode, bool dagger, int m_states) {
        return operator_terms(jordan_wigner(mode, dagger, m_states));
      },
      py::arg("mode"), py::arg("dagger"), py::arg("m"));
  m.def("build_qubit_hamiltonian",
        [](const Eigen::MatrixXcd& t, const Eigen::MatrixXcd& v_ext, const py::array_t<cplx>& vee) {
          return operator_terms(build_qubit_hamiltonian(tensors_from_arrays(t, v_ext, vee)));
        });

  m.def(
      "minimize_energy",
      [](const Eigen::MatrixXcd& t, const Eigen::MatrixXcd& v_ext, const py::array_t<cplx>& vee,
         int n_electrons, int layers, int budget, int restarts, std::uint64_t seed) {
        const HamiltonianTensors tensors = tensors_from_arrays(t, v_ext, vee);
        const Ansatz ansatz = Ansatz::hardware_efficient(tensors.m, n_electrons, layers);
        OptimizerConfig opt;
        opt.budget = budget;
        opt.restarts = restarts;
        opt.seed = seed;
        const VqeResult r = minimize_energy(tensors, ansatz, opt);
        py::dict out;
        out["energy"] = r.energy;
        out["parameters"] = r.parameters;
        out["converged"] = r.converged;
        out["rho1"] = r.rdms.rho1;
        out["gamma2"] = gamma_array(r.rdms);
        return out;
      },
      py::arg("t"), py::arg("v_ext"), py::arg("vee"), py::arg("n_electrons"),
      py::arg("layers") = 2, py::arg("budget") = 20000, py::arg("restarts") = 5,
      py::arg("seed") = 0);

  m.def(
      "fci_ground",
      [](const Eigen::MatrixXcd& t, const Eigen::MatrixXcd& v_ext, const py::array_t<cplx>& vee,
         int n_electrons) {
        const FciSolution sol = solve_ground(tensors_from_arrays(t, v_ext, vee), n_electrons);
        py::dict out;
        out["energy"] = sol.ground_energy;
        out["rho1"] = sol.rdms.rho1;
        out["gamma2"] = gamma_array(sol.rdms);
        return out;
      },
      py::arg("t"), py::arg("v_ext"), py::arg("vee"), py::arg("n_electrons"));

  m.def("run_loop", [](const std::string& config_path) {
    const LoopReport report = run_outer_loop(load_config(config_path));
    py::dict out;
    out["status"] = report.status;
    py::list iters;
    for (const auto& r : report.records) {
      py::dict it;
      it["outer_iter"] = r.outer_iter;
      it["many_body_total"] = r.energy.many_body_total;
      it["e_xc"] = r.energy.e_xc;
      it["max_abs_delta_rho"] = r.max_abs_delta_rho;
      it["gram_deviation"] = r.gram_deviation;
      it["fci_energy"] = r.fci_energy;
      iters.append(it);
    }
    out["iterations"] = iters;
    return out;
  });
}
