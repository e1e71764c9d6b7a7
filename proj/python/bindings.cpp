#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qlock/channels.hpp"
#include "qlock/continuity.hpp"
#include "qlock/densop.hpp"
#include "qlock/experiments.hpp"
#include "qlock/measures.hpp"
#include "qlock/optim.hpp"
#include "qlock/states.hpp"

namespace py = pybind11;
using namespace qlock;

namespace {

Parties parse_parties(const std::vector<std::string>& labels) {
  Parties out;
  for (const auto& s : labels) out.push_back(party_from_string(s));
  return out;
}

std::vector<std::string> party_labels(const Parties& party) {
  std::vector<std::string> out;
  for (Party p : party) out.push_back(to_string(p));
  return out;
}

RoofObjective parse_objective(const std::string& tag) {
  const Functional f = Functional::parse(tag);
  return f.kind() == Functional::Kind::kVonNeumann ? RoofObjective::von_neumann()
                                                   : RoofObjective::renyi(f.alpha());
}

py::dict gap_row(const GapRow& r) {
  py::dict d;
  d["n"] = r.n;
  d["density_truncated"] = r.density_truncated;
  d["density_full"] = r.density_full;
  d["vn_entropy"] = r.vn_entropy;
  d["kept_mass"] = r.kept_mass;
  d["trace_distance"] = r.trace_distance;
  return d;
}

}  // namespace

PYBIND11_MODULE(_qlock, m) {
  m.doc() = "Dense density-operator toolkit for entanglement-locking experiments";

  static py::exception<Error> base_error(m, "Error");
  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<InvalidState>(m, "InvalidState", PyExc_ValueError);
  py::register_exception<DimensionCapExceeded>(m, "DimensionCapExceeded", base_error.ptr());
  py::register_exception<UnknownExperiment>(m, "UnknownExperiment", PyExc_KeyError);

  py::class_<DensityOperator>(m, "DensityOperator")
      .def(py::init([](const Matrix& matrix, const Dims& dims,
                       const std::vector<std::string>& party) {
             return DensityOperator(matrix, dims, parse_parties(party));
           }),
           py::arg("matrix"), py::arg("dims"), py::arg("party"))
      .def_static(
          "pure",
          [](const Vector& psi, const Dims& dims, const std::vector<std::string>& party) {
            return DensityOperator::pure(psi, dims, parse_parties(party));
          },
          py::arg("psi"), py::arg("dims"), py::arg("party"))
      .def_property_readonly("matrix", &DensityOperator::matrix)
      .def_property_readonly("dims", &DensityOperator::dims)
      .def_property_readonly("party",
                             [](const DensityOperator& x) { return party_labels(x.party()); })
      .def_property_readonly("dim", &DensityOperator::dim)
      .def("trace", &DensityOperator::trace)
      .def("__repr__", [](const DensityOperator& x) {
        return "<DensityOperator dim=" + std::to_string(x.dim()) + ">";
      });

  // densop
  m.def("tensor", py::overload_cast<const DensityOperator&, const DensityOperator&>(&tensor));
  m.def("partial_trace",
        [](const DensityOperator& x, const std::vector<int>& drop) {
          return partial_trace(x, drop);
        },
        py::arg("state"), py::arg("drop"));
  m.def("permute_subsystems",
        [](const DensityOperator& x, const std::vector<int>& perm) {
          return permute_subsystems(x, perm);
        },
        py::arg("state"), py::arg("perm"));
  m.def("partial_transpose",
        [](const DensityOperator& x) {
          return partial_transpose(x, BipartiteCut::from_parties(x.party())).matrix();
        },
        "Partial transpose on the B-labelled factors, as a matrix.");
  m.def("trace_norm", py::overload_cast<const Matrix&>(&trace_norm));

  // states
  m.def("bell_state", &bell_state, py::arg("d"));
  m.def("max_correlated", &max_correlated, py::arg("d"));
  m.def("locking_state",
        [](int d) { return locking_state(LockingFamilyParams::hadamard(d)); }, py::arg("d"),
        "Locking state with a Hadamard-power unitary; d a power of two.");
  m.def("hiding_pair", [](int d, int l) { return hiding_pair(d, l); }, py::arg("d"),
        py::arg("l"));
  m.def("flower_state",
        [](int d, int l, int n, double alpha) {
          return flower_state({d, l, n, alpha, FlowerForm::kSeparateBranches});
        },
        py::arg("d"), py::arg("l"), py::arg("n"), py::arg("alpha"));
  m.def("flag_mixture", &flag_mixture, py::arg("rho"), py::arg("rho_tilde"), py::arg("p"));

  // channels
  m.def("dephase_subsystem", &dephase_subsystem, py::arg("state"), py::arg("k"));
  m.def("pauli_twirl_qubit", &pauli_twirl_qubit, py::arg("state"), py::arg("k"));
  m.def("ancilla_dephasing_circuit", &ancilla_dephasing_circuit, py::arg("state"), py::arg("k"));
  m.def("ancilla_twirl_circuit", &ancilla_twirl_circuit, py::arg("state"), py::arg("k"));

  // measures
  m.def("von_neumann_entropy", &von_neumann_entropy);
  m.def("renyi_entropy", py::overload_cast<const DensityOperator&, double>(&renyi_entropy),
        py::arg("state"), py::arg("alpha"));
  m.def("relative_entropy", &relative_entropy);
  m.def("log_negativity", py::overload_cast<const DensityOperator&>(&log_negativity));
  m.def("ppt_check", [](const DensityOperator& x) {
    const PptResult r = ppt_check(x);
    return py::make_tuple(r.is_ppt, r.min_eigenvalue);
  });
  m.def("concurrence_two_qubit", &concurrence_two_qubit);
  m.def("eof_two_qubit", &eof_two_qubit);
  m.def("mixing_gap", [](const std::vector<std::pair<double, DensityOperator>>& members) {
    Ensemble ens;
    for (const auto& [p, s] : members) ens.push_back({p, s});
    return mixing_gap(ens);
  });

  // optim
  m.def(
      "convex_roof_upper",
      [](const DensityOperator& x, const std::string& objective, int restarts, int iterations,
         std::uint64_t seed, int ensemble_size) {
        RoofSettings s;
        s.objective = parse_objective(objective);
        s.restarts = restarts;
        s.iterations = iterations;
        s.seed = seed;
        s.ensemble_size = ensemble_size;
        RoofResult r;
        {
          py::gil_scoped_release release;
          r = convex_roof_upper(x, s);
        }
        py::dict d;
        d["value"] = r.value;
        d["converged"] = r.converged;
        d["reconstruction_error"] = r.reconstruction_error;
        std::vector<double> probs;
        for (const auto& mem : r.ensemble) probs.push_back(mem.probability);
        d["probabilities"] = probs;
        return d;
      },
      py::arg("state"), py::arg("objective") = "von_neumann", py::arg("restarts") = 16,
      py::arg("iterations") = 500, py::arg("seed") = 42, py::arg("ensemble_size") = 0);
  m.def(
      "rel_ent_ppt",
      [](const DensityOperator& x, int max_iterations, double tolerance) {
        RexSettings s;
        s.max_iterations = max_iterations;
        s.tolerance = tolerance;
        RexResult r = [&] {
          py::gil_scoped_release release;
          return rel_ent_ppt(x, s);
        }();
        py::dict d;
        d["value"] = r.value;
        d["closest_state"] = r.closest_state;
        d["converged"] = r.converged;
        d["iterations"] = r.iterations;
        return d;
      },
      py::arg("state"), py::arg("max_iterations") = 5000, py::arg("tolerance") = 1e-8);

  // continuity
  m.def("araki_moriya", [](const DensityOperator& a, const DensityOperator& b) {
    const AMDecomposition am = araki_moriya(a, b);
    py::dict d;
    d["sigma"] = am.sigma;
    d["gamma1"] = am.gamma1;
    d["gamma2"] = am.gamma2;
    d["delta"] = am.delta;
    return d;
  });
  m.def(
      "typical_truncation",
      [](const std::vector<double>& base, int n, double epsilon, double alpha) {
        const TypicalSpectrum t = typical_truncation(Spectrum(base), n, epsilon);
        py::dict d;
        d["kept_mass"] = t.kept_mass;
        d["levels"] = t.levels.size();
        d["truncated_renyi_density"] = t.truncated_renyi_density(alpha);
        d["full_renyi_density"] = t.full_renyi_density(alpha);
        d["trace_distance"] = t.trace_distance();
        return d;
      },
      py::arg("base"), py::arg("n"), py::arg("epsilon"), py::arg("alpha") = 0.5);
  m.def(
      "renyi_gap_curve",
      [](const std::vector<double>& base, double alpha, const std::vector<int>& n_grid,
         double epsilon) {
        py::list rows;
        for (const auto& r : renyi_gap_curve(Spectrum(base), alpha, n_grid, epsilon)) {
          rows.append(gap_row(r));
        }
        return rows;
      },
      py::arg("base"), py::arg("alpha"), py::arg("n_grid"), py::arg("epsilon"));

  // experiments
  m.def("list_experiments", [] {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& e : experiment_registry()) out.emplace_back(e.name, e.summary);
    return out;
  });
  m.def(
      "run_experiment_json",
      [](const std::string& name, const std::string& params_json, bool include_timing) {
        const ExperimentParams p =
            ExperimentParams::from_json(nlohmann::json::parse(params_json));
        py::gil_scoped_release release;
        return run_experiment(name, p).to_json(include_timing).dump();
      },
      py::arg("name"), py::arg("params_json") = "{}", py::arg("include_timing") = false);
}
