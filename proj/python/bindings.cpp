#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sbmdyn/analysis.hpp"
#include "sbmdyn/commands.hpp"
#include "sbmdyn/dmrg.hpp"
#include "sbmdyn/error.hpp"
#include "sbmdyn/oracles.hpp"
#include "sbmdyn/shift.hpp"
#include "sbmdyn/thermal.hpp"

namespace py = pybind11;
using namespace sbmdyn;

namespace {

struct PyTrajectory {
    std::vector<double> t, sigma_z, norm, energy, trunc_err;
};

PyTrajectory to_py(const TrajectoryRecord& r) { return {r.times, r.sigma_z, r.norm, r.energy, r.trunc_err}; }

PyTrajectory run_evolve(const ModelParams& p, double t_final, bool prepared, bool shifted, double epsilon,
                        int observe_every) {
    p.validate();
    if (!prepared) {
        MpsState s = init_product_state(p, Spin::up);
        return to_py(evolve(s, p, t_final, observe_every));
    }
    DynamicsOptions o;
    o.bath.shifted = shifted;
    o.bath.dmrg.bond_cap = p.bond_cap;
    o.epsilon = epsilon;
    DynamicsInitial init = prepare_dynamics_initial(p, o);
    const Mpo mpo = build_mpo(init.hamiltonian);
    EvolveOptions eo;
    eo.t_final = t_final;
    eo.observe_every = observe_every;
    eo.step.bond_cap = p.bond_cap;
    eo.step.obb_dim = p.obb_dim;
    return to_py(evolve(init.state, init.gates, &mpo, eo));
}

}  // namespace

PYBIND11_MODULE(_sbmdyn, m) {
    m.doc() = "Spin-boson MPS/TEBD simulator";

    py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<NotFoundError>(m, "NotFoundError", PyExc_LookupError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    py::class_<ModelParams>(m, "ModelParams")
        .def(py::init<>())
        .def_readwrite("delta", &ModelParams::delta)
        .def_readwrite("bias", &ModelParams::bias)
        .def_readwrite("alpha", &ModelParams::alpha)
        .def_readwrite("s", &ModelParams::s)
        .def_readwrite("omega_c", &ModelParams::omega_c)
        .def_readwrite("chain_length", &ModelParams::chain_length)
        .def_readwrite("fock_dim", &ModelParams::fock_dim)
        .def_readwrite("obb_dim", &ModelParams::obb_dim)
        .def_readwrite("bond_cap", &ModelParams::bond_cap)
        .def_readwrite("dt", &ModelParams::dt)
        .def_readwrite("beta", &ModelParams::beta)
        .def_readwrite("mu", &ModelParams::mu)
        .def("validate", &ModelParams::validate, py::arg("purified") = false);

    py::class_<ChainCoefficients>(m, "ChainCoefficients")
        .def_readonly("eta1", &ChainCoefficients::eta1)
        .def_readonly("omega", &ChainCoefficients::omega)
        .def_readonly("hop", &ChainCoefficients::hop)
        .def("tridiagonal", &ChainCoefficients::tridiagonal);

    py::class_<PyTrajectory>(m, "Trajectory")
        .def_readonly("t", &PyTrajectory::t)
        .def_readonly("sigma_z", &PyTrajectory::sigma_z)
        .def_readonly("norm", &PyTrajectory::norm)
        .def_readonly("energy", &PyTrajectory::energy)
        .def_readonly("trunc_err", &PyTrajectory::trunc_err);

    m.def("spectral_density", &spectral_density, py::arg("omega"), py::arg("params"));
    m.def("chain_coefficients", &chain_coefficients, py::arg("params"));
    m.def(
        "chain_to_star",
        [](const ChainCoefficients& c) {
            const StarBath b = chain_to_star(c);
            return py::make_tuple(b.frequencies, b.transform);
        },
        py::arg("chain"), "Returns (frequencies, transform).");

    m.def("shift_matrix", &shift_matrix, py::arg("x"), py::arg("d"));
    m.def("unitarity_defect", &unitarity_defect, py::arg("u"));

    m.def("delta_r_zero_T", &delta_r_zero_T, py::arg("delta"), py::arg("omega_c"), py::arg("alpha"));
    m.def("delta_r_finite_T", &delta_r_finite_T, py::arg("delta"), py::arg("omega_c"), py::arg("alpha"),
          py::arg("beta"));
    m.def("displacement_oracle", &displacement_oracle, py::arg("chain"), py::arg("source") = 0.5);

    m.def(
        "dense_evolve",
        [](const ModelParams& p, double t_final, double dt_obs) {
            const DenseTrajectory d = dense_evolve(p, t_final, dt_obs);
            return py::make_tuple(d.times, d.sigma_z);
        },
        py::arg("params"), py::arg("t_final"), py::arg("dt_obs"), "Returns (times, sigma_z).");
    m.def(
        "dense_thermal",
        [](const ModelParams& p, double beta, double mu) {
            const DenseThermal d = dense_thermal(p, beta, mu);
            return py::make_tuple(d.occupations, d.positions, d.partition);
        },
        py::arg("params"), py::arg("beta"), py::arg("mu"), "Returns (occupations, positions, Z).");

    m.def(
        "polarized_bath_shifts",
        [](const ModelParams& p, bool shifted) {
            PolarizedBathOptions o;
            o.shifted = shifted;
            o.dmrg.bond_cap = p.bond_cap;
            const PolarizedBath b = polarized_bath_state(p, o);
            std::vector<double> physical;
            for (int k = 0; k < b.state.size(); ++k) physical.push_back(expect_position(b.state, k));
            return py::make_tuple(b.shifts.shifts, physical, b.energy);
        },
        py::arg("params"), py::arg("shifted") = true,
        "Frozen-spin bath ground state: (frame shifts, physical <x_k>, energy).");

    m.def("evolve", &run_evolve, py::arg("params"), py::arg("t_final"), py::arg("prepared") = false,
          py::arg("shifted") = true, py::arg("epsilon") = 0.1, py::arg("observe_every") = 1,
          "Real-time trajectory from a vacuum bath, or from the polarized bath when prepared=True.");

    m.def(
        "thermal_occupations",
        [](const ModelParams& p, double beta, double mu) {
            const MpsState s = thermal_state(p, beta, mu);
            std::vector<double> n, x;
            for (int k = 1; k < s.size(); ++k) {
                n.push_back(expect_number(s, k));
                x.push_back(expect_position(s, k));
            }
            return py::make_tuple(n, x);
        },
        py::arg("params"), py::arg("beta"), py::arg("mu"), "Purified thermal state: (<n_k>, <x_k>).");

    m.def(
        "first_local_minimum",
        [](const std::vector<double>& t, const std::vector<double>& v) {
            const LocalMinimum lm = first_local_minimum(t, v);
            return py::make_tuple(lm.t_s, lm.sigma_m);
        },
        py::arg("t"), py::arg("values"));
    m.def(
        "n_eff_fit",
        [](const std::vector<std::pair<double, double>>& pts) {
            const LogFit f = n_eff_fit(pts);
            return py::make_tuple(f.a, f.b);
        },
        py::arg("points"), "Least-squares (a, b) for sigma = a ln N + b.");
    m.def(
        "classify_dynamics",
        [](const std::vector<double>& t, const std::vector<double>& v, int n_osc, double hysteresis,
           double cv_cutoff, double t_skip) {
            ClassifierOptions o{n_osc, hysteresis, cv_cutoff, t_skip};
            return to_string(classify_dynamics(t, v, o).label);
        },
        py::arg("t"), py::arg("values"), py::arg("n_osc") = 6, py::arg("hysteresis") = 0.02,
        py::arg("cv_cutoff") = 0.2, py::arg("t_skip") = 20.0);
    m.def(
        "resonance_peak",
        [](const RealVector& omega, const RealVector& n, const RealVector& n0) {
            return resonance_peak(ModeOccupations{omega, n, n0});
        },
        py::arg("omega_p"), py::arg("n_p"), py::arg("n0_p"));

    m.def(
        "run_config",
        [](const std::string& json_text) {
            const RunConfig cfg = config_from_json(nlohmann::json::parse(json_text));
            return run_command(cfg);
        },
        py::arg("config_json"), "Runs a JSON configuration like the command-line driver; returns the output path.");
}
