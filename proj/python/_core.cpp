#include <cmath>
#include <optional>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mtq/errors.hpp"
#include "mtq/example.hpp"
#include "mtq/io.hpp"
#include "mtq/mc.hpp"

namespace py = pybind11;
using namespace mtq;

namespace {

// Hands JSON reports to Python as plain dicts.
py::object to_python(const Json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

py::array_t<double> matrix(const std::vector<ProbabilityVector>& states) {
  const std::size_t rows = states.size();
  const std::size_t cols = rows ? states.front().size() : 0;
  py::array_t<double> out({rows, cols});
  auto view = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t k = 0; k < cols; ++k) view(i, k) = states[i][k];
  }
  return out;
}

py::dict trajectory(const Trajectory& traj) {
  py::dict d;
  d["times"] = py::array_t<double>(traj.times.size(), traj.times.data());
  d["means"] = py::array_t<double>(traj.means.size(), traj.means.data());
  d["probs"] = matrix(traj.states);
  d["max_drift"] = traj.max_drift;
  d["steps"] = traj.steps;
  return d;
}

ProbabilityVector point_or_vector(std::size_t n, py::object initial) {
  if (py::isinstance<py::int_>(initial)) {
    const auto j = initial.cast<std::size_t>();
    if (j > n) throw PreconditionError("initial state must be <= n");
    return ProbabilityVector::point_mass(n, j);
  }
  return ProbabilityVector(initial.cast<std::vector<double>>());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bounds, truncation and transient analysis for M_t|M_t|S queues with catastrophes";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  py::class_<QueueModel>(m, "QueueModel")
      .def_static(
          "from_json",
          [](const std::string& text) { return model_from_json(Json::parse(text), "<python>"); },
          py::arg("text"))
      .def_static("load", &load_model, py::arg("path"))
      .def_static("example", &example_model)
      .def("to_json", [](const QueueModel& q) { return model_to_json(q).dump(); })
      .def("hash", [](const QueueModel& q) { return hex64(model_hash(q)); })
      .def_property_readonly("servers", &QueueModel::servers)
      .def_property_readonly("period", &QueueModel::period)
      .def("rates", [](const QueueModel& q, State k, double t) {
        const TransitionRates r = transition_rates(q, k, t);
        return py::make_tuple(r.birth, r.death, r.catastrophe);
      })
      .def("essential_bound", [](const QueueModel& q) { return essential_bound(q).value; })
      .def("generator", [](const QueueModel& q, std::size_t n, double t) {
        return truncated_generator(q, n, t).entries;
      });

  py::class_<WeightSequence>(m, "Weights")
      .def_static("doubling", &WeightSequence::doubling)
      .def_static("geometric", &WeightSequence::geometric, py::arg("ratio"), py::arg("d1"))
      .def_static("parse", &parse_weight_spec, py::arg("spec"))
      .def("d", &WeightSequence::d)
      .def("g", &WeightSequence::g)
      .def_property_readonly("W", &WeightSequence::W)
      .def("W_n", &WeightSequence::W_n)
      .def("log_W_n", &WeightSequence::log_W_n)
      .def("__repr__", &WeightSequence::describe);

  py::class_<Envelope>(m, "Envelope")
      .def(py::init([](double M, double a) {
             Envelope e;
             e.M = M;
             e.log_M = std::log(M);
             e.a = a;
             return e;
           }),
           py::arg("M"), py::arg("a"))
      .def_readonly("M", &Envelope::M)
      .def_readonly("a", &Envelope::a)
      .def_readonly("log_M", &Envelope::log_M);

  m.def("alpha_k", &alpha_k, py::arg("model"), py::arg("weights"), py::arg("k"), py::arg("t"));
  m.def("alpha_inf", &alpha_inf, py::arg("model"), py::arg("weights"), py::arg("t"),
        py::arg("k_eval") = kDefaultKEval);
  m.def("alpha_integral", &alpha_integral, py::arg("model"), py::arg("weights"), py::arg("s"),
        py::arg("t"), py::arg("k_eval") = kDefaultKEval);
  m.def(
      "check_weak_ergodicity",
      [](const QueueModel& q, const WeightSequence& w, std::uint64_t k_eval) {
        return to_python(to_json(check_weak_ergodicity(q, w, k_eval)));
      },
      py::arg("model"), py::arg("weights"), py::arg("k_eval") = kDefaultKEval);
  m.def(
      "fit_envelope",
      [](const QueueModel& q, const WeightSequence& w, double period, std::uint64_t k_eval) {
        return fit_envelope(q, w, period, k_eval);
      },
      py::arg("model"), py::arg("weights"), py::arg("period"), py::arg("k_eval") = kDefaultKEval);
  m.def(
      "example_envelope", [](const QueueModel& q) { return fit_envelope(example_lower_decay(q), 1.0); },
      py::arg("model"));
  m.def(
      "limiting_mean_bound",
      [](const QueueModel& q, const WeightSequence& w, double t, State k) {
        return limiting_mean_bound(q, w, t, k);
      },
      py::arg("model"), py::arg("weights"), py::arg("t"), py::arg("k"));
  m.def(
      "regime_bounds",
      [](const QueueModel& q, const std::string& mode, double eps, double t, State k) {
        return to_python(to_json(regime_bounds(q, parse_regime(mode), eps, t, k)));
      },
      py::arg("model"), py::arg("mode"), py::arg("eps"), py::arg("t"), py::arg("k"));
  m.def(
      "lognorm_oracle",
      [](const QueueModel& q, const WeightSequence& w, std::size_t n, double t) {
        const LogNormOracle o = lognorm_oracle(q, w, n, t);
        return py::make_tuple(o.gamma, o.per_column);
      },
      py::arg("model"), py::arg("weights"), py::arg("n"), py::arg("t"));

  m.def(
      "truncation_bounds",
      [](const QueueModel& q, const WeightSequence& w, const Envelope& env, std::uint64_t n,
         double t, State j, std::optional<double> L) {
        const TruncationReport r = L ? truncation_bounds(*L, w, env, n, t, j)
                                     : truncation_bounds(q, w, env, n, t, j);
        return to_python(to_json(r));
      },
      py::arg("model"), py::arg("weights"), py::arg("envelope"), py::arg("n"), py::arg("t"),
      py::arg("j"), py::arg("L") = py::none());
  m.def(
      "min_truncation_level",
      [](const QueueModel& q, const WeightSequence& w, const Envelope& env, double t_max, State j,
         double target, const std::string& criterion) {
        return min_truncation_level(q, w, env, t_max, j, target, parse_criterion(criterion)).n;
      },
      py::arg("model"), py::arg("weights"), py::arg("envelope"), py::arg("t_max"), py::arg("j"),
      py::arg("target"), py::arg("criterion") = "both");

  m.def(
      "integrate_forward",
      [](const QueueModel& q, std::size_t n, py::object initial, double t0, double t1,
         std::optional<double> h, std::size_t record_every) {
        const ProbabilityVector p0 = point_or_vector(n, initial);
        Trajectory traj;
        {
          py::gil_scoped_release release;
          traj = integrate_forward(q, n, p0, t0, t1, h ? *h : default_step(q, n), record_every);
        }
        return trajectory(traj);
      },
      py::arg("model"), py::arg("n"), py::arg("initial"), py::arg("t0"), py::arg("t1"),
      py::arg("h") = py::none(), py::arg("record_every") = kDefaultRecordEvery);
  m.def(
      "limiting_regime",
      [](const QueueModel& q, std::size_t n, double settle, double period, double tol,
         std::optional<double> h, std::size_t samples) {
        LimitingRegime lr;
        {
          py::gil_scoped_release release;
          lr = limiting_regime(q, n, settle, period, tol, h ? *h : default_step(q, n), samples);
        }
        py::dict d = trajectory(lr.trajectory);
        d["start_gap"] = lr.start_gap;
        d["period_gap"] = lr.period_gap;
        d["max_period_gap"] = lr.max_period_gap;
        return d;
      },
      py::arg("model"), py::arg("n"), py::arg("settle"), py::arg("period"), py::arg("tol"),
      py::arg("h") = py::none(), py::arg("samples") = 101);
  m.def("default_step", &default_step, py::arg("model"), py::arg("n"));

  m.def(
      "simulate",
      [](const QueueModel& q, State k0, const std::vector<double>& times, std::uint64_t paths,
         std::uint64_t seed) {
        SimulationEstimate est;
        {
          py::gil_scoped_release release;
          est = simulate_estimate(q, k0, times, paths, seed);
        }
        return to_python(to_json(est));
      },
      py::arg("model"), py::arg("k0"), py::arg("times"), py::arg("paths"), py::arg("seed"));
}
