#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "tailgate/error.hpp"
#include "tailgate/experiment.hpp"
#include "tailgate/stable_laws.hpp"

namespace py = pybind11;
using namespace tailgate;

namespace {

SampleSet to_samples(const py::object& xs) {
  // Accepts a flat sequence of floats or a sequence of equal-length rows.
  std::vector<std::vector<double>> rows;
  for (const auto& item : xs) {
    if (py::isinstance<py::sequence>(item) && !py::isinstance<py::str>(item))
      rows.push_back(item.cast<std::vector<double>>());
    else
      rows.push_back({item.cast<double>()});
  }
  return SampleSet::from_rows(rows);
}

py::object from_samples(const SampleSet& s) {
  if (s.dim() == 1) return py::cast(s.flat());
  return py::cast(s.rows());
}

Batch to_batch(const std::vector<std::vector<double>>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw Error("batch: xs and ys differ in length");
  return {SampleSet::from_rows(xs), ys};
}

py::dict outcome_dict(const RunOutcome& r) {
  auto trace = [](const std::vector<TracePoint>& t) {
    py::list out;
    for (const auto& p : t) out.append(py::make_tuple(p.t, p.value));
    return out;
  };
  py::dict d;
  d["final_w"] = r.final_w;
  d["tail_average"] = r.tail_average;
  d["recovery_error_trace"] = trace(r.recovery_error_trace);
  d["classification_error_trace"] = trace(r.classification_error_trace);
  d["alg1_on_mixture"] = r.alg1_on_mixture;
  return d;
}

TrainConfig train_config(double eta, std::size_t batch, std::size_t iters,
                         std::size_t tail_window, const std::string& variant,
                         const std::string& sampler, std::size_t trace_stride) {
  TrainConfig cfg;
  cfg.eta = eta;
  cfg.batch = batch;
  cfg.iters = iters;
  cfg.tail_window = tail_window;
  cfg.variant = parse_variant(variant);
  cfg.sampler = parse_sampler(sampler);
  cfg.trace_stride = trace_stride;
  return cfg;
}

py::dict result_dict(const EnsembleResult& r) {
  py::dict d;
  d["alpha"] = r.estimate.alpha;
  d["inv_alpha"] = r.estimate.inv_alpha;
  d["k1"] = r.estimate.k1;
  d["k2"] = r.estimate.k2;
  d["n_used"] = r.estimate.n_used;
  d["per_run_norms"] = r.per_run_norms;
  d["convergence"] = r.convergence;
  d["max_tail_change"] = r.max_tail_change;
  return d;
}

}  // namespace

PYBIND11_MODULE(_tailgate, m) {
  m.doc() = "Tail-index estimation for ReLU-gate SGD iterates";

  static py::exception<Error> error(m, "Error", PyExc_RuntimeError);
  static py::exception<ConfigError> config_error(m, "ConfigError", error.ptr());
  static py::exception<ZeroNormError> zero_norm_error(m, "ZeroNormError", error.ptr());
  static py::exception<NonPositiveEstimateError> non_positive_error(
      m, "NonPositiveEstimateError", error.ptr());
  static py::exception<DivergenceError> divergence_error(m, "DivergenceError", error.ptr());
  static py::exception<EnsembleError> ensemble_error(m, "EnsembleError", error.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ConfigError& e) {
      py::set_error(config_error, e.what());
    } catch (const ZeroNormError& e) {
      py::set_error(zero_norm_error, e.what());
    } catch (const NonPositiveEstimateError& e) {
      py::set_error(non_positive_error, e.what());
    } catch (const DivergenceError& e) {
      py::set_error(divergence_error, e.what());
    } catch (const EnsembleError& e) {
      py::set_error(ensemble_error, e.what());
    } catch (const Error& e) {
      py::set_error(error, e.what());
    }
  });

  // Stable laws.
  m.def("sas_characteristic",
        [](double alpha, double sigma, double t) { return sas_characteristic({alpha, sigma}, t); },
        py::arg("alpha"), py::arg("sigma"), py::arg("t"));
  m.def("sample_sas",
        [](double alpha, double sigma, std::size_t n, std::uint64_t seed) {
          Rng rng = make_rng(seed);
          return sample_sas({alpha, sigma}, n, rng);
        },
        py::arg("alpha"), py::arg("sigma") = 1.0, py::arg("n"), py::arg("seed") = 0,
        py::call_guard<py::gil_scoped_release>());
  m.def("ks_two_sample_statistic",
        [](const std::vector<double>& a, const std::vector<double>& b) {
          return ks_two_sample_statistic(a, b);
        },
        py::arg("a"), py::arg("b"));
  m.def("ks_critical_value", &ks_critical_value, py::arg("level"), py::arg("n"), py::arg("m"));
  m.def("stability_ks_statistic",
        [](const std::vector<double>& xs, std::size_t m, double alpha, std::uint64_t seed) {
          Rng rng = make_rng(seed);
          const StabilityCheck c = stability_check(xs, m, alpha, rng);
          return py::make_tuple(c.statistic, c.n_groups);
        },
        py::arg("samples"), py::arg("m"), py::arg("alpha"), py::arg("seed") = 0,
        "Returns (statistic, n_groups).");

  // Estimator.
  m.def("block_sums",
        [](const py::object& xs, std::size_t k1, std::size_t k2) {
          return from_samples(block_sums(to_samples(xs), {k1, k2}));
        },
        py::arg("xs"), py::arg("k1"), py::arg("k2"));
  m.def("hill_inverse_alpha",
        [](const py::object& xs, std::size_t k1, std::size_t k2) {
          return hill_inverse_alpha(to_samples(xs), {k1, k2});
        },
        py::arg("xs"), py::arg("k1") = 25, py::arg("k2") = 25);
  m.def("hill_alpha",
        [](const py::object& xs, std::size_t k1, std::size_t k2) {
          return hill_alpha(to_samples(xs), {k1, k2}).alpha;
        },
        py::arg("xs"), py::arg("k1") = 25, py::arg("k2") = 25);

  // ReLU gate.
  m.def("relu", &relu, py::arg("z"));
  m.def("alg1_gradient",
        [](const std::vector<double>& w, const std::vector<std::vector<double>>& xs,
           const std::vector<double>& ys) { return alg1_gradient(w, to_batch(xs, ys)); },
        py::arg("w"), py::arg("xs"), py::arg("ys"));
  m.def("sgd_gradient",
        [](const std::vector<double>& w, const std::vector<std::vector<double>>& xs,
           const std::vector<double>& ys) { return sgd_gradient(w, to_batch(xs, ys)); },
        py::arg("w"), py::arg("xs"), py::arg("ys"));
  m.def("classification_error",
        [](const std::vector<double>& w, const std::vector<double>& mean, double sigma0,
           double sigma1, std::size_t n_mc, std::uint64_t seed) {
          Rng rng = make_rng(seed);
          return classification_error(w, MixtureTask{mean, sigma0, sigma1}, n_mc, rng);
        },
        py::arg("w"), py::arg("mean"), py::arg("sigma0") = 1.0, py::arg("sigma1") = 2.0,
        py::arg("n_mc") = 4000, py::arg("seed") = 0);
  m.def("train_realizable",
        [](const std::vector<double>& w_star, const std::vector<double>& w_init, double eta,
           std::size_t batch, std::size_t iters, std::size_t tail_window,
           const std::string& variant, const std::string& sampler, std::size_t trace_stride,
           std::uint64_t seed) {
          const TrainConfig cfg =
              train_config(eta, batch, iters, tail_window, variant, sampler, trace_stride);
          Rng rng = make_rng(seed);
          RunOutcome out;
          {
            py::gil_scoped_release release;
            out = train_run(RealizableTask{w_star}, cfg, w_init, rng);
          }
          return outcome_dict(out);
        },
        py::arg("w_star"), py::arg("w_init"), py::arg("eta") = 0.005, py::arg("batch") = 32,
        py::arg("iters") = 8000, py::arg("tail_window") = 1000, py::arg("variant") = "sgd",
        py::arg("sampler") = "projected", py::arg("trace_stride") = 100, py::arg("seed") = 0);

  // Ensembles.
  m.def("realizable_ensemble",
        [](std::size_t dim, double eta, std::size_t batch, std::size_t k1, std::size_t k2,
           std::size_t iters, std::size_t tail_window, const std::string& variant,
           std::uint64_t seed, const std::string& sampler, std::size_t workers) {
          EnsembleConfig cfg;
          cfg.k1 = k1;
          cfg.k2 = k2;
          cfg.master_seed = seed;
          cfg.task = RealizableTemplate{dim};
          cfg.train = train_config(eta, batch, iters, tail_window, variant, sampler, iters);
          cfg.workers = workers;
          EnsembleResult r;
          {
            py::gil_scoped_release release;
            r = run_realizable_ensemble(cfg);
          }
          return result_dict(r);
        },
        py::arg("dim") = 100, py::arg("eta") = 0.005, py::arg("batch") = 32, py::arg("k1") = 25,
        py::arg("k2") = 25, py::arg("iters") = 8000, py::arg("tail_window") = 1000,
        py::arg("variant") = "sgd", py::arg("seed") = 0, py::arg("sampler") = "projected",
        py::arg("workers") = 0);

  // Configs and experiments.
  m.def("parse_config",
        [](const std::filesystem::path& path, std::optional<std::string> kind) {
          std::optional<ExperimentKind> k;
          if (kind) k = parse_kind(*kind);
          return to_json(parse_config(path, k));
        },
        py::arg("path"), py::arg("kind") = py::none(),
        "Validated config with every default filled in, as a JSON string.");
  m.def("run_experiment",
        [](const std::filesystem::path& config, std::optional<std::string> kind,
           std::optional<std::uint64_t> seed, std::optional<std::filesystem::path> out,
           bool ci_scale) {
          std::optional<ExperimentKind> k;
          if (kind) k = parse_kind(*kind);
          ExperimentSpec spec = parse_config(config, k);
          if (seed) spec.seed = *seed;
          if (out) spec.out = *out;
          if (ci_scale) apply_ci_scale(spec);
          validate(spec);
          std::ostringstream log;
          {
            py::gil_scoped_release release;
            run_experiment(spec, log);
          }
          return spec.out;
        },
        py::arg("config"), py::arg("kind") = py::none(), py::arg("seed") = py::none(),
        py::arg("out") = py::none(), py::arg("ci_scale") = false,
        "Runs the experiment a config describes and returns the CSV path.");
}
