#include "tailgate/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "tailgate/error.hpp"

namespace tailgate {

using nlohmann::json;

namespace {

constexpr const char* kKinds[] = {"validate-estimator", "realizable-sweep",
                                  "classification-sweep", "single-run",
                                  "stability-check"};

std::string predictor_name(Predictor p) {
  return p == Predictor::literal ? "literal" : "positive_preactivation";
}

bool is_sweep(ExperimentKind k) {
  return k == ExperimentKind::realizable_sweep ||
         k == ExperimentKind::classification_sweep;
}

// Kind-dependent defaults, applied before any key is read.
ExperimentSpec defaults_for(ExperimentKind kind) {
  ExperimentSpec s;
  s.kind = kind;
  switch (kind) {
    case ExperimentKind::classification_sweep:
      s.task = TaskKind::mixture;
      s.dims = {8};
      s.batch = {10};
      s.k1 = s.k2 = 10;
      s.tail_window = 500;
      break;
    case ExperimentKind::validate_estimator:
      s.k1 = s.k2 = 100;
      s.n_samples = 10000;
      break;
    case ExperimentKind::stability_check:
      s.n_samples = 100000;
      break;
    default:
      break;
  }
  return s;
}

class Reader {
 public:
  explicit Reader(const json& doc) : doc_(doc) {
    if (!doc_.is_object()) throw ConfigError("<root>", "config must be a JSON object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return doc_.contains(key);
  }

  std::string string(const std::string& key) {
    const auto& v = doc_.at(key);
    if (!v.is_string()) throw ConfigError(key, "expected a string");
    return v.get<std::string>();
  }

  double real(const json& v, const std::string& key) {
    if (!v.is_number()) throw ConfigError(key, "expected a number");
    return v.get<double>();
  }
  double real(const std::string& key) { return real(doc_.at(key), key); }

  std::uint64_t count(const json& v, const std::string& key) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer()) {
      if (v.get<std::int64_t>() < 0) throw ConfigError(key, "must be non-negative");
      return static_cast<std::uint64_t>(v.get<std::int64_t>());
    }
    if (v.is_number_float()) {
      const double d = v.get<double>();
      if (d >= 0.0 && d == std::floor(d) && d < 1.8e19)
        return static_cast<std::uint64_t>(d);
    }
    throw ConfigError(key, "expected a non-negative integer");
  }
  std::uint64_t count(const std::string& key) { return count(doc_.at(key), key); }

  // A scalar or an array of scalars.
  template <class T, class F>
  std::vector<T> list(const std::string& key, F read_one) {
    const auto& v = doc_.at(key);
    std::vector<T> out;
    if (v.is_array()) {
      if (v.empty()) throw ConfigError(key, "list must not be empty");
      for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(static_cast<T>(
            read_one(v[i], key + "[" + std::to_string(i) + "]")));
    } else {
      out.push_back(static_cast<T>(read_one(v, key)));
    }
    return out;
  }

  void reject_unknown() const {
    for (const auto& [key, _] : doc_.items())
      if (!seen_.count(key)) throw ConfigError(key, "unknown key");
  }

 private:
  const json& doc_;
  std::set<std::string> seen_;
};

template <class T>
void require_increasing(const std::vector<T>& v, const std::string& key) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1]))
      throw ConfigError(key + "[" + std::to_string(i) + "]",
                        "values must be strictly increasing");
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  return kKinds[static_cast<int>(kind)];
}

ExperimentKind parse_kind(const std::string& s) {
  for (int i = 0; i < 5; ++i)
    if (s == kKinds[i]) return static_cast<ExperimentKind>(i);
  throw Error("unknown experiment kind '" + s + "'");
}

ExperimentSpec parse_config_text(const std::string& json_text,
                                 std::optional<ExperimentKind> kind,
                                 const std::string& default_name) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("invalid JSON: ") + e.what());
  }
  Reader r(doc);

  const bool file_has_kind = r.has("kind");
  if (!kind && !file_has_kind) throw ConfigError("kind", "missing required field");
  ExperimentKind resolved = kind.value_or(ExperimentKind::realizable_sweep);
  if (file_has_kind) {
    ExperimentKind in_file;
    try {
      in_file = parse_kind(r.string("kind"));
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError("kind", e.what());
    }
    if (kind && *kind != in_file)
      throw ConfigError("kind", "file says '" + to_string(in_file) +
                                    "' but the command is '" +
                                    to_string(*kind) + "'");
    resolved = in_file;
  }

  ExperimentSpec s = defaults_for(resolved);
  s.name = default_name;

  auto as_real = [&](const json& v, const std::string& k) { return r.real(v, k); };
  auto as_count = [&](const json& v, const std::string& k) { return r.count(v, k); };
  auto wrap = [](const std::string& key, auto&& fn) {
    try {
      return fn();
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError(key, e.what());
    }
  };

  if (r.has("name")) s.name = r.string("name");
  if (r.has("task")) {
    const std::string t = r.string("task");
    if (t == "realizable") s.task = TaskKind::realizable;
    else if (t == "mixture") s.task = TaskKind::mixture;
    else throw ConfigError("task", "expected 'realizable' or 'mixture', got '" + t + "'");
    if (s.task == TaskKind::mixture && resolved == ExperimentKind::single_run) {
      const auto d = defaults_for(ExperimentKind::classification_sweep);
      s.dims = d.dims;
      s.batch = d.batch;
      s.tail_window = d.tail_window;
    }
  }
  if (r.has("dims")) s.dims = r.list<std::size_t>("dims", as_count);
  if (r.has("eta")) s.eta = r.list<double>("eta", as_real);
  if (r.has("batch")) s.batch = r.list<std::size_t>("batch", as_count);
  if (r.has("axis")) s.axis = wrap("axis", [&] { return parse_axis(r.string("axis")); });
  if (r.has("variant"))
    s.variant = wrap("variant", [&] { return parse_variant(r.string("variant")); });
  if (r.has("k1")) s.k1 = r.count("k1");
  if (r.has("k2")) s.k2 = r.count("k2");
  if (r.has("iters")) s.iters = r.count("iters");
  if (r.has("tail_window")) s.tail_window = r.count("tail_window");
  if (r.has("seed")) s.seed = r.count("seed");
  if (r.has("convergence_gate")) s.convergence_gate = r.real("convergence_gate");
  if (r.has("saturation_tolerance"))
    s.saturation_tolerance = r.real("saturation_tolerance");
  if (r.has("trace_stride")) s.trace_stride = r.count("trace_stride");
  if (r.has("n_mc")) s.n_mc = r.count("n_mc");
  if (r.has("predictor")) {
    const std::string p = r.string("predictor");
    if (p == "positive_preactivation") s.predictor = Predictor::positive_preactivation;
    else if (p == "literal") s.predictor = Predictor::literal;
    else throw ConfigError("predictor", "expected 'positive_preactivation' or 'literal'");
  }
  if (r.has("sampler"))
    s.sampler = wrap("sampler", [&] { return parse_sampler(r.string("sampler")); });
  if (r.has("mean_scale")) s.mean_scale = r.real("mean_scale");
  if (r.has("sigma0")) s.sigma0 = r.real("sigma0");
  if (r.has("sigma1")) s.sigma1 = r.real("sigma1");
  if (r.has("alphas")) s.alphas = r.list<double>("alphas", as_real);
  if (r.has("sigma")) s.sigma = r.real("sigma");
  if (r.has("n_samples")) s.n_samples = r.count("n_samples");
  if (r.has("seeds")) s.seeds = r.count("seeds");
  if (r.has("ms")) s.ms = r.list<std::size_t>("ms", as_count);
  if (r.has("level")) s.level = r.real("level");
  if (r.has("out")) s.out = r.string("out");
  r.reject_unknown();

  if (s.out.empty()) s.out = s.name + ".csv";
  if (is_sweep(s.kind) && !s.axis) {
    const bool many_d = s.dims.size() > 1;
    const bool many_b = s.batch.size() > 1;
    const bool many_e = s.eta.size() > 1;
    if (many_d + many_b + many_e > 1)
      throw ConfigError("axis", "more than one of dims, batch, eta has several "
                                "values; only the swept one may");
    s.axis = many_d ? Axis::dimension : many_e ? Axis::eta : Axis::batch;
  }
  validate(s);
  return s;
}

ExperimentSpec parse_config(const std::filesystem::path& path,
                            std::optional<ExperimentKind> kind) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open config '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), kind, path.stem().string());
}

void validate(const ExperimentSpec& s) {
  if (s.name.empty()) throw ConfigError("name", "must not be empty");
  if (s.out.empty()) throw ConfigError("out", "must not be empty");
  if (s.k1 < 2) throw ConfigError("k1", "must satisfy k1 >= 2, got " + std::to_string(s.k1));
  if (s.k2 < 1) throw ConfigError("k2", "must satisfy k2 >= 1, got " + std::to_string(s.k2));

  auto each = [](const auto& v, const std::string& key, auto ok, const std::string& rule) {
    for (std::size_t i = 0; i < v.size(); ++i)
      if (!ok(v[i]))
        throw ConfigError(v.size() == 1 ? key : key + "[" + std::to_string(i) + "]", rule);
  };

  if (s.kind == ExperimentKind::validate_estimator ||
      s.kind == ExperimentKind::stability_check) {
    if (s.alphas.empty()) throw ConfigError("alphas", "list must not be empty");
    each(s.alphas, "alphas", [](double a) { return a > 0.0 && a <= 2.0; },
         "must lie in (0, 2]");
    if (!(s.sigma > 0.0) || !std::isfinite(s.sigma))
      throw ConfigError("sigma", "must be positive");
    if (s.seeds < 1) throw ConfigError("seeds", "must be >= 1");
    if (s.kind == ExperimentKind::validate_estimator &&
        s.n_samples < s.k1 * s.k2)
      throw ConfigError("n_samples", "must be at least k1*k2 = " +
                                         std::to_string(s.k1 * s.k2));
    if (s.kind == ExperimentKind::stability_check) {
      if (s.ms.empty()) throw ConfigError("ms", "list must not be empty");
      each(s.ms, "ms", [](std::size_t m) { return m >= 2; }, "must be >= 2");
      const std::size_t m_max = *std::max_element(s.ms.begin(), s.ms.end());
      if (s.n_samples < m_max * 200)
        throw ConfigError("n_samples", "must be at least 200 * max(ms) = " +
                                           std::to_string(m_max * 200));
      if (!(s.level > 0.0 && s.level < 1.0))
        throw ConfigError("level", "must lie in (0, 1)");
    }
    return;
  }

  each(s.dims, "dims", [](std::size_t d) { return d >= 1; }, "must be >= 1");
  each(s.batch, "batch", [](std::size_t b) { return b >= 1; }, "must be >= 1");
  each(s.eta, "eta", [](double e) { return e >= 0.0 && std::isfinite(e); },
       "must be finite and >= 0");
  if (s.iters < 1) throw ConfigError("iters", "must be >= 1");
  if (s.tail_window < 1 || s.tail_window > s.iters)
    throw ConfigError("tail_window", "must lie in [1, iters]");
  if (!(s.convergence_gate > 0.0))
    throw ConfigError("convergence_gate", "must be positive");
  if (!(s.saturation_tolerance > 0.0))
    throw ConfigError("saturation_tolerance", "must be positive");
  if (s.trace_stride < 1) throw ConfigError("trace_stride", "must be >= 1");
  if (s.n_mc < 1) throw ConfigError("n_mc", "must be >= 1");

  if (s.task == TaskKind::mixture) {
    if (!(s.mean_scale > 0.0) || !std::isfinite(s.mean_scale))
      throw ConfigError("mean_scale", "must be positive");
    if (!(s.sigma0 > 0.0)) throw ConfigError("sigma0", "must be positive");
    if (!(s.sigma1 > 0.0)) throw ConfigError("sigma1", "must be positive");
    if (s.sigma0 == s.sigma1)
      throw ConfigError("sigma1", "must differ from sigma0");
  }
  if (s.kind == ExperimentKind::realizable_sweep && s.task != TaskKind::realizable)
    throw ConfigError("task", "realizable-sweep needs task 'realizable'");
  if (s.kind == ExperimentKind::classification_sweep) {
    if (s.task != TaskKind::mixture)
      throw ConfigError("task", "classification-sweep needs task 'mixture'");
    if (s.variant != Variant::sgd)
      throw ConfigError("variant", "classification ensembles run sgd only");
  }

  if (s.kind == ExperimentKind::single_run) {
    if (s.dims.size() != 1) throw ConfigError("dims", "single-run takes one value");
    if (s.batch.size() != 1) throw ConfigError("batch", "single-run takes one value");
    if (s.eta.size() != 1) throw ConfigError("eta", "single-run takes one value");
    return;
  }

  if (!s.axis) throw ConfigError("axis", "sweep axis is not set");
  const Axis a = *s.axis;
  if (a != Axis::dimension && s.dims.size() != 1)
    throw ConfigError("dims", "only the swept list may have several values");
  if (a != Axis::batch && s.batch.size() != 1)
    throw ConfigError("batch", "only the swept list may have several values");
  if (a != Axis::eta && s.eta.size() != 1)
    throw ConfigError("eta", "only the swept list may have several values");
  if (a == Axis::dimension) require_increasing(s.dims, "dims");
  if (a == Axis::batch) require_increasing(s.batch, "batch");
  if (a == Axis::eta) require_increasing(s.eta, "eta");
}

void apply_ci_scale(ExperimentSpec& spec) { spec.k1 = spec.k2 = 10; }

std::string to_json(const ExperimentSpec& s) {
  json j;
  j["name"] = s.name;
  j["kind"] = to_string(s.kind);
  j["task"] = s.task == TaskKind::mixture ? "mixture" : "realizable";
  j["dims"] = s.dims;
  j["eta"] = s.eta;
  j["batch"] = s.batch;
  if (s.axis) j["axis"] = to_string(*s.axis);
  j["variant"] = to_string(s.variant);
  j["k1"] = s.k1;
  j["k2"] = s.k2;
  j["iters"] = s.iters;
  j["tail_window"] = s.tail_window;
  j["seed"] = s.seed;
  j["convergence_gate"] = s.convergence_gate;
  j["saturation_tolerance"] = s.saturation_tolerance;
  j["trace_stride"] = s.trace_stride;
  j["n_mc"] = s.n_mc;
  j["predictor"] = predictor_name(s.predictor);
  j["sampler"] = to_string(s.sampler);
  j["mean_scale"] = s.mean_scale;
  j["sigma0"] = s.sigma0;
  j["sigma1"] = s.sigma1;
  j["alphas"] = s.alphas;
  j["sigma"] = s.sigma;
  j["n_samples"] = s.n_samples;
  j["seeds"] = s.seeds;
  j["ms"] = s.ms;
  j["level"] = s.level;
  j["out"] = s.out.string();
  return j.dump(2) + "\n";
}

Axis sweep_axis(const ExperimentSpec& spec) {
  if (!spec.axis) throw ConfigError("axis", "sweep axis is not set");
  return *spec.axis;
}

std::vector<double> axis_values(const ExperimentSpec& spec) {
  switch (sweep_axis(spec)) {
    case Axis::dimension:
      return {spec.dims.begin(), spec.dims.end()};
    case Axis::batch:
      return {spec.batch.begin(), spec.batch.end()};
    case Axis::eta:
      return spec.eta;
  }
  return {};
}

EnsembleConfig ensemble_config(const ExperimentSpec& s) {
  EnsembleConfig cfg;
  cfg.k1 = s.k1;
  cfg.k2 = s.k2;
  cfg.master_seed = s.seed;
  cfg.train.eta = s.eta.front();
  cfg.train.batch = s.batch.front();
  cfg.train.iters = s.iters;
  cfg.train.tail_window = s.tail_window;
  cfg.train.variant = s.variant;
  cfg.train.trace_stride = s.trace_stride;
  cfg.train.n_mc = s.n_mc;
  cfg.train.predictor = s.predictor;
  cfg.train.sampler = s.sampler;
  cfg.convergence_gate = s.convergence_gate;
  cfg.saturation_tolerance = s.saturation_tolerance;
  const std::size_t d = s.dims.front();
  if (s.task == TaskKind::realizable) {
    cfg.task = RealizableTemplate{d};
  } else {
    MixtureTask m = MixtureTask::with_defaults(d);
    for (auto& v : m.mean) v *= s.mean_scale;
    m.sigma0 = s.sigma0;
    m.sigma1 = s.sigma1;
    cfg.task = m;
  }
  return cfg;
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_series_csv(const SweepSeries& series, std::ostream& os) {
  if (series.points.empty()) throw Error("emit_series: series is empty");
  os << kSeriesHeader << '\n';
  for (const auto& p : series.points) {
    const auto& c = p.config;
    const auto& e = p.result.estimate;
    os << format_real(p.value) << ',' << format_real(e.alpha) << ','
       << format_real(e.inv_alpha) << ',' << e.k1 << ',' << e.k2 << ','
       << format_real(p.result.convergence) << ','
       << format_real(p.result.max_tail_change) << ',' << format_real(c.train.eta)
       << ',' << c.train.batch << ',' << input_dim(c.task) << ','
       << to_string(c.train.variant) << ',' << c.master_seed << '\n';
  }
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path) {
  return std::filesystem::path(csv_path.string() + ".meta.json");
}

void write_sidecar(const ExperimentSpec& spec,
                   const std::filesystem::path& csv_path) {
  const auto meta = sidecar_path(csv_path);
  std::ofstream out(meta, std::ios::binary);
  if (!out) throw Error("cannot write '" + meta.string() + "'");
  out << to_json(spec);
  if (!out) throw Error("write failed for '" + meta.string() + "'");
}

void emit_series(const SweepSeries& series, const ExperimentSpec& spec,
                 const std::filesystem::path& path) {
  std::ostringstream csv;
  write_series_csv(series, csv);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << csv.str();
  if (!out) throw Error("write failed for '" + path.string() + "'");
  write_sidecar(spec, path);
}

}  // namespace tailgate
