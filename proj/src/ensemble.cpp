#include "tailgate/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "tailgate/error.hpp"

namespace tailgate {

namespace {

// Stream index reserved for the shared starting point; run streams use
// 0 .. k1*k2-1.
constexpr std::uint64_t kInitStream = 0xFFFF'FFFF'FFFF'FFFFULL;
constexpr std::uint64_t kSweepSalt = 0x5EED'5EED'5EED'5EEDULL;

std::size_t worker_count(std::size_t requested, std::size_t jobs) {
  std::size_t n = requested;
  if (n == 0) {
    if (const char* env = std::getenv("TAILGATE_WORKERS")) {
      n = static_cast<std::size_t>(std::strtoull(env, nullptr, 10));
    }
  }
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return std::clamp<std::size_t>(n, 1, std::max<std::size_t>(jobs, 1));
}

struct RunRecord {
  WeightVector centered;  // realizable: tail_average - w_star; mixture: tail_average
  double final_error = 0.0;
  double tail_change = 0.0;
};

struct Failure {
  std::size_t run;
  std::string message;
};

// Runs job(s) for s in [0, n) on a pool. Results land by index, so the
// fold afterwards is independent of scheduling. After the first failure
// no new runs start.
template <class Job>
std::vector<RunRecord> run_all(std::size_t n, std::size_t workers, Job job) {
  std::vector<RunRecord> records(n);
  std::vector<Failure> failures;
  std::mutex failures_mutex;
  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};

  auto worker = [&] {
    for (;;) {
      if (abort.load()) return;
      const std::size_t s = next.fetch_add(1);
      if (s >= n) return;
      try {
        records[s] = job(s);
      } catch (const std::exception& e) {
        std::lock_guard lock(failures_mutex);
        failures.push_back({s, e.what()});
        abort.store(true);
      }
    }
  };

  const std::size_t count = worker_count(workers, n);
  if (count == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(count);
    for (std::size_t i = 0; i < count; ++i) pool.emplace_back(worker);
  }

  if (!failures.empty()) {
    std::sort(failures.begin(), failures.end(),
              [](const Failure& a, const Failure& b) { return a.run < b.run; });
    std::vector<std::size_t> runs;
    for (const auto& f : failures) runs.push_back(f.run);
    std::ostringstream msg;
    msg << "ensemble aborted: run " << failures.front().run << " failed: "
        << failures.front().message;
    if (failures.size() > 1) msg << " (" << failures.size() << " runs failed)";
    throw EnsembleError(msg.str(), std::move(runs));
  }
  return records;
}

EnsembleResult estimate_from(std::vector<WeightVector> centered,
                             const EnsembleConfig& cfg) {
  const std::size_t d = centered.front().size();
  SampleSet xs(d);
  EnsembleResult out;
  out.per_run_norms.reserve(centered.size());
  for (const auto& x : centered) {
    xs.push_back(x);
    double s = 0.0;
    for (double v : x) s += v * v;
    out.per_run_norms.push_back(std::sqrt(s));
  }
  out.estimate = hill_alpha(xs, HillConfig{cfg.k1, cfg.k2});
  return out;
}

}  // namespace

std::size_t input_dim(const TaskTemplate& task) {
  if (const auto* r = std::get_if<RealizableTemplate>(&task)) return r->dim;
  return std::get<MixtureTask>(task).input_dim();
}

void EnsembleConfig::validate() const {
  HillConfig{k1, k2}.validate();
  train.validate();
  if (input_dim(task) == 0) throw Error("ensemble: dimension must be >= 1");
  if (const auto* m = std::get_if<MixtureTask>(&task)) {
    m->validate();
    if (m->sigma0 == m->sigma1)
      throw Error("ensemble: mixture sigma0 and sigma1 must differ");
  }
  if (!(convergence_gate > 0.0))
    throw Error("ensemble: convergence_gate must be positive");
  if (!(saturation_tolerance > 0.0))
    throw Error("ensemble: saturation_tolerance must be positive");
}

std::uint64_t run_seed(std::uint64_t master_seed, std::size_t run_index) {
  return mix_seed(master_seed, run_index);
}

WeightVector shared_init(std::uint64_t master_seed, std::size_t dim) {
  Rng rng = make_rng(mix_seed(master_seed, kInitStream));
  WeightVector w(dim);
  for (auto& v : w) v = standard_normal(rng);
  return w;
}

double relative_tail_change(std::span<const TracePoint> trace) {
  if (trace.size() < 2) return 0.0;
  const std::size_t win = std::max<std::size_t>(1, trace.size() / 5);
  const std::size_t last_begin = trace.size() - win;
  const std::size_t prev_begin = last_begin >= win ? last_begin - win : 0;
  auto mean = [&](std::size_t b, std::size_t e) {
    double s = 0.0;
    for (std::size_t i = b; i < e; ++i) s += trace[i].value;
    return s / static_cast<double>(e - b);
  };
  const double last = mean(last_begin, trace.size());
  const double prev = mean(prev_begin, last_begin);
  if (last == prev) return 0.0;
  return std::abs(last - prev) / std::max(std::abs(prev), 1e-12);
}

EnsembleResult run_realizable_ensemble(const EnsembleConfig& cfg) {
  cfg.validate();
  const auto* tmpl = std::get_if<RealizableTemplate>(&cfg.task);
  if (!tmpl) throw Error("run_realizable_ensemble: task template is not realizable");

  const std::size_t d = tmpl->dim;
  const WeightVector w1 = shared_init(cfg.master_seed, d);

  auto records = run_all(cfg.run_count(), cfg.workers, [&](std::size_t s) {
    Rng rng = make_rng(run_seed(cfg.master_seed, s));
    RealizableTask task{WeightVector(d)};
    for (auto& v : task.w_star) v = standard_normal(rng);

    const RunOutcome run = train_run(task, cfg.train, w1, rng);
    RunRecord rec;
    rec.final_error = run.recovery_error_trace.back().value;
    if (!(rec.final_error < cfg.convergence_gate)) {
      std::ostringstream msg;
      msg << "final recovery error " << rec.final_error
          << " is not below the convergence gate " << cfg.convergence_gate;
      throw Error(msg.str());
    }
    rec.centered.resize(d);
    for (std::size_t c = 0; c < d; ++c)
      rec.centered[c] = run.tail_average[c] - task.w_star[c];
    return rec;
  });

  std::vector<WeightVector> centered;
  centered.reserve(records.size());
  double worst = 0.0;
  for (auto& r : records) {
    worst = std::max(worst, r.final_error);
    centered.push_back(std::move(r.centered));
  }
  EnsembleResult out = estimate_from(std::move(centered), cfg);
  out.convergence = worst;
  return out;
}

EnsembleResult run_classification_ensemble(const EnsembleConfig& cfg) {
  cfg.validate();
  const auto* task = std::get_if<MixtureTask>(&cfg.task);
  if (!task) throw Error("run_classification_ensemble: task template is not a mixture");
  if (cfg.train.variant != Variant::sgd)
    throw Error("run_classification_ensemble: variant must be sgd");

  const std::size_t d = task->input_dim();
  const WeightVector w1 = shared_init(cfg.master_seed, d);
  const Task fixed = *task;

  auto records = run_all(cfg.run_count(), cfg.workers, [&](std::size_t s) {
    Rng rng = make_rng(run_seed(cfg.master_seed, s));
    RunOutcome run = train_run(fixed, cfg.train, w1, rng);
    RunRecord rec;
    rec.final_error = run.classification_error_trace.back().value;
    rec.tail_change = relative_tail_change(run.classification_error_trace);
    if (!(rec.tail_change < cfg.saturation_tolerance)) {
      std::ostringstream msg;
      msg << "classification error has not saturated: relative tail change "
          << rec.tail_change << " >= " << cfg.saturation_tolerance;
      throw Error(msg.str());
    }
    rec.centered = std::move(run.tail_average);
    return rec;
  });

  // Center at the ensemble mean, accumulated in run order.
  WeightVector mean(d, 0.0);
  for (const auto& r : records)
    for (std::size_t c = 0; c < d; ++c) mean[c] += r.centered[c];
  for (auto& v : mean) v /= static_cast<double>(records.size());

  std::vector<WeightVector> centered;
  centered.reserve(records.size());
  double worst = 0.0;
  double worst_change = 0.0;
  for (auto& r : records) {
    worst = std::max(worst, r.final_error);
    worst_change = std::max(worst_change, r.tail_change);
    for (std::size_t c = 0; c < d; ++c) r.centered[c] -= mean[c];
    centered.push_back(std::move(r.centered));
  }
  EnsembleResult out = estimate_from(std::move(centered), cfg);
  out.convergence = worst;
  out.max_tail_change = worst_change;
  return out;
}

EnsembleResult run_ensemble(const EnsembleConfig& cfg) {
  if (std::holds_alternative<RealizableTemplate>(cfg.task))
    return run_realizable_ensemble(cfg);
  return run_classification_ensemble(cfg);
}

std::string to_string(Axis axis) {
  switch (axis) {
    case Axis::dimension: return "dimension";
    case Axis::batch: return "batch";
    case Axis::eta: return "eta";
  }
  return "?";
}

Axis parse_axis(const std::string& s) {
  if (s == "dimension" || s == "dim") return Axis::dimension;
  if (s == "batch") return Axis::batch;
  if (s == "eta") return Axis::eta;
  throw Error("unknown sweep axis '" + s + "' (expected dimension, batch or eta)");
}

std::uint64_t point_seed(std::uint64_t master_seed, std::size_t point_index) {
  return mix_seed(master_seed ^ kSweepSalt, point_index);
}

EnsembleConfig sweep_point_config(const EnsembleConfig& base, Axis axis,
                                  double value, std::size_t point_index) {
  EnsembleConfig cfg = base;
  cfg.master_seed = point_seed(base.master_seed, point_index);
  auto as_count = [&](const char* what) {
    if (!(value >= 1.0) || value != std::floor(value))
      throw Error(std::string("sweep: ") + what +
                  " values must be positive integers, got " +
                  std::to_string(value));
    return static_cast<std::size_t>(value);
  };
  switch (axis) {
    case Axis::dimension: {
      const std::size_t d = as_count("dimension");
      if (auto* r = std::get_if<RealizableTemplate>(&cfg.task)) {
        r->dim = d;
      } else {
        auto& m = std::get<MixtureTask>(cfg.task);
        double norm = 0.0;
        for (double v : m.mean) norm += v * v;
        norm = std::sqrt(norm);
        m.mean.assign(d, norm / std::sqrt(static_cast<double>(d)));
      }
      break;
    }
    case Axis::batch:
      cfg.train.batch = as_count("batch");
      break;
    case Axis::eta:
      if (!(value >= 0.0) || !std::isfinite(value))
        throw Error("sweep: eta values must be finite and non-negative");
      cfg.train.eta = value;
      break;
  }
  return cfg;
}

SweepSeries sweep(const EnsembleConfig& base, Axis axis,
                  std::span<const double> values) {
  if (values.empty()) throw Error("sweep: no axis values");
  for (std::size_t i = 1; i < values.size(); ++i)
    if (!(values[i] > values[i - 1]))
      throw Error("sweep: axis values must be strictly increasing");

  SweepSeries series;
  series.axis = axis;
  for (std::size_t i = 0; i < values.size(); ++i) {
    EnsembleConfig cfg = sweep_point_config(base, axis, values[i], i);
    try {
      EnsembleResult r = run_ensemble(cfg);
      series.points.push_back({values[i], std::move(cfg), std::move(r)});
    } catch (const EnsembleError& e) {
      std::ostringstream msg;
      msg << "sweep " << to_string(axis) << " = " << values[i] << ": " << e.what();
      throw EnsembleError(msg.str(), e.failed_runs());
    } catch (const Error& e) {
      std::ostringstream msg;
      msg << "sweep " << to_string(axis) << " = " << values[i] << ": " << e.what();
      throw EnsembleError(msg.str(), {});
    }
  }
  return series;
}

}  // namespace tailgate
