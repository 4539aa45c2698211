#include "tailgate/relu_gate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tailgate/error.hpp"

namespace tailgate {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

void RealizableTask::validate() const {
  if (w_star.empty()) throw Error("realizable task: w_star is empty");
}

void MixtureTask::validate() const {
  if (mean.empty()) throw Error("mixture task: mean is empty");
  if (!(sigma0 > 0.0) || !(sigma1 > 0.0))
    throw Error("mixture task: sigma0 and sigma1 must be positive");
}

MixtureTask MixtureTask::with_defaults(std::size_t dim) {
  if (dim == 0) throw Error("mixture task: dimension must be at least 1");
  return {WeightVector(dim, 1.0 / std::sqrt(static_cast<double>(dim))), 1.0,
          2.0};
}

std::size_t input_dim(const Task& task) {
  return std::visit([](const auto& t) { return t.input_dim(); }, task);
}

std::string to_string(Variant v) { return v == Variant::sgd ? "sgd" : "alg1"; }

Variant parse_variant(const std::string& s) {
  if (s == "sgd" || s == "SGD") return Variant::sgd;
  if (s == "alg1" || s == "ALG1") return Variant::alg1;
  throw Error("unknown variant '" + s + "' (expected sgd or alg1)");
}

std::string to_string(BatchSampler s) {
  return s == BatchSampler::projected ? "projected" : "materialized";
}

BatchSampler parse_sampler(const std::string& s) {
  if (s == "projected") return BatchSampler::projected;
  if (s == "materialized") return BatchSampler::materialized;
  throw Error("unknown sampler '" + s + "' (expected projected or materialized)");
}

void TrainConfig::validate() const {
  if (!(eta >= 0.0) || !std::isfinite(eta))
    throw Error("train: eta must be finite and non-negative");
  if (batch < 1) throw Error("train: batch must be >= 1");
  if (iters < 1) throw Error("train: iters must be >= 1");
  if (tail_window < 1 || tail_window > iters)
    throw Error("train: tail_window must lie in [1, iters]");
  if (trace_stride < 1) throw Error("train: trace_stride must be >= 1");
  if (n_mc < 1) throw Error("train: n_mc must be >= 1");
}

namespace {

void fill_realizable(const RealizableTask& task, std::size_t b, Rng& rng,
                     Batch& out) {
  const std::size_t d = task.input_dim();
  if (out.x.dim() != d || out.size() != b) {
    out.x = SampleSet(d, std::vector<double>(b * d));
    out.y.assign(b, 0.0);
  }
  for (std::size_t i = 0; i < b; ++i) {
    auto x = out.x.row(i);
    for (auto& v : x) v = standard_normal(rng);
    out.y[i] = relu(dot(task.w_star, x));
  }
}

void draw_mixture(const MixtureTask& task, Rng& rng, std::span<double> x,
                  double& y) {
  const bool one = (rng() >> 63) != 0;
  const double sign = one ? 1.0 : -1.0;
  const double sd = one ? task.sigma1 : task.sigma0;
  for (std::size_t c = 0; c < x.size(); ++c)
    x[c] = sign * task.mean[c] + sd * standard_normal(rng);
  y = one ? 1.0 : 0.0;
}

void fill_mixture(const MixtureTask& task, std::size_t b, Rng& rng,
                  Batch& out) {
  const std::size_t d = task.input_dim();
  if (out.x.dim() != d || out.size() != b) {
    out.x = SampleSet(d, std::vector<double>(b * d));
    out.y.assign(b, 0.0);
  }
  for (std::size_t i = 0; i < b; ++i) draw_mixture(task, rng, out.x.row(i), out.y[i]);
}

void check_batch(std::span<const double> w, const Batch& batch) {
  if (batch.size() == 0) throw Error("gradient: empty batch");
  if (batch.x.dim() != w.size())
    throw Error("gradient: batch dimension " + std::to_string(batch.x.dim()) +
                " does not match weight dimension " + std::to_string(w.size()));
}

// g <- gradient; g must already have size d.
void accumulate_gradient(Variant variant, std::span<const double> w,
                         const Batch& batch, std::span<double> g) {
  std::fill(g.begin(), g.end(), 0.0);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto x = batch.x.row(i);
    const double pre = dot(w, x);
    const bool active =
        variant == Variant::alg1 ? batch.y[i] > 0.0 : pre > 0.0;
    if (!active) continue;
    const double r = batch.y[i] - pre;
    for (std::size_t c = 0; c < g.size(); ++c) g[c] += r * x[c];
  }
  const double scale = -1.0 / static_cast<double>(batch.size());
  for (auto& v : g) v *= scale;
}

// Gradient of one projected realizable step, written into g.
class ProjectedStep {
 public:
  explicit ProjectedStep(const RealizableTask& task)
      : w_star_(task.w_star),
        d_(task.input_dim()),
        star_norm_(std::sqrt(dot(w_star_, w_star_))),
        q1_(d_),
        q2_(d_),
        delta_(d_),
        z_(d_) {}

  void operator()(Variant variant, std::span<const double> w, std::size_t b,
                  Rng& rng, std::span<double> g) {
    // Orthonormal basis of span{w_star, w - w_star}, built from the offset
    // so that the small component along q2 keeps its digits.
    for (std::size_t c = 0; c < d_; ++c) delta_[c] = w[c] - w_star_[c];
    const double star_norm = star_norm_;
    if (star_norm > 0.0) {
      for (std::size_t c = 0; c < d_; ++c) q1_[c] = w_star_[c] / star_norm;
    } else {
      // Zero teacher: every label is 0 and only w spans anything.
      std::fill(q1_.begin(), q1_.end(), 0.0);
    }
    const double delta_1 = dot(delta_, q1_);
    for (std::size_t c = 0; c < d_; ++c) q2_[c] = delta_[c] - delta_1 * q1_[c];
    const double again = dot(q2_, q1_);
    for (std::size_t c = 0; c < d_; ++c) q2_[c] -= again * q1_[c];
    const double delta_2 = std::sqrt(dot(q2_, q2_));
    const bool rank2 = delta_2 > 0.0;
    if (rank2)
      for (auto& v : q2_) v /= delta_2;

    // Coordinates: w_star = (star_norm, 0), w - w_star = (delta_1, delta_2).
    const double w_1 = star_norm + delta_1;
    double s1 = 0.0, s2 = 0.0, ss = 0.0;
    for (std::size_t i = 0; i < b; ++i) {
      const double u1 = standard_normal(rng);
      const double u2 = standard_normal(rng);
      const double y = relu(star_norm * u1);
      const double pre = w_1 * u1 + delta_2 * u2;
      const bool active = variant == Variant::alg1 ? y > 0.0 : pre > 0.0;
      if (!active) continue;
      const double r = y > 0.0 ? -(delta_1 * u1 + delta_2 * u2) : -pre;
      s1 += r * u1;
      s2 += r * u2;
      ss += r * r;
    }

    for (auto& v : z_) v = standard_normal(rng);
    const double z1 = dot(z_, q1_);
    const double z2 = rank2 ? dot(z_, q2_) : 0.0;
    const double spread = std::sqrt(ss);
    const double scale = -1.0 / static_cast<double>(b);
    for (std::size_t c = 0; c < d_; ++c) {
      double perp = z_[c] - z1 * q1_[c];
      double along = s1 * q1_[c];
      if (rank2) {
        perp -= z2 * q2_[c];
        along += s2 * q2_[c];
      }
      g[c] = scale * (along + spread * perp);
    }
  }

 private:
  const WeightVector& w_star_;
  std::size_t d_;
  double star_norm_;
  std::vector<double> q1_, q2_, delta_, z_;
};

bool all_finite(std::span<const double> w) {
  for (double v : w)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace

Batch realizable_batch(const RealizableTask& task, std::size_t b, Rng& rng) {
  task.validate();
  if (b < 1) throw Error("realizable_batch: b must be >= 1");
  Batch out;
  fill_realizable(task, b, rng, out);
  return out;
}

LabeledPoint mixture_sample(const MixtureTask& task, Rng& rng) {
  task.validate();
  LabeledPoint p{WeightVector(task.input_dim()), 0.0};
  draw_mixture(task, rng, p.x, p.y);
  return p;
}

Batch mixture_batch(const MixtureTask& task, std::size_t b, Rng& rng) {
  task.validate();
  if (b < 1) throw Error("mixture_batch: b must be >= 1");
  Batch out;
  fill_mixture(task, b, rng, out);
  return out;
}

WeightVector gradient(Variant variant, std::span<const double> w,
                      const Batch& batch) {
  check_batch(w, batch);
  WeightVector g(w.size());
  accumulate_gradient(variant, w, batch, g);
  return g;
}

WeightVector alg1_gradient(std::span<const double> w, const Batch& batch) {
  return gradient(Variant::alg1, w, batch);
}

WeightVector sgd_gradient(std::span<const double> w, const Batch& batch) {
  return gradient(Variant::sgd, w, batch);
}

double classification_error(std::span<const double> w, const MixtureTask& task,
                            std::size_t n_mc, Rng& rng, Predictor predictor) {
  task.validate();
  if (n_mc < 1) throw Error("classification_error: n_mc must be >= 1");
  if (w.size() != task.input_dim())
    throw Error("classification_error: weight dimension mismatch");
  std::vector<double> x(task.input_dim());
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < n_mc; ++i) {
    double y = 0.0;
    draw_mixture(task, rng, x, y);
    const bool predicted_one = predictor == Predictor::literal
                                   ? relu(dot(w, x)) >= 0.0
                                   : dot(w, x) > 0.0;
    if (predicted_one != (y > 0.0)) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(n_mc);
}

RunOutcome train_run(const Task& task, const TrainConfig& cfg,
                     std::span<const double> w_init, Rng& rng) {
  cfg.validate();
  std::visit([](const auto& t) { t.validate(); }, task);
  const std::size_t d = input_dim(task);
  if (w_init.size() != d)
    throw Error("train_run: w_init has dimension " +
                std::to_string(w_init.size()) + ", task has " +
                std::to_string(d));

  const auto* realizable = std::get_if<RealizableTask>(&task);
  const auto* mixture = std::get_if<MixtureTask>(&task);

  RunOutcome out;
  out.alg1_on_mixture = mixture != nullptr && cfg.variant == Variant::alg1;

  const std::uint64_t diag_seed = rng();
  auto record = [&](std::size_t t, std::span<const double> w) {
    if (realizable) {
      out.recovery_error_trace.push_back({t, distance(w, realizable->w_star)});
    } else {
      Rng eval = make_rng(diag_seed);
      out.classification_error_trace.push_back(
          {t, classification_error(w, *mixture, cfg.n_mc, eval, cfg.predictor)});
    }
  };

  WeightVector w(w_init.begin(), w_init.end());
  WeightVector g(d);
  // Tail mean as reference + mean offset; exact when the iterates stop
  // moving, and the offsets keep digits that a raw sum would cancel.
  WeightVector tail_ref;
  WeightVector tail_offset(d, 0.0);
  Batch batch;
  std::optional<ProjectedStep> projected;
  if (realizable && cfg.sampler == BatchSampler::projected)
    projected.emplace(*realizable);
  const std::size_t tail_start = cfg.iters - cfg.tail_window + 1;

  record(0, w);
  for (std::size_t t = 1; t <= cfg.iters; ++t) {
    if (projected) {
      (*projected)(cfg.variant, w, cfg.batch, rng, g);
    } else {
      if (realizable)
        fill_realizable(*realizable, cfg.batch, rng, batch);
      else
        fill_mixture(*mixture, cfg.batch, rng, batch);
      accumulate_gradient(cfg.variant, w, batch, g);
    }
    for (std::size_t c = 0; c < d; ++c) w[c] -= cfg.eta * g[c];

    if (!all_finite(w))
      throw DivergenceError(
          "train_run: iterate became non-finite at step " + std::to_string(t),
          t);

    if (t == tail_start) tail_ref = w;
    if (t > tail_start)
      for (std::size_t c = 0; c < d; ++c) tail_offset[c] += w[c] - tail_ref[c];
    if (t % cfg.trace_stride == 0 || t == cfg.iters) record(t, w);
  }

  out.tail_average.resize(d);
  const double inv_w = 1.0 / static_cast<double>(cfg.tail_window);
  for (std::size_t c = 0; c < d; ++c)
    out.tail_average[c] = tail_ref[c] + tail_offset[c] * inv_w;
  out.final_w = std::move(w);
  return out;
}

}  // namespace tailgate
