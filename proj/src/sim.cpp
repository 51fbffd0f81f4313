#include <atomo/sim.hpp>

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include <atomo/codec.hpp>
#include <atomo/errors.hpp>
#include <atomo/quantizer.hpp>
#include <atomo/spectral.hpp>

namespace atomo {

namespace {

// Reserved layer ids in the stream-derivation formula.
constexpr std::uint64_t kBatchStream = ~std::uint64_t{0};
constexpr std::uint64_t kInitStream = ~std::uint64_t{0} - 1;

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

double Task::loss(const Eigen::VectorXd& w) const {
  const Eigen::VectorXd margins = features * w;
  const auto n = static_cast<double>(sample_count());
  if (kind == Kind::LinearRegression)
    return 0.5 * (margins - targets).squaredNorm() / n;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < sample_count(); ++i)
    acc += std::log1p(std::exp(-targets(i) * margins(i)));
  return acc / n;
}

Eigen::VectorXd Task::full_gradient(const Eigen::VectorXd& w) const {
  std::vector<Eigen::Index> all(static_cast<std::size_t>(sample_count()));
  for (Eigen::Index i = 0; i < sample_count(); ++i)
    all[static_cast<std::size_t>(i)] = i;
  return task_gradient(*this, w, all).data();
}

Tensor task_gradient(const Task& task, const Eigen::VectorXd& w,
                     const std::vector<Eigen::Index>& batch) {
  if (batch.empty()) throw Error("task_gradient: empty batch");
  if (w.size() != task.dimension())
    throw ShapeError("task_gradient: parameter dimension mismatch");
  Eigen::VectorXd g = Eigen::VectorXd::Zero(task.dimension());
  for (Eigen::Index i : batch) {
    if (i < 0 || i >= task.sample_count())
      throw Error("task_gradient: sample index out of range");
    const auto x = task.features.row(i).transpose();
    const double margin = x.dot(w);
    if (task.kind == Task::Kind::LinearRegression) {
      g += (margin - task.targets(i)) * x;
    } else {
      const double y = task.targets(i);
      g += -y * sigmoid(-y * margin) * x;
    }
  }
  g /= static_cast<double>(batch.size());
  const Eigen::Index dim = g.size();
  return Tensor({dim}, std::move(g));
}

Task make_linear_regression(std::uint64_t seed, Eigen::Index samples,
                            Eigen::Index dim, double noise) {
  RngStream rng(seed, 0, 0, kInitStream);
  Task t;
  t.kind = Task::Kind::LinearRegression;
  t.features = Eigen::MatrixXd(samples, dim);
  for (Eigen::Index i = 0; i < samples; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) t.features(i, j) = rng.normal();
  Eigen::VectorXd w_true(dim);
  for (Eigen::Index j = 0; j < dim; ++j) w_true(j) = rng.normal();
  t.targets = t.features * w_true;
  for (Eigen::Index i = 0; i < samples; ++i)
    t.targets(i) += noise * rng.normal();
  return t;
}

Task make_logistic_regression(std::uint64_t seed, Eigen::Index samples,
                              Eigen::Index dim) {
  RngStream rng(seed, 0, 0, kInitStream);
  Task t;
  t.kind = Task::Kind::LogisticRegression;
  t.features = Eigen::MatrixXd(samples, dim);
  for (Eigen::Index i = 0; i < samples; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) t.features(i, j) = rng.normal();
  Eigen::VectorXd w_true(dim);
  for (Eigen::Index j = 0; j < dim; ++j) w_true(j) = rng.normal();
  t.targets = Eigen::VectorXd(samples);
  for (Eigen::Index i = 0; i < samples; ++i) {
    const double pr = sigmoid(t.features.row(i).dot(w_true));
    t.targets(i) = rng.uniform() < pr ? 1.0 : -1.0;
  }
  return t;
}

std::string Method::name() const {
  switch (type) {
    case Type::Dense:
      return "dense";
    case Type::AtomoEntrywise:
      return "atomo_entrywise_s" + std::to_string(s);
    case Type::SpectralAtomo:
      return "spectral_atomo_s" + std::to_string(s_prime);
    case Type::Qsgd1Bit:
      return "qsgd_1bit";
    case Type::TernGrad:
      return "terngrad";
    case Type::Lq:
      return "lq_q" + std::to_string(q);
  }
  return "unknown";
}

void TrainConfig::validate(Eigen::Index dim) const {
  if (workers <= 0) throw ConfigError("workers must be positive");
  if (batch <= 0 || batch % workers != 0)
    throw ConfigError("batch must be positive and divisible by workers");
  if (!(gamma > 0.0)) throw ConfigError("gamma must be positive");
  if (rounds < 1) throw ConfigError("rounds must be >= 1");
  Eigen::Index covered = 0;
  for (const auto& l : layers) {
    if (l.rows <= 0 || l.cols <= 0)
      throw ConfigError("layer dimensions must be positive");
    covered += l.rows * l.cols;
  }
  if (!layers.empty() && covered != dim)
    throw ConfigError("layer shapes must partition the parameter vector");
  if (method.type == Method::Type::SpectralAtomo && layers.empty())
    throw ConfigError("spectral method needs layer shapes");
}

Eigen::VectorXd initial_model(std::uint64_t master_seed, Eigen::Index dim) {
  RngStream rng(master_seed, 0, 0, kInitStream);
  Eigen::VectorXd w(dim);
  for (Eigen::Index j = 0; j < dim; ++j) w(j) = 0.01 * rng.normal();
  return w;
}

namespace {

struct WorkerResult {
  Eigen::VectorXd decoded;  // gradient after the encode/decode round trip
  std::uint64_t bytes = 0;
};

// Sparsify/encode one layer block, push it through the codec, decode.
Eigen::VectorXd process_block(const Eigen::VectorXd& block,
                              const LayerShape* shape, const Method& method,
                              RngStream& rng, std::uint64_t& bytes) {
  SparsifiedGradient sg;
  const bool zero_block = block.lpNorm<Eigen::Infinity>() == 0.0;
  switch (method.type) {
    case Method::Type::AtomoEntrywise: {
      if (zero_block) {
        sg.original_shape = {block.size()};
        sg.decomposition_kind = DecompositionKind::Entrywise;
        break;
      }
      AtomicDecomposition d = decompose_entrywise(Tensor({block.size()}, block));
      ProbabilityVector p =
          atomo_probabilities_sorted(d.coefficients, {method.s});
      sg = sample_sparsification(d, p, rng);
      break;
    }
    case Method::Type::SpectralAtomo: {
      Eigen::MatrixXd m(shape->rows, shape->cols);
      for (Eigen::Index i = 0; i < shape->rows; ++i)
        for (Eigen::Index j = 0; j < shape->cols; ++j)
          m(i, j) = block(i * shape->cols + j);
      if (zero_block) {
        sg.original_shape = {shape->rows, shape->cols};
        sg.decomposition_kind = DecompositionKind::Svd;
        break;
      }
      sg = spectral_atomo(Tensor::from_matrix(m), {method.s_prime}, rng);
      break;
    }
    case Method::Type::Qsgd1Bit:
    case Method::Type::TernGrad:
    case Method::Type::Lq: {
      if (zero_block) {
        sg.original_shape = {block.size()};
        sg.decomposition_kind = DecompositionKind::Entrywise;
        break;
      }
      QNorm q = method.type == Method::Type::Qsgd1Bit ? QNorm{2.0, false}
                : method.type == Method::Type::TernGrad
                    ? QNorm::infinity()
                    : QNorm{method.q, false};
      sg = lq_quantize(block, q, rng);
      break;
    }
    case Method::Type::Dense:
      throw Error("process_block: dense method has no codec path");
  }
  auto wire = encode(sg);
  bytes += wire.size();
  Tensor out = decode(wire).materialize();
  return out.data();
}

WorkerResult worker_round(const Task& task, const TrainConfig& config,
                          const Eigen::VectorXd& w, int round, int worker) {
  const int shard = config.batch / config.workers;
  RngStream batch_rng(config.master_seed, static_cast<std::uint64_t>(round),
                      static_cast<std::uint64_t>(worker), kBatchStream);
  std::vector<Eigen::Index> batch(static_cast<std::size_t>(shard));
  for (auto& i : batch)
    i = static_cast<Eigen::Index>(
        batch_rng.uniform_index(static_cast<std::uint64_t>(task.sample_count())));
  const Eigen::VectorXd g = task_gradient(task, w, batch).data();

  WorkerResult result;
  if (config.method.type == Method::Type::Dense) {
    // Dense sends the raw 64-bit gradient; no codec, no narrowing.
    result.decoded = g;
    result.bytes = static_cast<std::uint64_t>(g.size()) * 8;
    return result;
  }

  result.decoded = Eigen::VectorXd::Zero(g.size());
  std::vector<LayerShape> layers = config.layers;
  if (layers.empty()) layers.push_back({g.size(), 1});
  Eigen::Index offset = 0;
  for (std::size_t layer = 0; layer < layers.size(); ++layer) {
    const Eigen::Index len = layers[layer].rows * layers[layer].cols;
    RngStream rng(config.master_seed, static_cast<std::uint64_t>(round),
                  static_cast<std::uint64_t>(worker),
                  static_cast<std::uint64_t>(layer));
    result.decoded.segment(offset, len) = process_block(
        g.segment(offset, len),
        config.layers.empty() ? nullptr : &layers[layer], config.method, rng,
        result.bytes);
    offset += len;
  }
  return result;
}

}  // namespace

RoundMetrics run_round(const Task& task, const TrainConfig& config,
                       TrainState& state, int round) {
  const auto start = std::chrono::steady_clock::now();
  config.validate(task.dimension());

  Eigen::VectorXd sum = Eigen::VectorXd::Zero(task.dimension());
  std::uint64_t bytes = 0;
  double second_moment = 0.0;
  // Workers are independent; results are reduced in worker-index order.
  for (int worker = 0; worker < config.workers; ++worker) {
    WorkerResult r = worker_round(task, config, state.w, round, worker);
    sum += r.decoded;
    bytes += r.bytes;
    second_moment += r.decoded.squaredNorm();
  }
  const Eigen::VectorXd avg = sum / static_cast<double>(config.workers);
  state.w -= config.gamma * avg;
  state.total_bytes += bytes;

  RoundMetrics m;
  m.round = round;
  m.loss = task.loss(state.w);
  m.grad_norm = avg.norm();
  m.second_moment = second_moment / static_cast<double>(config.workers);
  m.bytes = bytes;
  m.millis = std::chrono::duration<double, std::milli>(
                 std::chrono::steady_clock::now() - start)
                 .count();
  return m;
}

TrainResult train(const Task& task, const TrainConfig& config) {
  config.validate(task.dimension());
  TrainState state;
  state.w = initial_model(config.master_seed, task.dimension());
  TrainResult result;
  result.metrics.reserve(static_cast<std::size_t>(config.rounds));
  for (int round = 0; round < config.rounds; ++round)
    result.metrics.push_back(run_round(task, config, state, round));
  result.final_w = state.w;
  result.total_bytes = state.total_bytes;
  return result;
}

double tune_step_size(const Task& task, TrainConfig config, int tune_rounds,
                      int min_exp, int max_exp) {
  config.rounds = tune_rounds;
  double best_gamma = std::ldexp(1.0, -max_exp);
  double best_loss = std::numeric_limits<double>::infinity();
  for (int e = min_exp; e <= max_exp; ++e) {
    config.gamma = std::ldexp(1.0, -e);
    double final_loss;
    try {
      final_loss = train(task, config).metrics.back().loss;
    } catch (const Error&) {
      continue;
    }
    if (std::isfinite(final_loss) && final_loss < best_loss) {
      best_loss = final_loss;
      best_gamma = config.gamma;
    }
  }
  return best_gamma;
}

std::string metrics_csv(const std::vector<RoundMetrics>& metrics) {
  std::ostringstream out;
  out << "round,loss,grad_norm,second_moment,bytes,millis\n";
  out.precision(17);
  for (const auto& m : metrics)
    out << m.round << ',' << m.loss << ',' << m.grad_norm << ','
        << m.second_moment << ',' << m.bytes << ',' << m.millis << '\n';
  return out.str();
}

}  // namespace atomo
