#ifndef ATOMO_SIM_HPP
#define ATOMO_SIM_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <atomo/sparsifier.hpp>

namespace atomo {

/// Synthetic convex training task with analytic gradients.
struct Task {
  enum class Kind { LinearRegression, LogisticRegression };
  Kind kind = Kind::LinearRegression;
  Eigen::MatrixXd features;  // N x d
  Eigen::VectorXd targets;   // N; labels in {-1, +1} for logistic

  Eigen::Index sample_count() const { return features.rows(); }
  Eigen::Index dimension() const { return features.cols(); }

  double loss(const Eigen::VectorXd& w) const;
  Eigen::VectorXd full_gradient(const Eigen::VectorXd& w) const;
};

Task make_linear_regression(std::uint64_t seed, Eigen::Index samples,
                            Eigen::Index dim, double noise);
Task make_logistic_regression(std::uint64_t seed, Eigen::Index samples,
                              Eigen::Index dim);

/// Exact analytic mini-batch gradient over the given sample indices.
Tensor task_gradient(const Task& task, const Eigen::VectorXd& w,
                     const std::vector<Eigen::Index>& batch);

/// A contiguous block of the parameter vector viewed as a rows x cols
/// matrix for spectral sparsification.
struct LayerShape {
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
};

struct Method {
  enum class Type { Dense, AtomoEntrywise, SpectralAtomo, Qsgd1Bit, TernGrad, Lq };
  Type type = Type::Dense;
  double s = 0.0;        // AtomoEntrywise
  double s_prime = 0.0;  // SpectralAtomo
  double q = 2.0;        // Lq

  std::string name() const;
};

struct TrainConfig {
  int workers = 4;
  int batch = 64;  // total per round, split evenly across workers
  double gamma = 0.1;
  int rounds = 100;
  Method method;
  std::uint64_t master_seed = 0;
  // Empty means one flat layer over the whole parameter vector
  // (entry-wise methods only).
  std::vector<LayerShape> layers;

  void validate(Eigen::Index dim) const;
};

struct RoundMetrics {
  int round = 0;
  double loss = 0.0;
  double grad_norm = 0.0;       // norm of the applied averaged gradient
  double second_moment = 0.0;   // mean over workers of ||g_hat_w||^2
  std::uint64_t bytes = 0;      // wire bytes this round, all workers
  double millis = 0.0;
};

struct TrainState {
  Eigen::VectorXd w;
  std::uint64_t total_bytes = 0;
};

struct TrainResult {
  std::vector<RoundMetrics> metrics;
  Eigen::VectorXd final_w;
  std::uint64_t total_bytes = 0;
};

/// Deterministic initial model: 0.01-scaled standard normal draws from
/// the master seed.
Eigen::VectorXd initial_model(std::uint64_t master_seed, Eigen::Index dim);

/// One synchronous round: every worker computes its shard gradient,
/// sparsifies and encodes per the configured method; the PS decodes all
/// messages in worker order, averages, and applies one SGD step.
RoundMetrics run_round(const Task& task, const TrainConfig& config,
                       TrainState& state, int round);

TrainResult train(const Task& task, const TrainConfig& config);

/// Coarse log-grid step-size tuner: powers of two in
/// [2^-min_exp, 2^-max_exp], picks the gamma with the best (finite)
/// final loss over a short run.
double tune_step_size(const Task& task, TrainConfig config, int tune_rounds,
                      int min_exp = 0, int max_exp = 12);

std::string metrics_csv(const std::vector<RoundMetrics>& metrics);

}  // namespace atomo

#endif  // ATOMO_SIM_HPP
