// Acceptance gate: one line per criterion, exit code = number of failures.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <atomo/codec.hpp>
#include <atomo/quantizer.hpp>
#include <atomo/sim.hpp>
#include <atomo/spectral.hpp>

#include "oracles.hpp"

using namespace atomo;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& what) {
  std::printf("criterion %2d: %s — %s\n", id, ok ? "PASS" : "FAIL",
              what.c_str());
  if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

Eigen::VectorXd nonzero_lambda(RngStream& rng, Eigen::Index n) {
  Eigen::VectorXd lambda = oracles::random_vector(rng, n);
  if ((lambda.array() != 0.0).count() == 0) lambda(0) = 1.0;
  return lambda;
}

// ---------------------------------------------------------------- 1
void criterion_solver_optimality() {
  const auto t0 = std::chrono::steady_clock::now();
  RngStream rng(1001, 0, 0, 0);
  bool ok = true;
  for (int trial = 0; trial < 1000 && ok; ++trial) {
    const auto n = static_cast<Eigen::Index>(1 + rng.uniform_index(6));
    Eigen::VectorXd lambda = nonzero_lambda(rng, n);
    const auto nnz = (lambda.array() != 0.0).count();
    double s = rng.uniform() * static_cast<double>(nnz);
    if (s <= 0.05) s = 0.05;
    auto p = atomo_probabilities_sorted(lambda, {s});
    const double f = expected_second_moment(lambda, p);
    Eigen::VectorXd kkt = oracles::kkt_enumeration(lambda, s);
    if (kkt.size() == 0 || f > oracles::objective(lambda, kkt) + 1e-6)
      ok = false;
    Eigen::VectorXd cd = oracles::pairwise_descent(lambda, s);
    if (f > oracles::objective(lambda, cd) + 1e-6) ok = false;
  }
  const double secs = seconds_since(t0);
  report(1, ok && secs < 10.0,
         "solver optimality vs KKT enumeration + coordinate descent, 1000 "
         "instances in " + std::to_string(secs) + " s");
}

// ---------------------------------------------------------------- 2
void criterion_variant_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  RngStream rng(1002, 0, 0, 0);
  bool ok = true;
  for (int trial = 0; trial < 10000 && ok; ++trial) {
    const auto n = static_cast<Eigen::Index>(1 + rng.uniform_index(64));
    Eigen::VectorXd lambda = nonzero_lambda(rng, n);
    const auto nnz = (lambda.array() != 0.0).count();
    double s = rng.uniform() * static_cast<double>(nnz);
    if (s <= 0.01) s = 0.01;
    auto a = atomo_probabilities_sorted(lambda, {s});
    auto b = atomo_probabilities_select(lambda, {s});
    if ((a.p - b.p).lpNorm<Eigen::Infinity>() > 1e-12) ok = false;
  }
  const double secs = seconds_since(t0);
  report(2, ok && secs < 10.0,
         "sort and selection variants agree <= 1e-12 on 10000 instances in " +
             std::to_string(secs) + " s");
}

// ---------------------------------------------------------------- 3
void criterion_balanced_closed_form() {
  RngStream rng(1003, 0, 0, 0);
  bool ok = true;
  for (int trial = 0; trial < 2000 && ok; ++trial) {
    const auto n = static_cast<Eigen::Index>(2 + rng.uniform_index(31));
    Eigen::VectorXd lambda = nonzero_lambda(rng, n);
    for (Eigen::Index i = 0; i < n; ++i)
      if (lambda(i) == 0.0) lambda(i) = 0.5;
    const double limit = lambda.lpNorm<1>() / lambda.lpNorm<Eigen::Infinity>();
    double s = rng.uniform() * limit;
    if (s <= 0.01) s = 0.01;
    auto p = atomo_probabilities_sorted(lambda, {s});
    const double l1 = lambda.lpNorm<1>();
    for (Eigen::Index i = 0; i < n; ++i)
      if (std::abs(p.p(i) - std::abs(lambda(i)) * s / l1) > 1e-12) ok = false;
    const double f = expected_second_moment(lambda, p);
    if (std::abs(f - l1 * l1 / s) > 1e-12 * std::abs(f)) ok = false;
  }
  report(3, ok, "balanced regime: p_i = |lambda_i| s / ||lambda||_1 and "
                "f = ||lambda||_1^2 / s within 1e-12");
}

// ---------------------------------------------------------------- 4
void criterion_quantizer_reduction() {
  RngStream rng(1004, 0, 0, 0);
  bool ok = true;
  for (int trial = 0; trial < 1000 && ok; ++trial) {
    const auto n = static_cast<Eigen::Index>(2 + rng.uniform_index(63));
    Eigen::VectorXd g = nonzero_lambda(rng, n);
    for (Eigen::Index i = 0; i < n; ++i)
      if (g(i) == 0.0) g(i) = 0.5;
    for (QNorm q : {QNorm{2.0, false}, QNorm::infinity()}) {
      const double nq = lq_norm(g, q);
      auto budget = lq_sparsity_budget(g, q);
      auto p = atomo_probabilities_sorted(g, budget);
      for (Eigen::Index i = 0; i < n; ++i)
        if (std::abs(p.p(i) - std::abs(g(i)) / nq) > 1e-12) ok = false;
      const double f = expected_second_moment(g, p);
      const double closed = g.lpNorm<1>() * nq;
      if (std::abs(f - closed) > 1e-10 * closed) ok = false;
    }
  }
  report(4, ok, "QSGD/TernGrad probabilities |g_i|/||g||_q within 1e-12; "
                "second moment ||g||_1 ||g||_q within 1e-10 relative");
}

// ---------------------------------------------------------------- 5
void criterion_unbiasedness() {
  const auto t0 = std::chrono::steady_clock::now();
  const int draws = 100000;
  bool ok = true;

  RngStream gen(1005, 0, 0, 0);
  Eigen::MatrixXd x = oracles::random_matrix(gen, 8, 8, 2.0);
  Tensor t = Tensor::from_matrix(x);

  {  // entrywise
    AtomicDecomposition d = decompose_entrywise(t);
    auto p = atomo_probabilities_sorted(d.coefficients, {16.0});
    RngStream rng(1006, 0, 0, 0);
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(64);
    for (int i = 0; i < draws; ++i)
      mean += sample_sparsification(d, p, rng).materialize().data();
    mean /= draws;
    for (Eigen::Index i = 0; i < 64; ++i) {
      const double var =
          p.p(i) > 0.0
              ? d.coefficients(i) * d.coefficients(i) * (1.0 / p.p(i) - 1.0)
              : 0.0;
      const double se = std::sqrt(var / draws);
      if (std::abs(mean(i) - d.coefficients(i)) > 4.0 * se + 1e-12) ok = false;
    }
  }

  {  // SVD
    AtomicDecomposition d = decompose_svd(t);
    auto p = atomo_probabilities_sorted(d.coefficients, {4.0});
    RngStream rng(1007, 0, 0, 0);
    Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(8, 8);
    for (int i = 0; i < draws; ++i)
      mean += sample_sparsification(d, p, rng).materialize().as_matrix();
    mean /= draws;
    for (Eigen::Index i = 0; i < 8; ++i) {
      for (Eigen::Index j = 0; j < 8; ++j) {
        double var = 0.0;
        for (std::size_t k = 0; k < d.atoms.size(); ++k) {
          const auto& a = std::get<RankOneAtom>(d.atoms[k]);
          const double entry = d.coefficients(static_cast<Eigen::Index>(k)) *
                               a.u(i) * a.v(j);
          if (p.p(static_cast<Eigen::Index>(k)) > 0.0)
            var += entry * entry *
                   (1.0 / p.p(static_cast<Eigen::Index>(k)) - 1.0);
        }
        const double se = std::sqrt(var / draws);
        if (std::abs(mean(i, j) - x(i, j)) > 4.0 * se + 1e-12) ok = false;
      }
    }
  }
  const double secs = seconds_since(t0);
  report(5, ok && secs < 60.0,
         "Monte Carlo unbiasedness within 4 SE per coordinate, entrywise and "
         "SVD on 8x8, 1e5 draws in " + std::to_string(secs) + " s");
}

// ---------------------------------------------------------------- 6
void criterion_second_moment() {
  bool ok = true;
  RngStream gen(1008, 0, 0, 0);
  for (int inst = 0; inst < 3 && ok; ++inst) {
    const auto n = static_cast<Eigen::Index>(3 + gen.uniform_index(6));
    Eigen::VectorXd lambda = nonzero_lambda(gen, n);
    const auto nnz = (lambda.array() != 0.0).count();
    const double s = 0.5 * static_cast<double>(nnz) + 0.25;
    AtomicDecomposition d = decompose_entrywise(Tensor({n}, lambda));
    auto p = atomo_probabilities_sorted(lambda, {s});
    const double expect = expected_second_moment(lambda, p);
    RngStream rng(2000 + static_cast<std::uint64_t>(inst), 0, 0, 0);
    double acc = 0.0;
    const int draws = 1000000;
    for (int i = 0; i < draws; ++i) {
      double norm2 = 0.0;
      for (const auto& k : sample_sparsification(d, p, rng).kept_atoms)
        norm2 += k.scaled_weight * k.scaled_weight;
      acc += norm2;
    }
    acc /= draws;
    if (std::abs(acc - expect) > 0.01 * expect) ok = false;
  }
  report(6, ok,
         "empirical E||g_hat||^2 within 1% of sum lambda_i^2/p_i at 1e6 draws");
}

// ---------------------------------------------------------------- 7
void criterion_norm_equivalence() {
  bool ok = true;
  RngStream rng(1009, 0, 0, 0);
  for (int trial = 0; trial < 10000 && ok; ++trial) {
    const auto n = static_cast<Eigen::Index>(1 + rng.uniform_index(32));
    const auto m = static_cast<Eigen::Index>(1 + rng.uniform_index(32));
    Eigen::MatrixXd x = oracles::random_matrix(rng, n, m);
    MatrixNorms norms = matrix_norms(Tensor::from_matrix(x));
    const double root_nm =
        std::sqrt(static_cast<double>(n) * static_cast<double>(m));
    if (norms.l11 == 0.0) continue;
    if (norms.nuclear < norms.l11 / root_nm - 1e-8 * norms.l11) ok = false;
    if (norms.nuclear > norms.l11 * (1.0 + 1e-8)) ok = false;
  }
  // witnesses
  for (Eigen::Index n : {3, 16}) {
    MatrixNorms lo = matrix_norms(
        Tensor({n, n}, Eigen::VectorXd::Ones(n * n)));
    if (std::abs(lo.nuclear - lo.l11 / static_cast<double>(n)) >
        1e-12 * lo.l11)
      ok = false;
    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n, n);
    e(n / 2, n - 1) = 3.5;
    MatrixNorms hi = matrix_norms(Tensor::from_matrix(e));
    if (std::abs(hi.nuclear - hi.l11) > 1e-12 * hi.l11) ok = false;
  }
  report(7, ok, "||X||_1,1/sqrt(nm) <= ||X||_* <= ||X||_1,1 on 1e4 matrices; "
                "witnesses exact to 1e-12");
}

// ---------------------------------------------------------------- 8
void criterion_svd_wins_flag() {
  bool ok = true;
  RngStream rng(1010, 0, 0, 0);
  int checked = 0;
  for (int trial = 0; trial < 10000 && checked < 100; ++trial) {
    const auto n = static_cast<Eigen::Index>(4 + rng.uniform_index(13));
    const auto m = static_cast<Eigen::Index>(4 + rng.uniform_index(13));
    Eigen::MatrixXd x = oracles::random_matrix(rng, n, m);
    const double s =
        static_cast<double>(n + m) * (0.5 + 0.5 * rng.uniform());
    auto c = compare_costs(Tensor::from_matrix(x), {s});
    if (!c.entrywise_balanced || !c.svd_balanced) continue;
    ++checked;
    const double diff = c.second_moment_svd - c.second_moment_entrywise;
    if (std::abs(diff) > 1e-9 * c.second_moment_entrywise &&
        c.svd_wins != (diff < 0.0))
      ok = false;
  }
  auto ones = compare_costs(Tensor({16, 16}, Eigen::VectorXd::Ones(256)),
                            {32.0});
  if (!ones.svd_wins) ok = false;
  auto eye = compare_costs(
      Tensor::from_matrix(Eigen::MatrixXd::Identity(16, 16)), {8.0});
  if (eye.svd_wins) ok = false;
  if (checked < 100) ok = false;
  report(8, ok, "svd_wins matches the solver ordering on 100 balanced "
                "instances; all-ones -> SVD, identity -> entrywise");
}

// ---------------------------------------------------------------- 9
void criterion_svd_correctness() {
  bool ok = true;
  RngStream rng(1011, 0, 0, 0);
  for (int trial = 0; trial < 500 && ok; ++trial) {
    const auto n = static_cast<Eigen::Index>(1 + rng.uniform_index(8));
    const auto m = static_cast<Eigen::Index>(1 + rng.uniform_index(8));
    Eigen::MatrixXd x = oracles::random_matrix(rng, n, m);
    SvdResult r = jacobi_svd(x);
    auto expected = oracles::gram_singular_values(x);
    for (int i = 0; i < r.rank; ++i)
      if (std::abs(r.singular_values[static_cast<std::size_t>(i)] -
                   expected[static_cast<std::size_t>(i)]) > 1e-8)
        ok = false;
    if ((r.reconstruct(n, m) - x).norm() > 1e-8 * std::max(1.0, x.norm()))
      ok = false;
  }
  for (Eigen::Index n : {16, 33, 64}) {
    const auto m = static_cast<Eigen::Index>(1 + rng.uniform_index(64));
    Eigen::MatrixXd x = oracles::random_matrix(rng, n, m);
    SvdResult r = jacobi_svd(x);
    if ((r.reconstruct(n, m) - x).norm() > 1e-8 * x.norm()) ok = false;
  }
  report(9, ok, "singular values match the Gram oracle within 1e-8 on 500 "
                "fuzz cases; reconstruction <= 1e-8 up to 64x64");
}

// ---------------------------------------------------------------- 10
bool wire_equal(const SparsifiedGradient& a, const SparsifiedGradient& b) {
  if (a.original_shape != b.original_shape ||
      a.decomposition_kind != b.decomposition_kind ||
      a.budget_used != b.budget_used ||
      a.kept_atoms.size() != b.kept_atoms.size())
    return false;
  for (std::size_t i = 0; i < a.kept_atoms.size(); ++i) {
    if (static_cast<float>(a.kept_atoms[i].scaled_weight) !=
        static_cast<float>(b.kept_atoms[i].scaled_weight))
      return false;
    if (std::holds_alternative<StandardBasisAtom>(a.kept_atoms[i].atom)) {
      if (std::get<StandardBasisAtom>(a.kept_atoms[i].atom).index !=
          std::get<StandardBasisAtom>(b.kept_atoms[i].atom).index)
        return false;
    } else {
      const auto& ra = std::get<RankOneAtom>(a.kept_atoms[i].atom);
      const auto& rb = std::get<RankOneAtom>(b.kept_atoms[i].atom);
      for (Eigen::Index j = 0; j < ra.u.size(); ++j)
        if (static_cast<float>(ra.u(j)) != static_cast<float>(rb.u(j)))
          return false;
      for (Eigen::Index j = 0; j < ra.v.size(); ++j)
        if (static_cast<float>(ra.v(j)) != static_cast<float>(rb.v(j)))
          return false;
    }
  }
  return true;
}

void criterion_codec() {
  bool ok = true;
  RngStream rng(1012, 0, 0, 0);
  for (int trial = 0; trial < 1000 && ok; ++trial) {
    SparsifiedGradient sg;
    sg.budget_used = 8.0 * rng.uniform();
    if (rng.uniform() < 0.5) {
      const auto d = static_cast<Eigen::Index>(1 + rng.uniform_index(50));
      sg.original_shape = {d};
      sg.decomposition_kind = DecompositionKind::Entrywise;
      const auto k = rng.uniform_index(static_cast<std::uint64_t>(d) + 1);
      for (std::uint64_t i = 0; i < k; ++i)
        sg.kept_atoms.push_back(
            {StandardBasisAtom{static_cast<std::uint32_t>(
                 rng.uniform_index(static_cast<std::uint64_t>(d)))},
             20.0 * rng.uniform() - 10.0});
    } else {
      const auto n = static_cast<Eigen::Index>(1 + rng.uniform_index(8));
      const auto m = static_cast<Eigen::Index>(1 + rng.uniform_index(8));
      sg.original_shape = {n, m};
      sg.decomposition_kind = DecompositionKind::Svd;
      for (std::uint64_t i = 0, k = rng.uniform_index(5); i < k; ++i)
        sg.kept_atoms.push_back({RankOneAtom{oracles::random_vector(rng, n, -1, 1),
                                             oracles::random_vector(rng, m, -1, 1)},
                                 20.0 * rng.uniform() - 10.0});
    }
    if (!wire_equal(decode(encode(sg)), sg)) ok = false;
  }

  // documented hex fixture
  static const char* hex =
      "41544d4f"          // magic
      "01"                // version
      "00"                // kind
      "01"                // rank
      "0400000000000000"  // dim 4
      "02000000"          // 2 atoms
      "0000000000000040"  // budget 2.0
      "01000000" "0000c03f"
      "03000000" "000020c0";
  std::vector<std::uint8_t> bytes;
  for (const char* p = hex; p[0] && p[1]; p += 2) {
    auto nib = [](char c) {
      return static_cast<std::uint8_t>(c >= 'a' ? c - 'a' + 10 : c - '0');
    };
    bytes.push_back(static_cast<std::uint8_t>(nib(p[0]) << 4 | nib(p[1])));
  }
  SparsifiedGradient fixture;
  fixture.original_shape = {4};
  fixture.decomposition_kind = DecompositionKind::Entrywise;
  fixture.budget_used = 2.0;
  fixture.kept_atoms.push_back({StandardBasisAtom{1}, 1.5});
  fixture.kept_atoms.push_back({StandardBasisAtom{3}, -2.5});
  if (encode(fixture) != bytes) ok = false;
  if (!wire_equal(decode(bytes), fixture)) ok = false;

  report(10, ok, "decode(encode(.)) identity after f32 narrowing on 1000 "
                 "fuzzed messages; hex fixture bit-exact");
}

// ---------------------------------------------------------------- 11/12
std::string strip_millis(const std::string& csv) {
  std::string out;
  std::size_t start = 0;
  while (start < csv.size()) {
    std::size_t end = csv.find('\n', start);
    if (end == std::string::npos) end = csv.size();
    const std::string line = csv.substr(start, end - start);
    out += line.substr(0, line.rfind(','));
    out += '\n';
    start = end + 1;
  }
  return out;
}

void criteria_training() {
  const auto t0 = std::chrono::steady_clock::now();
  Task task = make_linear_regression(7, 1000, 50, 0.5);

  TrainConfig base;
  base.workers = 4;
  base.batch = 128;
  base.rounds = 400;
  base.master_seed = 42;

  auto run_method = [&](Method method, std::vector<LayerShape> layers) {
    TrainConfig cfg = base;
    cfg.method = method;
    cfg.layers = std::move(layers);
    cfg.gamma = tune_step_size(task, cfg, base.rounds);
    return train(task, cfg);
  };

  TrainResult dense = run_method({Method::Type::Dense}, {});
  const double dense_loss = dense.metrics.back().loss;
  const double dense_bytes_per_round =
      static_cast<double>(dense.total_bytes) / base.rounds;

  Method spectral;
  spectral.type = Method::Type::SpectralAtomo;
  spectral.s_prime = 3.0;
  TrainResult spec = run_method(spectral, {{5, 10}});
  TrainResult qsgd = run_method({Method::Type::Qsgd1Bit}, {});
  TrainResult tern = run_method({Method::Type::TernGrad}, {});

  auto loss_ok = [&](const TrainResult& r) {
    return r.metrics.back().loss <= dense_loss * 1.02;
  };
  auto bytes_frac = [&](const TrainResult& r) {
    return static_cast<double>(r.total_bytes) / base.rounds /
           dense_bytes_per_round;
  };

  const bool spec_loss = loss_ok(spec);
  const bool spec_bytes = bytes_frac(spec) <= 0.20;
  const bool qsgd_loss = loss_ok(qsgd);
  const bool qsgd_bytes = bytes_frac(qsgd) <= 0.20;
  const bool tern_loss = loss_ok(tern);

  // determinism under the fixed seed
  TrainResult dense2 = run_method({Method::Type::Dense}, {});
  const bool deterministic =
      dense2.final_w == dense.final_w &&
      strip_millis(metrics_csv(dense2.metrics)) ==
          strip_millis(metrics_csv(dense.metrics));

  const double secs = seconds_since(t0);
  const bool in_time = secs < 300.0;

  char detail[512];
  std::snprintf(detail, sizeof detail,
                "dense loss %.5f; spectral loss %.5f (bytes %.1f%%), qsgd "
                "loss %.5f (bytes %.1f%%), terngrad loss %.5f (bytes %.1f%%); "
                "%.1f s",
                dense_loss, spec.metrics.back().loss, 100 * bytes_frac(spec),
                qsgd.metrics.back().loss, 100 * bytes_frac(qsgd),
                tern.metrics.back().loss, 100 * bytes_frac(tern), secs);
  report(11,
         spec_loss && spec_bytes && qsgd_loss && qsgd_bytes && tern_loss &&
             deterministic && in_time,
         std::string("end-to-end convergence analogue: ") + detail);

  // criterion 12: byte-identical metrics CSV (wall-time column excluded)
  TrainConfig cfg12 = base;
  cfg12.rounds = 30;
  cfg12.method.type = Method::Type::Qsgd1Bit;
  cfg12.gamma = 0.25;
  TrainResult a = train(task, cfg12);
  TrainResult b = train(task, cfg12);
  report(12,
         strip_millis(metrics_csv(a.metrics)) ==
             strip_millis(metrics_csv(b.metrics)),
         "same seed reproduces the metrics CSV byte-for-byte (excluding the "
         "wall-time column)");
}

}  // namespace

int main() {
  struct Entry {
    int id;
    void (*fn)();
  };
  const Entry entries[] = {
      {1, criterion_solver_optimality}, {2, criterion_variant_equivalence},
      {3, criterion_balanced_closed_form}, {4, criterion_quantizer_reduction},
      {5, criterion_unbiasedness},      {6, criterion_second_moment},
      {7, criterion_norm_equivalence},  {8, criterion_svd_wins_flag},
      {9, criterion_svd_correctness},   {10, criterion_codec},
      {11, criteria_training},  // also reports criterion 12
  };
  for (const Entry& e : entries) {
    try {
      e.fn();
    } catch (const std::exception& ex) {
      report(e.id, false, std::string("unexpected exception: ") + ex.what());
    }
  }
  if (failures > 0)
    std::printf("%d criterion(s) failed\n", failures);
  else
    std::printf("all criteria passed\n");
  return failures;
}
