#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <atomo/codec.hpp>
#include <atomo/config.hpp>
#include <atomo/errors.hpp>
#include <atomo/quantizer.hpp>
#include <atomo/sim.hpp>
#include <atomo/spectral.hpp>

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct CommonFlags {
  std::uint64_t seed = 0;
  std::string out;
  std::string config_path;
  std::string format = "json";
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--seed", flags.seed, "Master seed for all randomness");
  cmd->add_option("--out", flags.out, "Output path (file or directory)");
  cmd->add_option("--config", flags.config_path, "Key-value config file");
  cmd->add_option("--format", flags.format, "Output format: json|csv")
      ->check(CLI::IsMember({"json", "csv"}));
}

void write_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw atomo::Error("cannot write " + path.string());
    out << content;
  }
  fs::rename(tmp, path);
}

void emit(const CommonFlags& flags, const std::string& content) {
  if (flags.out.empty())
    std::cout << content << "\n";
  else
    write_atomic(flags.out, content + "\n");
}

Eigen::VectorXd parse_inline_vector(const std::string& csv) {
  std::vector<double> vals;
  std::istringstream in(csv);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      vals.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw atomo::ConfigError("bad number in vector: " + item);
    }
  }
  if (vals.empty()) throw atomo::ConfigError("empty vector");
  return Eigen::Map<Eigen::VectorXd>(vals.data(),
                                     static_cast<Eigen::Index>(vals.size()));
}

std::string kv_lines(const ordered_json& j) {
  std::ostringstream out;
  for (auto it = j.begin(); it != j.end(); ++it)
    out << it.key() << "," << it.value().dump() << "\n";
  std::string s = out.str();
  if (!s.empty()) s.pop_back();
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ATOMO: variance-optimal unbiased gradient sparsification"};
  app.require_subcommand(1);

  // probabilities
  CommonFlags prob_flags;
  std::string prob_lambda, prob_input;
  double prob_s = 0.0;
  auto* prob = app.add_subcommand(
      "probabilities", "Optimal inclusion probabilities for a budget");
  prob->add_option("--lambda", prob_lambda, "Inline coefficients, e.g. 3,1,1,1");
  prob->add_option("--input", prob_input, "ATEN tensor file of coefficients");
  prob->add_option("-s,--budget", prob_s, "Sparsity budget s")->required();
  add_common(prob, prob_flags);

  // sparsify
  CommonFlags sp_flags;
  std::string sp_input, sp_kind = "entrywise";
  double sp_s = 0.0;
  auto* sparsify = app.add_subcommand(
      "sparsify", "Sample a sparsified gradient and encode it");
  sparsify->add_option("--input", sp_input, "ATEN tensor file")->required();
  sparsify->add_option("--kind", sp_kind, "entrywise|svd")
      ->check(CLI::IsMember({"entrywise", "svd"}));
  sparsify->add_option("-s,--budget", sp_s, "Sparsity budget")->required();
  add_common(sparsify, sp_flags);

  // quantize
  CommonFlags qz_flags;
  std::string qz_input, qz_method = "qsgd1bit";
  double qz_q = 2.0;
  auto* quantize =
      app.add_subcommand("quantize", "1-bit QSGD / TernGrad / lq quantization");
  quantize->add_option("--input", qz_input, "ATEN tensor file")->required();
  quantize->add_option("--method", qz_method, "qsgd1bit|terngrad|lq")
      ->check(CLI::IsMember({"qsgd1bit", "terngrad", "lq"}));
  quantize->add_option("-q", qz_q, "Norm exponent for --method lq");
  add_common(quantize, qz_flags);

  // compare
  CommonFlags cmp_flags;
  std::string cmp_input;
  double cmp_s = 0.0;
  auto* compare = app.add_subcommand(
      "compare", "Entry-wise vs SVD sparsification at equal cost");
  compare->add_option("--input", cmp_input, "ATEN matrix file")->required();
  compare->add_option("-s,--budget", cmp_s, "Sparsity budget s")->required();
  add_common(compare, cmp_flags);

  // train
  CommonFlags train_flags;
  auto* train_cmd =
      app.add_subcommand("train", "Run the parameter-server simulator");
  add_common(train_cmd, train_flags);

  // sweep
  CommonFlags sweep_flags;
  auto* sweep_cmd = app.add_subcommand(
      "sweep", "Train every method in the config's [sweep] list");
  add_common(sweep_cmd, sweep_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (prob->parsed()) {
      Eigen::VectorXd lambda;
      if (!prob_lambda.empty())
        lambda = parse_inline_vector(prob_lambda);
      else if (!prob_input.empty())
        lambda = atomo::load_tensor(prob_input).data();
      else
        throw atomo::ConfigError("need --lambda or --input");
      auto p = atomo::atomo_probabilities_sorted(lambda, {prob_s});
      ordered_json j;
      j["p"] = std::vector<double>(p.p.data(), p.p.data() + p.p.size());
      j["f"] = atomo::expected_second_moment(lambda, p);
      j["bound"] = atomo::optimal_second_moment_lower_bound(lambda, {prob_s});
      j["balanced"] = atomo::is_s_balanced(lambda, {prob_s});
      emit(prob_flags,
           prob_flags.format == "csv" ? kv_lines(j) : j.dump(2));
    } else if (sparsify->parsed()) {
      atomo::Tensor t = atomo::load_tensor(sp_input);
      atomo::AtomicDecomposition d = sp_kind == "svd"
                                         ? atomo::decompose_svd(t)
                                         : atomo::decompose_entrywise(t);
      auto p = atomo::atomo_probabilities_sorted(d.coefficients, {sp_s});
      atomo::RngStream rng(sp_flags.seed, 0, 0, 0);
      auto sg = atomo::sample_sparsification(d, p, rng);
      auto wire = atomo::encode(sg);
      auto cost = atomo::message_cost(sg);
      if (!sp_flags.out.empty()) {
        std::ofstream out(sp_flags.out, std::ios::binary | std::ios::trunc);
        out.write(reinterpret_cast<const char*>(wire.data()),
                  static_cast<std::streamsize>(wire.size()));
      }
      ordered_json j;
      j["kept_atoms"] = sg.kept_atoms.size();
      j["budget"] = sg.budget_used;
      j["reals_transmitted"] = cost.reals_transmitted;
      j["bytes_on_wire"] = cost.bytes_on_wire;
      j["index_overhead_bytes"] = cost.index_overhead_bytes;
      std::cout << j.dump(2) << "\n";
    } else if (quantize->parsed()) {
      Eigen::VectorXd g = atomo::load_tensor(qz_input).data();
      atomo::RngStream rng(qz_flags.seed, 0, 0, 0);
      atomo::SparsifiedGradient sg;
      if (qz_method == "qsgd1bit")
        sg = atomo::qsgd_1bit(g, rng);
      else if (qz_method == "terngrad")
        sg = atomo::terngrad(g, rng);
      else
        sg = atomo::lq_quantize(g, atomo::QNorm{qz_q, false}, rng);
      auto wire = atomo::encode(sg);
      auto cost = atomo::message_cost(sg);
      if (!qz_flags.out.empty()) {
        std::ofstream out(qz_flags.out, std::ios::binary | std::ios::trunc);
        out.write(reinterpret_cast<const char*>(wire.data()),
                  static_cast<std::streamsize>(wire.size()));
      }
      ordered_json j;
      j["kept_atoms"] = sg.kept_atoms.size();
      j["budget"] = sg.budget_used;
      j["reals_transmitted"] = cost.reals_transmitted;
      j["bytes_on_wire"] = cost.bytes_on_wire;
      j["index_overhead_bytes"] = cost.index_overhead_bytes;
      std::cout << j.dump(2) << "\n";
    } else if (compare->parsed()) {
      atomo::Tensor x = atomo::load_tensor(cmp_input);
      auto c = atomo::compare_costs(x, {cmp_s});
      if (cmp_flags.format == "csv") {
        ordered_json j = ordered_json::parse(c.to_json());
        emit(cmp_flags, kv_lines(j));
      } else {
        emit(cmp_flags, c.to_json());
      }
    } else if (train_cmd->parsed() || sweep_cmd->parsed()) {
      const CommonFlags& flags =
          train_cmd->parsed() ? train_flags : sweep_flags;
      if (flags.config_path.empty())
        throw atomo::ConfigError("train/sweep need --config");
      auto kv = atomo::KeyValueConfig::parse_file(flags.config_path);
      if (flags.seed != 0)
        kv.set("train", "seed", std::to_string(flags.seed));
      atomo::ExperimentConfig exp = atomo::load_experiment(kv);
      fs::path out_dir = flags.out.empty() ? fs::path(".") : fs::path(flags.out);
      fs::create_directories(out_dir);

      auto run_one = [&](atomo::Method method) -> ordered_json {
        atomo::TrainConfig cfg = exp.train;
        cfg.method = method;
        if (exp.tune_gamma)
          cfg.gamma = atomo::tune_step_size(exp.task, cfg, exp.tune_rounds);
        atomo::TrainResult result = atomo::train(exp.task, cfg);

        long rounds_to_threshold = -1;
        if (exp.loss_threshold) {
          for (const auto& m : result.metrics)
            if (m.loss <= *exp.loss_threshold) {
              rounds_to_threshold = m.round;
              break;
            }
        }
        ordered_json resolved;
        for (const auto& [section, kvs] : exp.raw.sections())
          for (const auto& [key, value] : kvs)
            resolved[section.empty() ? key : section + "." + key] = value;
        resolved["method.resolved"] = method.name();
        resolved["train.gamma.resolved"] = cfg.gamma;

        ordered_json j;
        j["method"] = method.name();
        j["gamma"] = cfg.gamma;
        j["seed"] = cfg.master_seed;
        j["rounds"] = cfg.rounds;
        j["final_loss"] = result.metrics.back().loss;
        j["total_bytes"] = result.total_bytes;
        j["rounds_to_threshold"] = rounds_to_threshold;
        j["config"] = resolved;

        const std::string suffix =
            train_cmd->parsed() ? "" : "_" + method.name();
        write_atomic(out_dir / ("metrics" + suffix + ".csv"),
                     atomo::metrics_csv(result.metrics));
        write_atomic(out_dir / ("summary" + suffix + ".json"), j.dump(2));
        return j;
      };

      if (train_cmd->parsed()) {
        ordered_json j = run_one(exp.train.method);
        std::cout << j.dump(2) << "\n";
      } else {
        if (exp.sweep_methods.empty())
          throw atomo::ConfigError("sweep: [sweep] methods list is empty");
        std::ostringstream pareto;
        pareto << "method,total_bytes,final_loss\n";
        for (const auto& method : exp.sweep_methods) {
          ordered_json j = run_one(method);
          pareto << j["method"].get<std::string>() << ','
                 << j["total_bytes"].get<std::uint64_t>() << ','
                 << j["final_loss"].get<double>() << '\n';
        }
        write_atomic(out_dir / "pareto.csv", pareto.str());
        std::cout << "wrote " << (out_dir / "pareto.csv").string() << "\n";
      }
    }
  } catch (const atomo::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const atomo::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const atomo::ShapeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const atomo::InvalidBudgetError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const atomo::InfeasibleBudgetError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const atomo::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
