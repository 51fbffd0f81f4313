#ifndef ATOMO_CONFIG_HPP
#define ATOMO_CONFIG_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <atomo/sim.hpp>

namespace atomo {

/// Flat key-value config with [sections]; '#' starts a comment.
class KeyValueConfig {
 public:
  static KeyValueConfig parse_file(const std::string& path);
  static KeyValueConfig parse_string(const std::string& text);

  bool has(const std::string& section, const std::string& key) const;
  std::string get(const std::string& section, const std::string& key) const;
  std::string get_or(const std::string& section, const std::string& key,
                     const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key) const;
  long get_long(const std::string& section, const std::string& key) const;

  void set(const std::string& section, const std::string& key,
           const std::string& value);

  const std::map<std::string, std::map<std::string, std::string>>& sections()
      const {
    return sections_;
  }

 private:
  std::map<std::string, std::map<std::string, std::string>> sections_;
};

Method parse_method(const std::string& spec);
std::vector<LayerShape> parse_layers(const std::string& spec);

struct ExperimentConfig {
  Task task;
  TrainConfig train;
  bool tune_gamma = false;
  int tune_rounds = 50;
  std::optional<double> loss_threshold;
  KeyValueConfig raw;
  std::vector<Method> sweep_methods;  // [sweep] methods, for `sweep`
};

ExperimentConfig load_experiment(const KeyValueConfig& cfg);

}  // namespace atomo

#endif  // ATOMO_CONFIG_HPP
