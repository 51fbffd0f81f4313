#include <atomo/config.hpp>

#include <fstream>
#include <sstream>

#include <atomo/errors.hpp>

namespace atomo {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse_string(const std::string& text) {
  KeyValueConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(lineno) +
                          ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) +
                        ": expected key = value");
    cfg.sections_[section][trim(line.substr(0, eq))] =
        trim(line.substr(eq + 1));
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str());
}

bool KeyValueConfig::has(const std::string& section,
                         const std::string& key) const {
  auto s = sections_.find(section);
  return s != sections_.end() && s->second.count(key) > 0;
}

std::string KeyValueConfig::get(const std::string& section,
                                const std::string& key) const {
  if (!has(section, key))
    throw ConfigError("missing config key [" + section + "] " + key);
  return sections_.at(section).at(key);
}

std::string KeyValueConfig::get_or(const std::string& section,
                                   const std::string& key,
                                   const std::string& fallback) const {
  return has(section, key) ? get(section, key) : fallback;
}

double KeyValueConfig::get_double(const std::string& section,
                                 const std::string& key) const {
  const std::string v = get(section, key);
  try {
    std::size_t used = 0;
    double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("[" + section + "] " + key + ": not a number: " + v);
  }
}

long KeyValueConfig::get_long(const std::string& section,
                              const std::string& key) const {
  const std::string v = get(section, key);
  try {
    std::size_t used = 0;
    long l = std::stol(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return l;
  } catch (const std::exception&) {
    throw ConfigError("[" + section + "] " + key + ": not an integer: " + v);
  }
}

void KeyValueConfig::set(const std::string& section, const std::string& key,
                         const std::string& value) {
  sections_[section][key] = value;
}

Method parse_method(const std::string& spec) {
  // "name" or "name:param", e.g. "spectral:3", "atomo:5", "lq:1.5".
  const auto colon = spec.find(':');
  const std::string name = trim(spec.substr(0, colon));
  const std::string param =
      colon == std::string::npos ? "" : trim(spec.substr(colon + 1));
  auto need_param = [&](const char* what) {
    if (param.empty())
      throw ConfigError("method " + name + " needs a parameter (" + what +
                        "), e.g. " + name + ":3");
    try {
      return std::stod(param);
    } catch (const std::exception&) {
      throw ConfigError("method " + name + ": bad parameter " + param);
    }
  };
  Method m;
  if (name == "dense") {
    m.type = Method::Type::Dense;
  } else if (name == "atomo" || name == "atomo_entrywise") {
    m.type = Method::Type::AtomoEntrywise;
    m.s = need_param("sparsity budget s");
  } else if (name == "spectral" || name == "spectral_atomo") {
    m.type = Method::Type::SpectralAtomo;
    m.s_prime = need_param("sparsity budget s'");
  } else if (name == "qsgd1bit" || name == "qsgd_1bit") {
    m.type = Method::Type::Qsgd1Bit;
  } else if (name == "terngrad") {
    m.type = Method::Type::TernGrad;
  } else if (name == "lq") {
    m.type = Method::Type::Lq;
    m.q = need_param("norm exponent q");
  } else {
    throw ConfigError("unknown method: " + name);
  }
  return m;
}

std::vector<LayerShape> parse_layers(const std::string& spec) {
  std::vector<LayerShape> layers;
  for (const auto& item : split(spec, ',')) {
    const auto x = item.find('x');
    if (x == std::string::npos)
      throw ConfigError("layer shape must look like 5x10: " + item);
    try {
      layers.push_back(
          {std::stol(item.substr(0, x)), std::stol(item.substr(x + 1))});
    } catch (const std::exception&) {
      throw ConfigError("bad layer shape: " + item);
    }
  }
  return layers;
}

ExperimentConfig load_experiment(const KeyValueConfig& cfg) {
  ExperimentConfig e;
  e.raw = cfg;

  const std::string kind = cfg.get_or("task", "kind", "linreg");
  const auto samples = cfg.get_long("task", "samples");
  const auto dim = cfg.get_long("task", "dim");
  const auto task_seed = static_cast<std::uint64_t>(
      cfg.has("task", "seed") ? cfg.get_long("task", "seed") : 7);
  if (kind == "linreg") {
    const double noise =
        cfg.has("task", "noise") ? cfg.get_double("task", "noise") : 0.0;
    e.task = make_linear_regression(task_seed, samples, dim, noise);
  } else if (kind == "logreg") {
    e.task = make_logistic_regression(task_seed, samples, dim);
  } else {
    throw ConfigError("unknown task kind: " + kind);
  }

  e.train.workers = static_cast<int>(cfg.get_long("train", "workers"));
  e.train.batch = static_cast<int>(cfg.get_long("train", "batch"));
  e.train.rounds = static_cast<int>(cfg.get_long("train", "rounds"));
  e.train.master_seed = static_cast<std::uint64_t>(
      cfg.has("train", "seed") ? cfg.get_long("train", "seed") : 0);
  const std::string gamma = cfg.get_or("train", "gamma", "auto");
  if (gamma == "auto") {
    e.tune_gamma = true;
    e.train.gamma = 1.0;  // replaced by the tuner
  } else {
    e.train.gamma = cfg.get_double("train", "gamma");
  }
  if (cfg.has("train", "tune_rounds"))
    e.tune_rounds = static_cast<int>(cfg.get_long("train", "tune_rounds"));
  if (cfg.has("train", "loss_threshold"))
    e.loss_threshold = cfg.get_double("train", "loss_threshold");

  if (cfg.has("method", "name"))
    e.train.method = parse_method(cfg.get("method", "name"));
  if (cfg.has("shape", "layers"))
    e.train.layers = parse_layers(cfg.get("shape", "layers"));

  if (cfg.has("sweep", "methods")) {
    // Reuse split on commas; parse_method handles the name:param form.
    std::istringstream in(cfg.get("sweep", "methods"));
    std::string item;
    while (std::getline(in, item, ',')) {
      const auto begin = item.find_first_not_of(" \t");
      if (begin == std::string::npos) continue;
      const auto end = item.find_last_not_of(" \t");
      e.sweep_methods.push_back(
          parse_method(item.substr(begin, end - begin + 1)));
    }
  }
  return e;
}

}  // namespace atomo
