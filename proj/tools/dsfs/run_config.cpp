#include "run_config.hpp"

#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>

#include "dsfs/errors.hpp"
#include "json.hpp"

namespace dsfs::tools {

namespace {

using nlohmann::json;

json parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("config: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return json::parse(buf.str());
  } catch (const json::exception& e) {
    throw IoError("config: " + path + ": " + e.what());
  }
}

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : allowed) known = known || it.key() == k;
    if (!known) throw IoError("config: unknown key \"" + it.key() + "\" in " + where);
  }
}

template <typename T>
void take(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw IoError(std::string("config: bad value for \"") + key + "\": " + e.what());
  }
}

// Seeds may exceed 2^53, so the file stores them as strings; bare numbers
// are accepted for convenience.
void take_seed(const json& j, const char* key, std::uint64_t& out) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    char* end = nullptr;
    out = std::strtoull(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0')
      throw IoError("config: seed \"" + s + "\" is not a decimal integer");
  } else if (v.is_number_unsigned() || v.is_number_integer()) {
    out = v.get<std::uint64_t>();
  } else {
    throw IoError("config: seed must be a string or an integer");
  }
}

}  // namespace

active_loop::Strategy parse_strategy(const std::string& name) {
  if (name == "uncertainty") return active_loop::Strategy::Uncertainty;
  if (name == "random") return active_loop::Strategy::Random;
  throw InvalidConfig("strategy: expected uncertainty or random, got \"" + name + "\"");
}

RunConfig load_run_config(const std::string& path) {
  const json j = parse_file(path);
  if (!j.is_object()) throw IoError("config: top level must be an object");
  check_keys(j, {"network", "output_dir", "threads", "seed", "active", "train", "eval"},
             "the top level");

  RunConfig cfg;
  take(j, "network", cfg.network);
  take(j, "output_dir", cfg.output_dir);
  take(j, "threads", cfg.threads);
  take_seed(j, "seed", cfg.active.seed);

  if (j.contains("active")) {
    const json& a = j.at("active");
    check_keys(a,
               {"pool_size", "init_labeled", "per_epoch", "epochs", "label_budget",
                "strategy", "use_inner_box", "use_hull_labeling", "hidden",
                "inflation", "label_tol", "freeze_prefix"},
               "\"active\"");
    take(a, "pool_size", cfg.active.pool_size);
    take(a, "init_labeled", cfg.active.init_labeled);
    take(a, "per_epoch", cfg.active.per_epoch);
    take(a, "epochs", cfg.active.epochs);
    take(a, "label_budget", cfg.active.label_budget);
    take(a, "use_inner_box", cfg.active.use_inner_box);
    take(a, "use_hull_labeling", cfg.active.use_hull_labeling);
    take(a, "hidden", cfg.active.hidden);
    take(a, "inflation", cfg.active.inflation);
    take(a, "label_tol", cfg.active.label_tol);
    take(a, "freeze_prefix", cfg.active.freeze_prefix);
    if (a.contains("strategy"))
      cfg.active.strategy = parse_strategy(a.at("strategy").get<std::string>());
  }

  if (j.contains("train")) {
    const json& t = j.at("train");
    check_keys(t,
               {"steps", "learning_rate", "beta1", "beta2", "eps", "weight_decay",
                "batch_size"},
               "\"train\"");
    take(t, "steps", cfg.active.train.steps);
    take(t, "learning_rate", cfg.active.train.learning_rate);
    take(t, "beta1", cfg.active.train.beta1);
    take(t, "beta2", cfg.active.train.beta2);
    take(t, "eps", cfg.active.train.eps);
    take(t, "weight_decay", cfg.active.train.weight_decay);
    take(t, "batch_size", cfg.active.train.batch_size);
  }

  if (j.contains("eval")) {
    const json& e = j.at("eval");
    check_keys(e,
               {"test_count", "grid_resolution", "levels", "windows",
                "window_length", "eval_count"},
               "\"eval\"");
    take(e, "test_count", cfg.test_count);
    take(e, "grid_resolution", cfg.grid_resolution);
    take(e, "levels", cfg.levels);
    take(e, "windows", cfg.windows);
    take(e, "window_length", cfg.window_length);
    take(e, "eval_count", cfg.eval_count);
  }

  return cfg;
}

}  // namespace dsfs::tools
