#include "privesc/io/run_config.hpp"

#include <fstream>

#include "privesc/io/serialize.hpp"

namespace privesc::io {

using nlohmann::json;

nlohmann::json to_json(const RunConfig& c) {
  return {{"env", io::to_json(c.env)},
          {"train", a2c::to_json(c.train)},
          {"net", net::to_json(c.net)},
          {"eval",
           {{"policy", c.eval.policy},
            {"samples", c.eval.samples},
            {"seed", c.eval.seed},
            {"parallel", c.eval.parallel},
            {"multi", c.eval.multi}}},
          {"out_dir", c.out_dir}};
}

RunConfig run_config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (key != "env" && key != "train" && key != "net" && key != "eval" && key != "out_dir") {
      throw ConfigError("unknown config section: " + key);
    }
  }
  const json defaults = to_json(RunConfig{});
  for (const char* section : {"env", "train", "net", "eval"}) {
    if (!j.contains(section)) continue;
    if (!j[section].is_object()) throw ConfigError(std::string("config section must be an object: ") + section);
    for (const auto& [key, _] : j[section].items()) {
      if (!defaults[section].contains(key)) throw ConfigError("unknown config key: " + std::string(section) + "." + key);
    }
  }
  RunConfig c;
  try {
    if (j.contains("env")) c.env = env_config_from_json(j["env"]);
    if (j.contains("train")) c.train = a2c::train_config_from_json(j["train"]);
    if (j.contains("net")) c.net = net::net_config_from_json(j["net"]);
    if (j.contains("eval")) {
      const json& e = j["eval"];
      c.eval.policy = e.value("policy", c.eval.policy);
      c.eval.samples = e.value("samples", c.eval.samples);
      c.eval.seed = e.value("seed", c.eval.seed);
      c.eval.parallel = e.value("parallel", c.eval.parallel);
      c.eval.multi = e.value("multi", c.eval.multi);
      if (c.eval.samples < 1) throw ConfigError("eval.samples must be positive");
    }
    c.out_dir = j.value("out_dir", c.out_dir);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file: " + path.string());
  json j;
  try {
    j = json::parse(f, nullptr, true, true);
  } catch (const json::exception& e) {
    throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  return run_config_from_json(j);
}

RunConfig apply_overrides(const RunConfig& base, const std::vector<std::string>& overrides) {
  json j = to_json(base);
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override must look like key=value: " + o);
    const std::string key = o.substr(0, eq);
    const std::string text = o.substr(eq + 1);
    json value;
    try {
      value = json::parse(text);
    } catch (const json::exception&) {
      value = text;
    }
    json::json_pointer ptr("/" + [&] {
      std::string p = key;
      for (char& ch : p) {
        if (ch == '.') ch = '/';
      }
      return p;
    }());
    j[ptr] = value;
  }
  return run_config_from_json(j);
}

}  // namespace privesc::io
