#include "dirflow/config.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "dirflow/checks.hpp"
#include "dirflow/errors.hpp"

namespace dirflow {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& msg) {
  throw ConfigError("config field '" + field + "': " + msg);
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError("config syntax error at line " + std::to_string(line) + ", column " + std::to_string(col) +
                      ": " + e.what());
  }
}

void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, _] : obj.items()) {
    if (!ok.count(k)) fail(path.empty() ? k : path + "." + k, "unknown field");
  }
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  const double x = j.get<double>();
  if (!std::isfinite(x)) fail(path, "must be finite");
  return x;
}

long integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<long>();
}

Eigen::Vector2d vec2(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) fail(path, "expected [x, y]");
  return {number(j[0], path + "[0]"), number(j[1], path + "[1]")};
}

void check_schema(const json& root) {
  if (!root.is_object()) fail("<root>", "expected an object");
  if (!root.contains("schema")) fail("schema", "missing (expected " + std::to_string(kConfigSchema) + ")");
  if (integer(root["schema"], "schema") != kConfigSchema) {
    fail("schema", "unsupported version (expected " + std::to_string(kConfigSchema) + ")");
  }
}

RadialLaw parse_law(const json& j) {
  if (!j.is_object()) fail("distribution", "expected {\"atoms\": [[r, p], ...]} or {\"gaussian2d\": true}");
  reject_unknown(j, "distribution", {"atoms", "gaussian2d"});
  if (j.contains("gaussian2d")) {
    if (j.contains("atoms")) fail("distribution", "give either atoms or gaussian2d");
    if (!j["gaussian2d"].is_boolean() || !j["gaussian2d"].get<bool>()) fail("distribution.gaussian2d", "must be true");
    return RadialLaw::gaussian2d();
  }
  if (!j.contains("atoms") || !j["atoms"].is_array()) fail("distribution.atoms", "expected [[r, p], ...]");
  std::vector<std::pair<double, double>> rp;
  for (std::size_t i = 0; i < j["atoms"].size(); ++i) {
    const std::string p = "distribution.atoms[" + std::to_string(i) + "]";
    const Eigen::Vector2d a = vec2(j["atoms"][i], p);
    rp.emplace_back(a.x(), a.y());
  }
  try {
    return RadialLaw::atoms(rp);
  } catch (const ConfigError& e) {
    fail("distribution.atoms", e.what());
  }
}

Schedule parse_schedule(const json& j) {
  if (!j.is_object() || j.size() != 1) fail("schedule", "expected one of constant, geometric, power");
  Schedule s;
  if (j.contains("constant")) {
    s = Schedule::constant(number(j["constant"], "schedule.constant"));
  } else if (j.contains("geometric")) {
    const json& g = j["geometric"];
    if (!g.is_object()) fail("schedule.geometric", "expected {\"eta0\": ..., \"q\": ...}");
    reject_unknown(g, "schedule.geometric", {"eta0", "q"});
    if (!g.contains("eta0") || !g.contains("q")) fail("schedule.geometric", "needs eta0 and q");
    s = Schedule::geometric(number(g["eta0"], "schedule.geometric.eta0"), number(g["q"], "schedule.geometric.q"));
  } else if (j.contains("power")) {
    const json& g = j["power"];
    if (!g.is_object()) fail("schedule.power", "expected {\"eta0\": ..., \"alpha\": ...}");
    reject_unknown(g, "schedule.power", {"eta0", "alpha"});
    if (!g.contains("eta0") || !g.contains("alpha")) fail("schedule.power", "needs eta0 and alpha");
    s = Schedule::power(number(g["eta0"], "schedule.power.eta0"), number(g["alpha"], "schedule.power.alpha"));
  } else {
    fail("schedule", "expected one of constant, geometric, power");
  }
  try {
    s.validate();
  } catch (const ConfigError& e) {
    fail("schedule", e.what());
  }
  return s;
}

std::map<std::string, double> constant_map(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected {\"name\": value}");
  std::map<std::string, double> out;
  for (const auto& [k, val] : j.items()) out[k] = number(val, path + "." + k);
  return out;
}

BoundRequest parse_bound(const json& j, const std::string& path) {
  static const std::set<std::string> curves = {"linear_flow",     "gd_negative",     "gd_suff",        "deep_lower",
                                               "deep_upper",      "deep_norm_lower", "deep_norm_upper", "relu_diff_init",
                                               "relu_gd",         "constant"};
  if (!j.is_object()) fail(path, "expected an object");
  reject_unknown(j, path, {"curve", "anchor", "set", "scale", "form", "delta", "value", "side"});
  BoundRequest b;
  if (!j.contains("curve") || !j["curve"].is_string()) fail(path + ".curve", "missing curve name");
  b.curve = j["curve"].get<std::string>();
  if (!curves.count(b.curve)) fail(path + ".curve", "unknown curve '" + b.curve + "'");
  if (j.contains("anchor")) b.anchor = number(j["anchor"], path + ".anchor");
  if (b.anchor < 0.0) fail(path + ".anchor", "must be >= 0");
  if (j.contains("set")) b.set = constant_map(j["set"], path + ".set");
  if (j.contains("scale")) b.scale = constant_map(j["scale"], path + ".scale");
  if (j.contains("form")) {
    if (!j["form"].is_string()) fail(path + ".form", "expected a string");
    b.form = j["form"].get<std::string>();
    if (b.form != "printed" && b.form != "derived" && b.form != "default") {
      fail(path + ".form", "expected printed, derived or default");
    }
  }
  if (j.contains("delta")) b.delta = number(j["delta"], path + ".delta");
  if (!(b.delta > 0.0)) fail(path + ".delta", "must be > 0");
  if (j.contains("value")) b.value = number(j["value"], path + ".value");
  if (j.contains("side")) {
    if (!j["side"].is_string()) fail(path + ".side", "expected lower or upper");
    b.side = j["side"].get<std::string>();
    if (b.side != "lower" && b.side != "upper") fail(path + ".side", "expected lower or upper");
  }
  return b;
}

std::vector<double> grid_axis(const json& j, const std::string& path, double unit) {
  if (!j.is_object()) fail(path, "expected {\"from\": a, \"to\": b, \"step\": h}");
  reject_unknown(j, path, {"from", "to", "step"});
  if (!j.contains("from") || !j.contains("to") || !j.contains("step")) fail(path, "needs from, to and step");
  const double a = number(j["from"], path + ".from"), b = number(j["to"], path + ".to");
  const double h = number(j["step"], path + ".step");
  if (!(h > 0.0) || b < a) fail(path, "needs step > 0 and to >= from");
  const long n = std::lround(std::floor((b - a) / h + 1e-9)) + 1;
  if (n > 100000) fail(path, "too many grid points");
  std::vector<double> out;
  for (long i = 0; i < n; ++i) out.push_back((a + static_cast<double>(i) * h) * unit);
  return out;
}

}  // namespace

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig parse_run_config(const std::string& text) {
  const json root = parse_json(text);
  check_schema(root);
  reject_unknown(root, "", {"schema", "distribution", "model", "v", "start", "method", "schedule", "horizon", "step",
                            "batch", "seed", "record_every", "bounds", "slack", "name"});
  RunConfig cfg;
  if (root.contains("distribution")) cfg.law = parse_law(root["distribution"]);

  if (!root.contains("model")) fail("model", "missing");
  const json& m = root["model"];
  if (!m.is_object() || !m.contains("model") || !m["model"].is_string()) {
    fail("model.model", "expected linear, deep_linear or two_neuron_relu");
  }
  const std::string kind = m["model"].get<std::string>();
  if (kind == "linear") {
    reject_unknown(m, "model", {"model"});
    cfg.model = ModelSpec::linear();
  } else if (kind == "deep_linear") {
    reject_unknown(m, "model", {"model", "N", "w_e0", "full_layers", "widths"});
    if (!m.contains("N")) fail("model.N", "missing");
    const long N = integer(m["N"], "model.N");
    if (N < 1 || N > 64) fail("model.N", "must be in [1, 64]");
    if (m.contains("widths")) {
      if (!m["widths"].is_array()) fail("model.widths", "expected an integer array");
      for (std::size_t i = 0; i < m["widths"].size(); ++i) {
        cfg.widths.push_back(static_cast<int>(integer(m["widths"][i], "model.widths[" + std::to_string(i) + "]")));
      }
    }
    cfg.model = ModelSpec::deep_linear(static_cast<int>(N), cfg.widths);
    if (m.contains("full_layers")) {
      if (!m["full_layers"].is_boolean()) fail("model.full_layers", "expected true or false");
      cfg.full_layers = m["full_layers"].get<bool>();
    }
    if (m.contains("w_e0")) {
      cfg.start = {vec2(m["w_e0"], "model.w_e0")};
      if (cfg.start[0].norm() == 0.0) fail("model.w_e0", "must be nonzero");
    }
  } else if (kind == "two_neuron_relu") {
    reject_unknown(m, "model", {"model"});
    cfg.model = ModelSpec::two_neuron_relu();
  } else {
    fail("model.model", "unknown model '" + kind + "'");
  }
  try {
    cfg.model.validate();
  } catch (const ConfigError& e) {
    fail("model", e.what());
  }

  if (root.contains("v")) {
    cfg.v = vec2(root["v"], "v");
    if (!(cfg.v.norm() > 0.0)) fail("v", "must be nonzero");
    cfg.v.normalize();
  }

  if (root.contains("start")) {
    if (cfg.model.kind == ModelKind::DeepLinear && !cfg.start.empty()) fail("start", "given twice (model.w_e0)");
    const json& s = root["start"];
    cfg.start.clear();
    if (s.is_array() && !s.empty() && s[0].is_array()) {
      for (std::size_t i = 0; i < s.size(); ++i) cfg.start.push_back(vec2(s[i], "start[" + std::to_string(i) + "]"));
    } else {
      cfg.start.push_back(vec2(s, "start"));
    }
  }
  if (static_cast<int>(cfg.start.size()) != cfg.model.neurons()) {
    fail(cfg.model.kind == ModelKind::DeepLinear ? "model.w_e0" : "start",
         "expected " + std::to_string(cfg.model.neurons()) + " start weight(s)");
  }
  if (cfg.model.kind == ModelKind::DeepLinear && cfg.model.depth >= 2 && cfg.start[0].norm() == 0.0) {
    fail("model.w_e0", "must be nonzero");
  }

  if (root.contains("method")) {
    if (!root["method"].is_string()) fail("method", "expected flow or gd");
    cfg.method = root["method"].get<std::string>();
    if (cfg.method != "flow" && cfg.method != "gd") fail("method", "expected flow or gd");
  }
  if (cfg.method == "gd") {
    if (!root.contains("schedule")) fail("schedule", "required for gd");
    cfg.schedule = parse_schedule(root["schedule"]);
  } else if (root.contains("schedule")) {
    fail("schedule", "only used with method gd");
  }
  if (!root.contains("horizon")) fail("horizon", "missing");
  cfg.horizon = number(root["horizon"], "horizon");
  if (!(cfg.horizon > 0.0)) fail("horizon", "must be > 0");
  if (cfg.method == "gd" && (cfg.horizon != std::floor(cfg.horizon) || cfg.horizon > 1e8)) {
    fail("horizon", "must be a whole number of steps (at most 1e8) for gd");
  }
  if (root.contains("step")) {
    if (cfg.method != "flow") fail("step", "only used with method flow");
    cfg.step = number(root["step"], "step");
    if (!(cfg.step > 0.0)) fail("step", "must be > 0");
  }
  if (cfg.full_layers && cfg.method != "flow") fail("model.full_layers", "only used with method flow");

  if (root.contains("batch")) {
    const json& b = root["batch"];
    if (b.is_string() && b.get<std::string>() == "full") {
      cfg.minibatch = false;
    } else if (b.is_object() && b.size() == 1 && b.contains("minibatch")) {
      const long n = integer(b["minibatch"], "batch.minibatch");
      if (n < 1 || n > 100000000) fail("batch.minibatch", "must be in [1, 1e8]");
      cfg.minibatch = true;
      cfg.batch = static_cast<int>(n);
    } else {
      fail("batch", "expected \"full\" or {\"minibatch\": n}");
    }
    if (cfg.minibatch && cfg.method != "gd") fail("batch", "minibatch needs method gd");
  }
  if (root.contains("seed")) {
    if (!root["seed"].is_number_integer() || root["seed"].get<long long>() < 0) {
      fail("seed", "expected a nonnegative integer");
    }
    cfg.seed = root["seed"].get<std::uint64_t>();
  }
  if (root.contains("record_every")) {
    cfg.record_every = integer(root["record_every"], "record_every");
    if (cfg.record_every < 1) fail("record_every", "must be >= 1");
  }
  if (root.contains("bounds")) {
    if (!root["bounds"].is_array()) fail("bounds", "expected an array");
    for (std::size_t i = 0; i < root["bounds"].size(); ++i) {
      cfg.bounds.push_back(parse_bound(root["bounds"][i], "bounds[" + std::to_string(i) + "]"));
    }
  }
  if (root.contains("slack")) {
    cfg.slack = number(root["slack"], "slack");
    if (cfg.slack < 0.0) fail("slack", "must be >= 0");
  }
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) { return parse_run_config(read_text(path)); }

SignMapConfig parse_signmap_config(const std::string& text) {
  const json root = parse_json(text);
  check_schema(root);
  reject_unknown(root, "", {"schema", "distribution", "v", "norms", "thetas_deg", "mc_samples", "seed", "name"});
  SignMapConfig cfg;
  if (root.contains("distribution")) cfg.law = parse_law(root["distribution"]);
  if (root.contains("v")) {
    cfg.v = vec2(root["v"], "v");
    if (!(cfg.v.norm() > 0.0)) fail("v", "must be nonzero");
    cfg.v.normalize();
  }
  cfg.norms = root.contains("norms") ? grid_axis(root["norms"], "norms", 1.0) : fig1_norms();
  cfg.thetas = root.contains("thetas_deg") ? grid_axis(root["thetas_deg"], "thetas_deg", std::numbers::pi / 180.0)
                                           : fig1_thetas();
  if (root.contains("mc_samples")) {
    cfg.mc_samples = integer(root["mc_samples"], "mc_samples");
    if (cfg.mc_samples != 0 && cfg.mc_samples < 2) fail("mc_samples", "must be 0 or >= 2");
  }
  if (root.contains("seed")) {
    if (!root["seed"].is_number_integer() || root["seed"].get<long long>() < 0) {
      fail("seed", "expected a nonnegative integer");
    }
    cfg.seed = root["seed"].get<std::uint64_t>();
  }
  return cfg;
}

SignMapConfig load_signmap_config(const std::filesystem::path& path) {
  return parse_signmap_config(read_text(path));
}

}  // namespace dirflow
