#include "domd/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "domd/error.hpp"
#include "domd/trace.hpp"

namespace domd {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double real_value(std::string_view text) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v))
    throw Error("cannot parse '" + std::string(text) + "' as a number");
  return v;
}

template <typename Int>
Int integer_value(std::string_view text) {
  Int v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw Error("cannot parse '" + std::string(text) + "' as an integer");
  return v;
}

bool switch_value(std::string_view text) {
  if (text == "on") return true;
  if (text == "off") return false;
  throw Error("expected on|off, got '" + std::string(text) + "'");
}

LossKind loss_value(std::string_view text) {
  if (text == "quadratic") return LossKind::synthetic_quadratic;
  if (text == "logistic") return LossKind::logistic;
  if (text == "ridge") return LossKind::ridge;
  throw Error("unknown loss '" + std::string(text) + "'");
}

InitPolicy init_value(std::string_view text) {
  if (text == "center") return InitPolicy::center;
  if (text == "random") return InitPolicy::random;
  throw Error("unknown init policy '" + std::string(text) + "'");
}

using Setter = std::function<void(ExperimentConfig&, std::string_view)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"algorithm", [](ExperimentConfig& c, std::string_view v) { c.algorithm = parse_algorithm(v); }},
      {"topology", [](ExperimentConfig& c, std::string_view v) { c.topology = TopologySpec::parse(v); }},
      {"nodes",
       [](ExperimentConfig& c, std::string_view v) {
         const auto n = integer_value<long long>(v);
         if (n < 1) throw Error("nodes must be at least 1");
         c.nodes = static_cast<std::size_t>(n);
       }},
      {"loss", [](ExperimentConfig& c, std::string_view v) { c.loss = loss_value(v); }},
      {"eta",
       [](ExperimentConfig& c, std::string_view v) {
         c.eta = real_value(v);
         if (!(c.eta > 0.0)) throw Error("eta must be positive");
       }},
      {"T",
       [](ExperimentConfig& c, std::string_view v) {
         c.T = integer_value<std::int64_t>(v);
         if (c.T < 1) throw Error("T must be at least 1");
       }},
      {"lazy_alpha",
       [](ExperimentConfig& c, std::string_view v) {
         const double a = real_value(v);
         if (!(a > 0.0 && a < 1.0)) throw Error("lazy_alpha must lie in (0, 1)");
         c.lazy_alpha = a;
       }},
      {"mirror",
       [](ExperimentConfig& c, std::string_view v) {
         if (v != "euclidean" && v != "entropy") throw Error("mirror must be euclidean or entropy");
         c.mirror = std::string(v);
       }},
      {"feasible",
       [](ExperimentConfig& c, std::string_view v) {
         FeasibleSet::parse(v, 1, 0.0);  // syntax check; the dimension is known later
         c.feasible = std::string(v);
       }},
      {"entropy_eps",
       [](ExperimentConfig& c, std::string_view v) {
         c.entropy_eps = real_value(v);
         if (!(c.entropy_eps > 0.0 && c.entropy_eps < 1.0)) throw Error("entropy_eps must lie in (0, 1)");
       }},
      {"lambda",
       [](ExperimentConfig& c, std::string_view v) {
         c.lambda = real_value(v);
         if (!(c.lambda > 0.0)) throw Error("lambda must be positive");
       }},
      {"drift", [](ExperimentConfig& c, std::string_view v) { c.drift = Drift::parse(v); }},
      {"dim",
       [](ExperimentConfig& c, std::string_view v) {
         const auto d = integer_value<long long>(v);
         if (d < 1) throw Error("dim must be at least 1");
         c.dim = static_cast<std::size_t>(d);
       }},
      {"offset_scale",
       [](ExperimentConfig& c, std::string_view v) {
         c.offset_scale = real_value(v);
         if (!(c.offset_scale >= 0.0 && c.offset_scale < 1.0)) throw Error("offset_scale must lie in [0, 1)");
       }},
      {"batch",
       [](ExperimentConfig& c, std::string_view v) {
         const auto b = integer_value<long long>(v);
         if (b < 1) throw Error("batch must be at least 1");
         c.batch = static_cast<std::size_t>(b);
       }},
      {"reg_lambda",
       [](ExperimentConfig& c, std::string_view v) {
         c.reg_lambda = real_value(v);
         if (c.reg_lambda < 0.0) throw Error("reg_lambda must be nonnegative");
       }},
      {"dataset",
       [](ExperimentConfig& c, std::string_view v) {
         if (v.empty()) throw Error("dataset path is empty");
         c.dataset = std::string(v);
       }},
      {"partition", [](ExperimentConfig& c, std::string_view v) { c.partition = parse_partition_policy(v); }},
      {"target_class", [](ExperimentConfig& c, std::string_view v) { c.target_class = real_value(v); }},
      {"scale_features", [](ExperimentConfig& c, std::string_view v) { c.scale_features = switch_value(v); }},
      {"k_policy", [](ExperimentConfig& c, std::string_view v) { c.k_policy = KPolicy::parse(v); }},
      {"init", [](ExperimentConfig& c, std::string_view v) { c.init = init_value(v); }},
      {"diagnostics", [](ExperimentConfig& c, std::string_view v) { c.diagnostics = switch_value(v); }},
      {"seed", [](ExperimentConfig& c, std::string_view v) { c.seed = integer_value<std::uint64_t>(v); }},
      {"out_dir",
       [](ExperimentConfig& c, std::string_view v) {
         if (v.empty()) throw Error("out_dir is empty");
         c.out_dir = std::string(v);
       }},
      {"run_name",
       [](ExperimentConfig& c, std::string_view v) {
         if (v.empty() || v.find('/') != std::string_view::npos) throw Error("run_name must be a plain file stem");
         c.run_name = std::string(v);
       }},
  };
  return table;
}

const std::vector<std::string>& required_keys() {
  static const std::vector<std::string> keys = {"algorithm", "topology", "nodes", "loss", "eta", "T"};
  return keys;
}

}  // namespace

ExperimentConfig parse_config_text(std::string_view text) {
  ExperimentConfig config;
  std::map<std::string, std::size_t, std::less<>> seen;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto newline = text.find('\n');
    std::string_view line = text.substr(0, newline);
    text = newline == std::string_view::npos ? std::string_view{} : text.substr(newline + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const std::string where = " at line " + std::to_string(line_no);
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw Error("expected 'key = value'" + where);
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    const auto setter = setters().find(key);
    if (setter == setters().end()) throw Error("unknown key '" + std::string(key) + "'" + where);
    if (seen.contains(key)) throw Error("duplicate key at line " + std::to_string(line_no));
    seen.emplace(std::string(key), line_no);
    try {
      setter->second(config, value);
    } catch (const Error& e) {
      throw Error(std::string(e.what()) + where);
    }
  }
  for (const auto& key : required_keys())
    if (!seen.contains(key)) throw Error("missing required key '" + key + "'");

  if (config.loss == LossKind::synthetic_quadratic && config.feasible == "simplex")
    throw Error("quadratic loss needs a ball or box feasible set");
  if (config.mirror == "entropy" && config.feasible != "simplex")
    throw Error("mirror = entropy needs feasible = simplex");
  return config;
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open config '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::echo() const {
  std::vector<std::pair<std::string, std::string>> out = {
      {"algorithm", to_string(algorithm)},
      {"topology", topology.to_string()},
      {"nodes", std::to_string(nodes)},
      {"lazy_alpha", lazy_alpha ? format_real(*lazy_alpha) : "none"},
      {"loss", to_string(loss)},
      {"eta", format_real(eta)},
      {"T", std::to_string(T)},
      {"mirror", mirror},
      {"feasible", feasible},
      {"entropy_eps", format_real(entropy_eps)},
      {"k_policy", k_policy.to_string()},
      {"init", init == InitPolicy::center ? "center" : "random"},
      {"diagnostics", diagnostics ? "on" : "off"},
      {"seed", std::to_string(seed)},
      {"run_name", run_name},
  };
  if (loss == LossKind::synthetic_quadratic) {
    out.insert(out.end(), {{"lambda", format_real(lambda)},
                           {"drift", drift.to_string()},
                           {"dim", std::to_string(dim)},
                           {"offset_scale", format_real(offset_scale)}});
  } else {
    out.insert(out.end(), {{"dataset", dataset},
                           {"batch", std::to_string(batch)},
                           {"reg_lambda", format_real(reg_lambda)},
                           {"partition", to_string(partition)},
                           {"target_class", target_class ? format_real(*target_class) : "none"},
                           {"scale_features", scale_features ? "on" : "off"}});
  }
  return out;
}

}  // namespace domd
