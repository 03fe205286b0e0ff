#include "decoupled/config.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <system_error>

namespace decoupled {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value,
                            std::string_view expected) {
  throw ConfigError("config key '" + std::string(key) + "': cannot parse '" +
                    std::string(value) + "' as " + std::string(expected));
}

double to_double(std::string_view key, std::string_view value) {
  value = trim(value);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    bad_value(key, value, "a number");
  }
  return out;
}

template <typename Int>
Int to_int(std::string_view key, std::string_view value) {
  value = trim(value);
  Int out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    bad_value(key, value, "an integer");
  }
  return out;
}

bool to_bool(std::string_view key, std::string_view value) {
  value = trim(value);
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  bad_value(key, value, "a boolean");
}

[[noreturn]] void invalid(std::string_view key, std::string_view why) {
  throw ConfigError("config key '" + std::string(key) + "': " + std::string(why));
}

}  // namespace

std::string_view to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kFtpl: return "ftpl";
    case PolicyKind::kFtrl: return "ftrl";
    case PolicyKind::kEbtc: return "ebtc";
    case PolicyKind::kMixedFtpl: return "mixed-ftpl";
    case PolicyKind::kMixedFtrl: return "mixed-ftrl";
  }
  return "?";
}

std::string_view to_string(EnvKind kind) {
  switch (kind) {
    case EnvKind::kStochastic: return "stochastic";
    case EnvKind::kAlternating: return "alternating";
    case EnvKind::kSca: return "sca";
  }
  return "?";
}

PolicyKind parse_policy(std::string_view text) {
  text = trim(text);
  for (auto kind : {PolicyKind::kFtpl, PolicyKind::kFtrl, PolicyKind::kEbtc,
                    PolicyKind::kMixedFtpl, PolicyKind::kMixedFtrl}) {
    if (to_string(kind) == text) return kind;
  }
  bad_value("policy", text, "one of ftpl, ftrl, ebtc, mixed-ftpl, mixed-ftrl");
}

EnvKind parse_env(std::string_view text) {
  text = trim(text);
  for (auto kind : {EnvKind::kStochastic, EnvKind::kAlternating, EnvKind::kSca}) {
    if (to_string(kind) == text) return kind;
  }
  bad_value("env", text, "one of stochastic, alternating, sca");
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

std::vector<std::string> split_list(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find(sep, start);
    const auto piece = trim(text.substr(start, end == std::string_view::npos
                                                   ? std::string_view::npos
                                                   : end - start));
    if (!piece.empty()) out.emplace_back(piece);
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return out;
}

std::vector<double> parse_double_list(std::string_view text) {
  std::vector<double> out;
  for (const auto& piece : split_list(text)) out.push_back(to_double("list", piece));
  return out;
}

std::size_t ExperimentConfig::num_arms() const {
  return env == EnvKind::kAlternating ? arms : means.size();
}

void ExperimentConfig::validate() const {
  if (experiment.empty()) invalid("experiment", "must not be empty");
  if (experiment.find_first_of(",\n") != std::string::npos) {
    invalid("experiment", "must not contain commas or newlines");
  }
  if (horizon < 1) invalid("horizon", "must be >= 1");
  if (repetitions < 1) invalid("repetitions", "must be >= 1");
  if (threads < 0) invalid("threads", "must be >= 0");
  if (env == EnvKind::kAlternating) {
    if (arms < 1) invalid("arms", "must be >= 1");
    if (!(delta > 0.0 && delta < 1.0)) invalid("delta", "must lie in (0, 1)");
    if (!(growth > 1.0)) invalid("growth", "must be > 1");
    if (optimal_arm >= arms) invalid("optimal_arm", "must be < arms");
  } else {
    if (means.empty()) invalid("means", "needs at least one arm");
    for (double m : means) {
      if (!(m >= 0.0 && m <= 1.0)) invalid("means", "entries must lie in [0, 1]");
    }
  }
  if (env == EnvKind::kSca) {
    if (!(offset.amplitude >= 0.0)) invalid("offset_amplitude", "must be >= 0");
    if (!(offset.period > 0.0)) invalid("offset_period", "must be > 0");
  }
  switch (policy) {
    case PolicyKind::kFtpl:
    case PolicyKind::kMixedFtpl:
      if (!(alpha > 1.0)) invalid("alpha", "must be > 1");
      if (!(c > 0.0)) invalid("c", "must be > 0");
      break;
    case PolicyKind::kFtrl:
    case PolicyKind::kMixedFtrl:
      if (!(beta > 0.0 && beta < 1.0)) invalid("beta", "must lie in (0, 1)");
      if (!(c > 0.0)) invalid("c", "must be > 0");
      break;
    case PolicyKind::kEbtc:
      break;
  }
}

void ExperimentConfig::set(std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  if (key == "experiment") {
    experiment = std::string(value);
  } else if (key == "policy") {
    policy = parse_policy(value);
  } else if (key == "env") {
    env = parse_env(value);
  } else if (key == "means") {
    means.clear();
    for (const auto& piece : split_list(value)) means.push_back(to_double(key, piece));
  } else if (key == "arms") {
    arms = to_int<std::size_t>(key, value);
  } else if (key == "delta") {
    delta = to_double(key, value);
  } else if (key == "growth") {
    growth = to_double(key, value);
  } else if (key == "optimal_arm") {
    optimal_arm = to_int<std::size_t>(key, value);
  } else if (key == "offset_kind") {
    if (value == "constant") {
      offset.kind = OffsetSchedule::Kind::kConstant;
    } else if (value == "sinusoid") {
      offset.kind = OffsetSchedule::Kind::kSinusoid;
    } else {
      bad_value(key, value, "constant or sinusoid");
    }
  } else if (key == "offset_amplitude") {
    offset.amplitude = to_double(key, value);
  } else if (key == "offset_period") {
    offset.period = to_double(key, value);
  } else if (key == "horizon" || key == "T") {
    horizon = to_int<std::int64_t>(key, value);
  } else if (key == "repetitions") {
    repetitions = to_int<int>(key, value);
  } else if (key == "seed") {
    seed = to_int<std::uint64_t>(key, value);
  } else if (key == "alpha") {
    alpha = to_double(key, value);
  } else if (key == "beta") {
    beta = to_double(key, value);
  } else if (key == "c") {
    c = to_double(key, value);
  } else if (key == "threads") {
    threads = to_int<int>(key, value);
  } else if (key == "time_steps") {
    time_steps = to_bool(key, value);
  } else if (key == "output") {
    output = std::string(value);
  } else {
    throw ConfigError("unknown config key '" + std::string(key) + "'");
  }
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::to_pairs() const {
  std::vector<std::pair<std::string, std::string>> out;
  out.emplace_back("experiment", experiment);
  out.emplace_back("policy", std::string(to_string(policy)));
  out.emplace_back("env", std::string(to_string(env)));
  if (env == EnvKind::kAlternating) {
    out.emplace_back("arms", std::to_string(arms));
    out.emplace_back("delta", format_double(delta));
    out.emplace_back("growth", format_double(growth));
    out.emplace_back("optimal_arm", std::to_string(optimal_arm));
  } else {
    std::string list;
    for (std::size_t i = 0; i < means.size(); ++i) {
      if (i) list += ",";
      list += format_double(means[i]);
    }
    out.emplace_back("means", list);
  }
  if (env == EnvKind::kSca) {
    out.emplace_back("offset_kind", offset.kind == OffsetSchedule::Kind::kConstant
                                        ? "constant"
                                        : "sinusoid");
    out.emplace_back("offset_amplitude", format_double(offset.amplitude));
    out.emplace_back("offset_period", format_double(offset.period));
  }
  out.emplace_back("horizon", std::to_string(horizon));
  out.emplace_back("repetitions", std::to_string(repetitions));
  out.emplace_back("seed", std::to_string(seed));
  out.emplace_back("alpha", format_double(alpha));
  out.emplace_back("beta", format_double(beta));
  out.emplace_back("c", format_double(c));
  out.emplace_back("time_steps", time_steps ? "true" : "false");
  return out;
}

std::vector<std::pair<std::string, std::string>> parse_key_values(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) {
      view = view.substr(0, hash);
    }
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) +
                        ": expected 'key = value'");
    }
    out.emplace_back(std::string(trim(view.substr(0, eq))),
                     std::string(trim(view.substr(eq + 1))));
  }
  return out;
}

void apply_pairs(ExperimentConfig& config,
                 const std::vector<std::pair<std::string, std::string>>& pairs) {
  for (const auto& [key, value] : pairs) config.set(key, value);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  ExperimentConfig config;
  apply_pairs(config, parse_key_values(in));
  return config;
}

}  // namespace decoupled
