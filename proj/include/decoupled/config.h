#ifndef DECOUPLED_CONFIG_H_
#define DECOUPLED_CONFIG_H_

// Experiment configuration: a flat `key = value` text format, one entry per
// line, `#` starts a comment. Every key can also be overridden from the CLI.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "decoupled/core.h"
#include "decoupled/environment.h"

namespace decoupled {

enum class PolicyKind { kFtpl, kFtrl, kEbtc, kMixedFtpl, kMixedFtrl };
enum class EnvKind { kStochastic, kAlternating, kSca };

std::string_view to_string(PolicyKind kind);
std::string_view to_string(EnvKind kind);
PolicyKind parse_policy(std::string_view text);
EnvKind parse_env(std::string_view text);

// Raised for malformed or out-of-range settings; what() names the key.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ExperimentConfig {
  std::string experiment = "default";
  PolicyKind policy = PolicyKind::kFtpl;
  EnvKind env = EnvKind::kStochastic;

  // Stochastic means, or SCA base means.
  std::vector<double> means = {0.4, 0.45, 0.55, 0.7, 0.8};
  // Alternating environment.
  std::size_t arms = 8;
  double delta = 0.125;
  double growth = 1.6;
  ArmIndex optimal_arm = 0;
  // SCA offset schedule.
  OffsetSchedule offset;

  std::int64_t horizon = 10000;
  int repetitions = 200;
  std::uint64_t seed = 1;

  double alpha = 3.0;
  double beta = 2.0 / 3.0;
  double c = 2.0;

  int threads = 0;  // 0 = hardware concurrency
  bool time_steps = false;
  std::string output;  // CSV path; empty = stdout

  std::size_t num_arms() const;
  // Throws ConfigError naming the first invalid field.
  void validate() const;

  // Assigns one key from its text form; throws ConfigError on unknown keys
  // or unparsable values.
  void set(std::string_view key, std::string_view value);
  // Resolved settings in a stable order, as written to the manifest.
  std::vector<std::pair<std::string, std::string>> to_pairs() const;
};

// Parses `key = value` lines. Duplicate keys: last one wins.
std::vector<std::pair<std::string, std::string>> parse_key_values(std::istream& in);
ExperimentConfig load_config(const std::string& path);
void apply_pairs(ExperimentConfig& config,
                 const std::vector<std::pair<std::string, std::string>>& pairs);

// Shortest round-trip decimal form of a double.
std::string format_double(double value);
std::vector<double> parse_double_list(std::string_view text);
std::vector<std::string> split_list(std::string_view text, char sep = ',');

}  // namespace decoupled

#endif  // DECOUPLED_CONFIG_H_
