#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace pmlab::cli {

/// Everything a `run` invocation needs. An empty `states` list means the full
/// state catalog.
struct RunConfig {
  std::vector<std::string> states;
  long long shots = 20000;
  std::uint64_t seed = 0;
  int resamples = 1000;
  std::string noise = "depol:default";
  std::string mode = "sampled";
  std::string format = "csv";
  std::string output;  // empty = stdout
  int threads = 1;

  bool operator==(const RunConfig&) const = default;
};

/// Reject unknown state labels, malformed noise/mode/format specs, and
/// nonpositive shots/resamples/threads before any work starts.
void validate(const RunConfig& config);

/// The labels a config runs over, in catalog order for "all".
std::vector<std::string> resolve_states(const RunConfig& config);

/// JSON round-trip: parse(serialize(c)) == c for every valid config.
std::string config_to_json(const RunConfig& config);
RunConfig config_from_json(std::string_view text);

/// Overlay the keys present in a JSON document onto `config`; keys absent
/// from the document keep their current values. Unknown keys are rejected.
void apply_json_overrides(RunConfig& config, std::string_view text);

}  // namespace pmlab::cli
