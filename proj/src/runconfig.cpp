#include "pmlab/runconfig.hpp"

#include <algorithm>

#include "json.hpp"

#include "pmlab/errors.hpp"
#include "pmlab/photonlab.hpp"
#include "pmlab/qcore.hpp"

namespace pmlab::cli {

void validate(const RunConfig& config) {
  for (const std::string& label : config.states) {
    qcore::state_factory(label);  // throws InvalidInput on unknown labels
  }
  photonlab::NoiseModel::parse(config.noise);
  photonlab::run_mode_from_string(config.mode);
  if (config.format != "csv" && config.format != "json") {
    throw InvalidInput("format must be csv or json, found '" + config.format + "'");
  }
  if (config.shots < 1) throw InvalidInput("shots must be at least 1");
  if (config.resamples < photonlab::kMinResamples) {
    throw InvalidInput("resamples must be at least 100");
  }
  if (config.threads < 1) throw InvalidInput("threads must be at least 1");
}

std::vector<std::string> resolve_states(const RunConfig& config) {
  if (config.states.empty()) return qcore::state_labels();
  return config.states;
}

std::string config_to_json(const RunConfig& config) {
  nlohmann::json doc;
  if (config.states.empty()) {
    doc["states"] = "all";
  } else {
    doc["states"] = config.states;
  }
  doc["shots"] = config.shots;
  doc["seed"] = config.seed;
  doc["resamples"] = config.resamples;
  doc["noise"] = config.noise;
  doc["mode"] = config.mode;
  doc["format"] = config.format;
  doc["output"] = config.output;
  doc["threads"] = config.threads;
  return doc.dump(2) + "\n";
}

namespace {

void overlay(RunConfig& config, const nlohmann::json& doc) {
  static const std::vector<std::string> known = {
      "states", "shots", "seed",   "resamples", "noise",
      "mode",   "format", "output", "threads"};
  for (const auto& [key, value] : doc.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw InvalidInput("unknown config key '" + key + "'");
    }
    (void)value;
  }
  if (doc.contains("states")) {
    const auto& js = doc.at("states");
    if (js.is_string()) {
      std::string token = js.get<std::string>();
      if (token != "all") {
        throw InvalidInput("states must be \"all\" or an array of labels");
      }
      config.states.clear();
    } else {
      config.states = js.get<std::vector<std::string>>();
    }
  }
  if (doc.contains("shots")) config.shots = doc.at("shots").get<long long>();
  if (doc.contains("seed")) config.seed = doc.at("seed").get<std::uint64_t>();
  if (doc.contains("resamples")) config.resamples = doc.at("resamples").get<int>();
  if (doc.contains("noise")) config.noise = doc.at("noise").get<std::string>();
  if (doc.contains("mode")) config.mode = doc.at("mode").get<std::string>();
  if (doc.contains("format")) config.format = doc.at("format").get<std::string>();
  if (doc.contains("output")) config.output = doc.at("output").get<std::string>();
  if (doc.contains("threads")) config.threads = doc.at("threads").get<int>();
}

nlohmann::json parse_doc(std::string_view text) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& err) {
    throw InvalidInput(std::string("malformed config JSON: ") + err.what());
  }
}

}  // namespace

RunConfig config_from_json(std::string_view text) {
  RunConfig config;
  try {
    overlay(config, parse_doc(text));
  } catch (const nlohmann::json::exception& err) {
    throw InvalidInput(std::string("unexpected config shape: ") + err.what());
  }
  return config;
}

void apply_json_overrides(RunConfig& config, std::string_view text) {
  try {
    overlay(config, parse_doc(text));
  } catch (const nlohmann::json::exception& err) {
    throw InvalidInput(std::string("unexpected config shape: ") + err.what());
  }
}

}  // namespace pmlab::cli
