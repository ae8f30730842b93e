#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace remlab {

inline constexpr const char* kToolVersion = "0.1.0";

/// Provenance of one CLI run. The digest covers command, inputs, config and
/// seed (not the timestamp), so deterministic reruns produce the same digest.
struct RunManifest {
  std::string command;
  std::vector<std::string> inputs;
  std::string config_digest;
  std::uint64_t seed = 0;
  std::string version = kToolVersion;
  std::vector<std::string> outputs;
  std::string timestamp;  // the only volatile field
};

std::string fnv1a_hex(std::string_view data);

RunManifest make_manifest(std::string command, std::vector<std::string> inputs,
                          std::string_view canonical_config, std::uint64_t seed,
                          std::vector<std::string> outputs);

nlohmann::ordered_json manifest_json(const RunManifest& m);

std::string current_timestamp();

}  // namespace remlab
