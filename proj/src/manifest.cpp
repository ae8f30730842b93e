#include "remlab/manifest.hpp"

#include <chrono>
#include <ctime>

namespace remlab {

std::string fnv1a_hex(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RunManifest make_manifest(std::string command, std::vector<std::string> inputs,
                          std::string_view canonical_config, std::uint64_t seed,
                          std::vector<std::string> outputs) {
  RunManifest m;
  m.command = std::move(command);
  m.inputs = std::move(inputs);
  m.seed = seed;
  m.outputs = std::move(outputs);
  std::string canon = m.command + '\n';
  for (const auto& i : m.inputs) canon += i + '\n';
  canon += std::string(canonical_config) + '\n' + std::to_string(seed) + '\n' + m.version;
  m.config_digest = fnv1a_hex(canon);
  m.timestamp = current_timestamp();
  return m;
}

nlohmann::ordered_json manifest_json(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["command"] = m.command;
  j["inputs"] = m.inputs;
  j["config_digest"] = m.config_digest;
  j["seed"] = m.seed;
  j["version"] = m.version;
  j["outputs"] = m.outputs;
  j["timestamp"] = m.timestamp;
  return j;
}

std::string current_timestamp() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace remlab
