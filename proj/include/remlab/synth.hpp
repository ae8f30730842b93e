#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "remlab/trace.hpp"

namespace remlab {

/// One homogeneous bucket of calls to generate. `cls` is the class after SR;
/// `base_cls` (when different) is the class recorded in the trace, with
/// sr_class set so that apply_sr reproduces `cls`.
struct GroupSpec {
  ApiClass cls = ApiClass::Sync;
  std::optional<ApiClass> base_cls;
  std::string name;  // default chosen per class
  std::uint64_t count = 0;
  double total_gpu_us = 0;
  double total_local_us = 0;
  std::uint64_t total_payload_req = 0;
  std::uint64_t total_payload_resp = 0;
  double spread = 0;  // 0..1 per-call jitter; totals are rescaled to match exactly
  std::optional<double> gap_mean_us;
};

struct SynthProfile {
  enum class Order { Shuffle, AsGiven };

  std::vector<GroupSpec> groups;
  double cpu_gap_mean_us = 0;
  Order order = Order::Shuffle;
  std::uint64_t seed = 0;
  std::string application;
  double baseline_us = 0;  // informational: local execution time the profile targets
};

/// Deterministic generator: per-class counts match the profile exactly and
/// cumulative times/payloads match the group totals (up to rounding).
/// Identical profile and seed produce identical traces.
Trace synth_trace(const SynthProfile& profile);

/// Key/value profile file with repeatable [async]/[sync]/[local] sections.
SynthProfile load_profile(const std::filesystem::path& path);
SynthProfile parse_profile(std::istream& in, std::string_view source);

}  // namespace remlab
