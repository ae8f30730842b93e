#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>

#include "remlab/trace.hpp"

namespace remlab {

inline constexpr double kBytesPerUsPerGbps = 125.0;  // 1 Gbps = 125 bytes/us

constexpr double gbps_to_bytes_per_us(double gbps) { return gbps * kBytesPerUsPerGbps; }
constexpr double bytes_per_us_to_gbps(double bpus) { return bpus / kBytesPerUsPerGbps; }

struct NetworkConfig {
  double rtt_us = 0;
  double bandwidth_bytes_per_us = 0;
  double start_us = 0;  // per-request software overhead (serialize + post)
  std::map<std::string, double, std::less<>> start_overrides;

  double start_for(std::string_view name) const;
  void validate() const;  // throws std::invalid_argument
};

/// Key/value text: rtt_us, bandwidth_gbps, start_us, optional
/// [start_overrides] section of per-API-name start_us values.
NetworkConfig load_network_config(const std::filesystem::path& path);
NetworkConfig parse_network_config(std::istream& in);

/// Terms of the accumulated remoting cost. total_us may be negative
/// (remoting faster than local).
struct CostBreakdown {
  double sum_cost_async_us = 0;
  double sum_cost_sync_us = 0;
  double sum_accel_async_us = 0;
  double sum_accel_local_us = 0;
  double total_us = 0;
  double async_contrib_us = 0;  // sum_cost_async - sum_accel_async
  double sync_contrib_us = 0;   // sum_cost_sync
  double local_contrib_us = 0;  // -sum_accel_local
  std::uint64_t n_async = 0;
  std::uint64_t n_sync = 0;
  std::uint64_t n_local = 0;
};

/// Remoting cost of one async call: start + rtt/2 + payload_req/bandwidth.
/// No reply is awaited, so the response payload is excluded.
double cost_async(const ApiCall& api, const NetworkConfig& net);

/// Remoting cost of one sync call: start + rtt + (payload_req +
/// payload_resp)/bandwidth. The full RTT is charged because the response
/// delays the next call.
double cost_sync(const ApiCall& api, const NetworkConfig& net);

/// Arrival acceleration credited to an async call: its execution time.
double accel_async(const ApiCall& api);

/// Acceleration from answering locally: gpu_exec - local_exec (may be
/// negative when the shadow is slower).
double accel_local(const ApiCall& api);

/// Accumulates the per-call terms over a trace with resolved classes.
CostBreakdown total_cost(const Trace& trace, const NetworkConfig& net);

/// total_cost as a fraction of the local baseline; negative means speedup.
double degradation(const Trace& trace, const NetworkConfig& net, double baseline_us);

}  // namespace remlab
