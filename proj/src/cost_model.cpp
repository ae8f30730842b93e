#include "remlab/cost_model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace remlab {

double NetworkConfig::start_for(std::string_view name) const {
  auto it = start_overrides.find(name);
  return it == start_overrides.end() ? start_us : it->second;
}

void NetworkConfig::validate() const {
  if (!std::isfinite(rtt_us) || rtt_us <= 0)
    throw std::invalid_argument("rtt_us must be finite and > 0");
  if (!std::isfinite(bandwidth_bytes_per_us) || bandwidth_bytes_per_us <= 0)
    throw std::invalid_argument("bandwidth must be finite and > 0");
  if (!std::isfinite(start_us) || start_us < 0)
    throw std::invalid_argument("start_us must be finite and >= 0");
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double require_num(std::string_view v, std::size_t line) {
  try {
    std::size_t pos = 0;
    std::string s(v);
    double x = std::stod(s, &pos);
    if (pos != s.size() || !std::isfinite(x)) throw std::invalid_argument("trailing");
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("network config line " + std::to_string(line) +
                                ": bad numeric value '" + std::string(v) + "'");
  }
}

}  // namespace

NetworkConfig parse_network_config(std::istream& in) {
  NetworkConfig cfg;
  bool in_overrides = false;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    if (s == "[start_overrides]") {
      in_overrides = true;
      continue;
    }
    auto eq = s.find('=');
    if (eq == std::string_view::npos)
      throw std::invalid_argument("network config line " + std::to_string(lineno) +
                                  ": expected 'key = value'");
    std::string key(trim(s.substr(0, eq)));
    std::string_view val = trim(s.substr(eq + 1));
    if (in_overrides) {
      cfg.start_overrides[key] = require_num(val, lineno);
    } else if (key == "rtt_us") {
      cfg.rtt_us = require_num(val, lineno);
    } else if (key == "bandwidth_gbps") {
      cfg.bandwidth_bytes_per_us = gbps_to_bytes_per_us(require_num(val, lineno));
    } else if (key == "start_us") {
      cfg.start_us = require_num(val, lineno);
    } else {
      throw std::invalid_argument("network config line " + std::to_string(lineno) +
                                  ": unknown key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

NetworkConfig load_network_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open network config: " + path.string());
  return parse_network_config(in);
}

double cost_async(const ApiCall& api, const NetworkConfig& net) {
  if (api.cls != ApiClass::Async)
    throw std::invalid_argument("cost_async on a " + std::string(to_string(api.cls)) + " call");
  return net.start_for(api.name) + net.rtt_us / 2.0 +
         static_cast<double>(api.payload_req) / net.bandwidth_bytes_per_us;
}

double cost_sync(const ApiCall& api, const NetworkConfig& net) {
  if (api.cls != ApiClass::Sync)
    throw std::invalid_argument("cost_sync on a " + std::string(to_string(api.cls)) + " call");
  return net.start_for(api.name) + net.rtt_us +
         static_cast<double>(api.payload_req + api.payload_resp) / net.bandwidth_bytes_per_us;
}

double accel_async(const ApiCall& api) {
  if (api.cls != ApiClass::Async)
    throw std::invalid_argument("accel_async on a " + std::string(to_string(api.cls)) + " call");
  return api.gpu_exec_us;
}

double accel_local(const ApiCall& api) {
  if (api.cls != ApiClass::Local)
    throw std::invalid_argument("accel_local on a " + std::string(to_string(api.cls)) + " call");
  return api.gpu_exec_us - api.local_exec_us;
}

CostBreakdown total_cost(const Trace& trace, const NetworkConfig& net) {
  net.validate();
  CostBreakdown b;
  for (const ApiCall& api : trace.calls) {
    switch (api.cls) {
      case ApiClass::Async:
        b.sum_cost_async_us += cost_async(api, net);
        b.sum_accel_async_us += accel_async(api);
        b.n_async += 1;
        break;
      case ApiClass::Sync:
        b.sum_cost_sync_us += cost_sync(api, net);
        b.n_sync += 1;
        break;
      case ApiClass::Local:
        b.sum_accel_local_us += accel_local(api);
        b.n_local += 1;
        break;
    }
  }
  b.async_contrib_us = b.sum_cost_async_us - b.sum_accel_async_us;
  b.sync_contrib_us = b.sum_cost_sync_us;
  b.local_contrib_us = -b.sum_accel_local_us;
  b.total_us = b.sum_cost_async_us - b.sum_accel_async_us + b.sum_cost_sync_us -
               b.sum_accel_local_us;
  return b;
}

double degradation(const Trace& trace, const NetworkConfig& net, double baseline_us) {
  if (!(baseline_us > 0))
    throw std::invalid_argument("baseline_us must be > 0");
  return total_cost(trace, net).total_us / baseline_us;
}

}  // namespace remlab
