#pragma once

#include <random>
#include <string>
#include <vector>

#include "remlab/synth.hpp"
#include "remlab/trace.hpp"

namespace testutil {

using namespace remlab;

struct Rng {
  std::mt19937_64 eng;
  explicit Rng(std::uint64_t seed) : eng(seed) {}
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(eng() >> 11) * 0x1.0p-53);
  }
  std::uint64_t index(std::uint64_t n) { return eng() % n; }
  bool chance(double p) { return uniform(0, 1) < p; }
};

inline ApiCall make_call(ApiClass cls, std::string name, double exec_us, double gap_us = 0,
                         std::uint64_t preq = 0, std::uint64_t presp = 0,
                         double local_us = 0) {
  ApiCall c;
  c.name = std::move(name);
  c.cls = cls;
  c.gpu_exec_us = exec_us;
  c.cpu_gap_us = gap_us;
  c.payload_req = preq;
  c.payload_resp = presp;
  c.local_exec_us = local_us;
  return c;
}

inline Trace finalize(std::vector<ApiCall> calls, std::string app = "test") {
  for (std::size_t i = 0; i < calls.size(); ++i) calls[i].seq = i;
  Trace t;
  t.calls = std::move(calls);
  t.meta.application = std::move(app);
  return t;
}

/// Mixed-class trace with SR annotations, payloads up to 16 MB on sync
/// responses and gaps up to 1 ms. Device-dominated, like the workloads the
/// model targets.
inline Trace random_trace(std::uint64_t seed, std::size_t min_calls = 40,
                          std::size_t max_calls = 200) {
  Rng rng(seed);
  std::size_t n = min_calls + rng.index(max_calls - min_calls + 1);
  std::vector<ApiCall> calls;
  for (std::size_t i = 0; i < n; ++i) {
    double roll = rng.uniform(0, 1);
    ApiCall c;
    c.cpu_gap_us = rng.chance(0.6) ? 0.0 : rng.uniform(0, 1000);
    if (roll < 0.25) {
      c.cls = ApiClass::Async;
      c.name = "LaunchKernel";
      c.gpu_exec_us = rng.uniform(1, 40);
      c.payload_req = 64 + rng.index(4096);
    } else if (roll < 0.45) {
      c.cls = ApiClass::Sync;
      c.sr_class = ApiClass::Local;
      c.name = "GetDevice";
      c.gpu_exec_us = rng.uniform(1, 25);
      c.local_exec_us = rng.uniform(0, c.gpu_exec_us);
      c.payload_req = 16;
      c.payload_resp = 32;
    } else if (roll < 0.55) {
      c.cls = ApiClass::Sync;
      c.sr_class = ApiClass::Async;
      c.name = "CreateTensorDescriptor";
      c.gpu_exec_us = rng.uniform(1, 20);
      c.payload_req = 64 + rng.index(512);
    } else {
      c.cls = ApiClass::Sync;
      bool copy = rng.chance(0.15);
      c.name = copy ? "MemcpyD2H" : "StreamSynchronize";
      c.gpu_exec_us = rng.uniform(20, 2000);
      if (copy) {
        double r = rng.uniform(0, 1);
        std::uint64_t sz = r < 0.8 ? 64 + rng.index(4096)
                          : r < 0.95 ? 32768 + rng.index(1u << 20)
                                     : (1u << 20) + rng.index(15u << 20);
        c.payload_resp = sz;
        c.payload_req = 64;
      }
    }
    calls.push_back(std::move(c));
  }
  return finalize(std::move(calls), "random-" + std::to_string(seed));
}

/// Training-shaped workload. Each iteration alternates a chatty CPU-bound
/// update stretch (tiny kernels, start overhead dominates) with device-bound
/// passes where one long kernel feeds a blocking read-back, so batch size
/// trades start amortization against delayed kernel arrival.
inline SynthProfile training_profile(int iterations = 3, std::uint64_t seed = 11) {
  SynthProfile p;
  p.order = SynthProfile::Order::AsGiven;
  p.seed = seed;
  p.application = "train-shaped";
  auto grp = [](ApiClass cls, const char* name, std::uint64_t count, double total_gpu,
                double gap_mean, std::uint64_t preq, std::uint64_t presp = 0) {
    GroupSpec g;
    g.cls = cls;
    g.name = name;
    g.count = count;
    g.total_gpu_us = total_gpu;
    g.gap_mean_us = gap_mean;
    g.total_payload_req = preq;
    g.total_payload_resp = presp;
    g.spread = 0.2;
    return g;
  };
  for (int i = 0; i < iterations; ++i) {
    // parameter-update stretch: many tiny launches, no device pressure
    p.groups.push_back(grp(ApiClass::Async, "LaunchKernel", 40, 12, 1.0, 40 * 64));
    p.groups.push_back(grp(ApiClass::Sync, "StreamSynchronize", 1, 0.5, 2.0, 0));
    // forward/backward passes: a long kernel followed by helper launches and
    // a loss read-back that waits on the device
    for (int k = 0; k < 4; ++k) {
      p.groups.push_back(grp(ApiClass::Async, "LaunchKernel", 1, 600, 1.0, 256));
      p.groups.push_back(grp(ApiClass::Async, "LaunchKernel", 80, 80, 1.0, 80 * 64));
      p.groups.push_back(grp(ApiClass::Sync, "MemcpyD2H", 1, 5, 2.0, 64, 4096));
    }
  }
  return p;
}

}  // namespace testutil
