#pragma once

#include <cstdint>
#include <vector>

#include "remlab/cost_model.hpp"
#include "remlab/device.hpp"
#include "remlab/message.hpp"
#include "remlab/protocol.hpp"
#include "remlab/trace.hpp"
#include "remlab/transport.hpp"

namespace remlab {

struct ReplayOptions {
  bool sr = true;
  bool locality = true;
  DispatchPolicy dispatch{};
  TransportBackend backend = TransportBackend::Emulated;
  NetworkConfig net{};  // start_us applies under both backends

  void validate() const;  // locality requires sr
};

struct CallDelay {
  std::uint64_t call_seq = 0;
  double delay_us = 0;  // remote device submit minus local device submit
};

struct ReplayResult {
  double end_to_end_us = 0;
  double device_busy_us = 0;
  std::vector<CallDelay> arrival_delays;
  std::uint64_t message_count = 0;  // requests handed to the transport
  std::size_t max_outstanding = 0;
  bool barrier_appended = false;
  std::uint64_t assertions_checked = 0;

  std::vector<ExecutionRecord> device_log;
  std::vector<TransportEvent> fwd_events;
  std::vector<TransportEvent> rev_events;
  std::vector<Message> messages;
};

/// Local-execution baseline: calls run by their recorded class with zero
/// network terms; a trailing sync barrier is appended when missing so the
/// results are read before the clock stops.
ReplayResult replay_local(const Trace& trace);

/// Drives the client stub, emulated transport, proxy and device under one
/// simulated clock. FIFO device order and shadow soundness are asserted on
/// every run.
ReplayResult replay_remote(const Trace& trace, const ReplayOptions& opts);

struct ModelComparison {
  double replay_degradation = 0;
  double model_degradation = 0;
  double gap = 0;  // replay - model; positive when the model over-credits overlap
  double local_end_us = 0;
  double remote_end_us = 0;
  CostBreakdown model;
};

/// Runs the event-level replay and the analytic model on identical inputs
/// (including the trailing barrier) and reports both degradations.
/// Requires outstanding-request dispatch and the emulated backend.
ModelComparison compare_model(const Trace& trace, const ReplayOptions& opts,
                              double baseline_us);

}  // namespace remlab
