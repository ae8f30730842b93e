#include "remlab/replay.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace remlab {

namespace {

constexpr const char* kBarrierName = "StreamSynchronize";

ApiClass effective_of(const ApiCall& c, bool sr, bool locality) {
  if (sr && c.sr_class && (*c.sr_class == ApiClass::Async || locality)) return *c.sr_class;
  return c.cls;
}

/// Appends the read-back barrier unless the trace already ends with a call
/// that is sync under the given view.
Trace with_trailing_barrier(Trace trace, bool sr, bool locality, bool* appended) {
  bool need = trace.calls.empty() ||
              effective_of(trace.calls.back(), sr, locality) != ApiClass::Sync;
  if (appended) *appended = need;
  if (need) {
    ApiCall barrier;
    barrier.seq = trace.calls.size();
    barrier.name = kBarrierName;
    barrier.cls = ApiClass::Sync;
    trace.calls.push_back(std::move(barrier));
  }
  return trace;
}

struct LocalSchedule {
  double end_us = 0;
  DeviceTimeline device;
};

// Local mode: recorded (pre-SR) classes, no network. Async calls return
// immediately, sync calls block on the device, local-state queries block the
// CPU without occupying the device.
LocalSchedule run_local(const Trace& trace) {
  LocalSchedule s;
  double cpu = 0;
  for (const ApiCall& c : trace.calls) {
    cpu += c.cpu_gap_us;
    switch (c.cls) {
      case ApiClass::Local:
        cpu += c.gpu_exec_us;
        break;
      case ApiClass::Async:
        s.device.submit(c.name, c.seq, c.gpu_exec_us, cpu);
        break;
      case ApiClass::Sync:
        cpu = s.device.submit(c.name, c.seq, c.gpu_exec_us, cpu);
        break;
    }
  }
  s.end_us = cpu;
  return s;
}

std::vector<CallDelay> delays_vs_local(const std::vector<ExecutionRecord>& remote_log,
                                       const std::vector<ExecutionRecord>& local_log) {
  std::map<std::uint64_t, double> local_submit;
  for (const ExecutionRecord& r : local_log) local_submit[r.call_seq] = r.submit_us;
  std::vector<CallDelay> out;
  for (const ExecutionRecord& r : remote_log) {
    auto it = local_submit.find(r.call_seq);
    if (it != local_submit.end()) out.push_back({r.call_seq, r.submit_us - it->second});
  }
  return out;
}

}  // namespace

void ReplayOptions::validate() const {
  if (locality && !sr)
    throw std::invalid_argument("locality requires sr: the shadow state is its source");
  if (dispatch.mode == DispatchPolicy::Mode::Batch && dispatch.batch_size < 1)
    throw std::invalid_argument("batch size must be >= 1");
}

ReplayResult replay_local(const Trace& trace) {
  ReplayResult result;
  Trace run = with_trailing_barrier(trace, false, false, &result.barrier_appended);
  LocalSchedule s = run_local(run);
  result.end_to_end_us = s.end_us;
  result.device_busy_us = s.device.busy_total();
  result.device_log = s.device.log();
  return result;
}

ReplayResult replay_remote(const Trace& trace, const ReplayOptions& opts) {
  opts.validate();
  ReplayResult result;
  Trace run = with_trailing_barrier(trace, opts.sr, opts.locality, &result.barrier_appended);

  auto fwd = make_channel(opts.backend, opts.net);
  auto rev = make_channel(opts.backend, opts.net);
  DeviceTimeline device;
  Proxy proxy(device);
  ClientStub client(*fwd, *rev, proxy, opts.net, opts.dispatch, opts.sr, opts.locality);

  double cpu = 0;
  std::uint64_t local_calls = 0;
  for (const ApiCall& c : run.calls) {
    cpu += c.cpu_gap_us;
    CallOutcome out = client.call(c, cpu);
    if (!out.dispatched) ++local_calls;
    cpu = out.return_time_us;
  }

  // Invariants checked on every replay.
  std::uint64_t checked = 0;
  const auto& log = device.log();
  for (std::size_t i = 0; i + 1 < log.size(); ++i, ++checked) {
    if (log[i].call_seq >= log[i + 1].call_seq)
      throw ProtocolFault("device executed calls out of issue order");
    if (log[i + 1].start_us < log[i].finish_us)
      throw ProtocolFault("device overlapped serial executions");
  }
  if (fwd->pending_count() != 0 || rev->pending_count() != 0)
    throw ProtocolFault("undelivered messages after the trailing barrier");
  ++checked;
  if (opts.dispatch.mode == DispatchPolicy::Mode::Outstanding &&
      client.requests_sent() != run.calls.size() - local_calls)
    throw ProtocolFault("transport traffic does not match non-local call count");
  ++checked;

  result.end_to_end_us = cpu;
  result.device_busy_us = device.busy_total();
  result.message_count = client.requests_sent();
  result.max_outstanding = client.max_outstanding();
  result.assertions_checked = checked;
  result.device_log = log;
  result.fwd_events = fwd->events();
  result.rev_events = rev->events();
  result.messages = client.message_log();
  result.arrival_delays = delays_vs_local(log, run_local(run).device.log());
  return result;
}

ModelComparison compare_model(const Trace& trace, const ReplayOptions& opts,
                              double baseline_us) {
  opts.validate();
  if (opts.dispatch.mode != DispatchPolicy::Mode::Outstanding)
    throw std::invalid_argument("compare_model formalizes outstanding-request dispatch only");
  if (opts.backend != TransportBackend::Emulated)
    throw std::invalid_argument("compare_model requires the emulated transport");
  if (!(baseline_us > 0)) throw std::invalid_argument("baseline_us must be > 0");

  // One augmented trace feeds the local replay, the remote replay and the
  // analytic model.
  Trace run = with_trailing_barrier(trace, opts.sr, opts.locality, nullptr);

  ModelComparison cmp;
  cmp.local_end_us = run_local(run).end_us;
  cmp.remote_end_us = replay_remote(run, opts).end_to_end_us;
  cmp.model = total_cost(resolve_classes(run, opts.sr, opts.locality), opts.net);
  cmp.replay_degradation = (cmp.remote_end_us - cmp.local_end_us) / baseline_us;
  cmp.model_degradation = cmp.model.total_us / baseline_us;
  cmp.gap = cmp.replay_degradation - cmp.model_degradation;
  return cmp;
}

}  // namespace remlab
