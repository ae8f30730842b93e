#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "remlab/cost_model.hpp"
#include "remlab/device.hpp"
#include "remlab/message.hpp"
#include "remlab/transport.hpp"

namespace remlab {

/// Session-fatal protocol error (unmapped shadow reference, ordering
/// violation, use after close).
class ProtocolFault : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ShadowResource {
  std::string kind;
  std::uint64_t created_by_call = 0;
};

/// Client-side replica of GPU resources plus cached read-only session state.
/// Shadow ids are dense, client-minted and never reused within a session.
class ShadowTable {
 public:
  std::uint64_t allocate(std::string_view kind, std::uint64_t call_seq);
  bool contains(std::uint64_t shadow_id) const;
  const ShadowResource& at(std::uint64_t shadow_id) const;
  std::size_t size() const { return table_.size(); }
  std::uint64_t latest() const { return next_id_ - 1; }  // 0 when none allocated

  int device_ordinal = 0;   // replicated device selection
  std::uint64_t reads = 0;  // locality answers served from this table

 private:
  std::map<std::uint64_t, ShadowResource> table_;
  std::uint64_t next_id_ = 1;
};

/// Proxy-side shadow-to-real id mapping; every reference must resolve before
/// device execution.
class IdMap {
 public:
  void bind(std::uint64_t shadow_id, std::uint64_t real_id);
  std::uint64_t resolve(std::uint64_t shadow_id) const;
  bool contains(std::uint64_t shadow_id) const { return map_.count(shadow_id) != 0; }
  std::size_t size() const { return map_.size(); }

 private:
  std::map<std::uint64_t, std::uint64_t> map_;
};

/// Sent-but-not-yet-delivered async requests, drained in send order.
class OutstandingQueue {
 public:
  void push(std::uint64_t seq, double send_us, double arrival_us);
  std::size_t depth() const { return queue_.size(); }
  std::size_t max_depth() const { return max_depth_; }

 private:
  struct Entry {
    std::uint64_t seq;
    double send_us;
    double arrival_us;
  };
  std::deque<Entry> queue_;
  std::size_t max_depth_ = 0;
};

/// Receives requests in arrival order, remaps shadow ids, submits to the
/// device, and answers sync requests after device completion.
class Proxy {
 public:
  explicit Proxy(DeviceTimeline& device) : device_(device) {}

  std::optional<Message> handle(const Message& msg, double arrival_us);

  const IdMap& id_map() const { return id_map_; }
  std::uint64_t handled_requests() const { return handled_; }

 private:
  double execute(std::string_view name, std::uint64_t call_seq, double gpu_exec_us,
                 const std::vector<std::uint64_t>& refs,
                 std::optional<std::uint64_t> new_shadow_id, double arrival_us);

  DeviceTimeline& device_;
  IdMap id_map_;
  std::uint64_t next_real_id_ = 1;
  std::uint64_t last_seq_ = 0;
  bool any_request_ = false;
  std::uint64_t handled_ = 0;
};

struct DispatchPolicy {
  enum class Mode { Outstanding, Batch };
  Mode mode = Mode::Outstanding;
  std::size_t batch_size = 1;  // Batch mode only; >= 1
};

struct CallOutcome {
  double return_time_us = 0;
  bool dispatched = false;  // false when answered locally
};

/// Client stub: resolves the effective class per call, answers Local calls
/// from shadow state, dispatches Async calls without waiting (outstanding or
/// batched) and blocks Sync calls on the proxy response.
class ClientStub {
 public:
  ClientStub(Channel& fwd, Channel& rev, Proxy& proxy, const NetworkConfig& net,
             DispatchPolicy dispatch, bool sr, bool locality);

  CallOutcome call(const ApiCall& api, double now);

  std::uint64_t requests_sent() const { return requests_sent_; }
  std::size_t max_outstanding() const { return outstanding_.max_depth(); }
  const ShadowTable& shadow_table() const { return shadow_; }
  const std::vector<Message>& message_log() const { return message_log_; }

 private:
  ApiClass effective_class(const ApiCall& api) const;
  bool creates_shadow(const ApiCall& api) const;
  Message make_request(const ApiCall& api);
  double send_request(Message msg, double send_us, bool track_outstanding);
  double flush_batch(double now);

  Channel& fwd_;
  Channel& rev_;
  Proxy& proxy_;
  NetworkConfig net_;
  DispatchPolicy dispatch_;
  bool sr_;
  bool locality_;
  bool closed_ = false;

  ShadowTable shadow_;
  OutstandingQueue outstanding_;
  std::vector<BatchEntry> buffer_;
  std::uint64_t buffered_payload_ = 0;
  std::uint64_t next_seq_ = 1;
  std::uint64_t requests_sent_ = 0;
  std::vector<Message> message_log_;
};

}  // namespace remlab
