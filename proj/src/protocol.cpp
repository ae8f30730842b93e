#include "remlab/protocol.hpp"

#include <algorithm>

namespace remlab {

std::uint64_t ShadowTable::allocate(std::string_view kind, std::uint64_t call_seq) {
  std::uint64_t id = next_id_++;
  table_.emplace(id, ShadowResource{std::string(kind), call_seq});
  return id;
}

bool ShadowTable::contains(std::uint64_t shadow_id) const {
  return table_.count(shadow_id) != 0;
}

const ShadowResource& ShadowTable::at(std::uint64_t shadow_id) const {
  auto it = table_.find(shadow_id);
  if (it == table_.end())
    throw ProtocolFault("unknown shadow id " + std::to_string(shadow_id));
  return it->second;
}

void IdMap::bind(std::uint64_t shadow_id, std::uint64_t real_id) {
  auto [it, inserted] = map_.emplace(shadow_id, real_id);
  if (!inserted)
    throw ProtocolFault("shadow id " + std::to_string(shadow_id) + " already mapped");
}

std::uint64_t IdMap::resolve(std::uint64_t shadow_id) const {
  auto it = map_.find(shadow_id);
  if (it == map_.end())
    throw ProtocolFault("unmapped shadow reference " + std::to_string(shadow_id));
  return it->second;
}

void OutstandingQueue::push(std::uint64_t seq, double send_us, double arrival_us) {
  // Everything that reached the proxy by this send is no longer outstanding.
  while (!queue_.empty() && queue_.front().arrival_us <= send_us) queue_.pop_front();
  queue_.push_back({seq, send_us, arrival_us});
  max_depth_ = std::max(max_depth_, queue_.size());
}

std::optional<Message> Proxy::handle(const Message& msg, double arrival_us) {
  if (msg.kind != MessageKind::Request)
    throw ProtocolFault("proxy received a non-request message");
  if (any_request_ && msg.seq <= last_seq_)
    throw ProtocolFault("request seq " + std::to_string(msg.seq) +
                        " arrived after seq " + std::to_string(last_seq_));
  if (msg.cls == ApiClass::Local)
    throw ProtocolFault("local call " + msg.name + " must not reach the proxy");
  any_request_ = true;
  last_seq_ = msg.seq;
  ++handled_;

  if (!msg.entries.empty()) {
    for (const BatchEntry& e : msg.entries)
      execute(e.name, e.call_seq, e.gpu_exec_us, e.shadow_refs, e.new_shadow_id, arrival_us);
    return std::nullopt;
  }

  double finish = execute(msg.name, msg.call_seq, msg.gpu_exec_us, msg.shadow_refs,
                          msg.new_shadow_id, arrival_us);
  if (msg.cls != ApiClass::Sync) return std::nullopt;

  Message resp;
  resp.kind = MessageKind::Response;
  resp.seq = msg.seq;  // echoes the request
  resp.name = msg.name;
  resp.cls = ApiClass::Sync;
  resp.payload_len = msg.payload_resp;
  resp.timestamp_us = finish;
  resp.call_seq = msg.call_seq;
  return resp;
}

double Proxy::execute(std::string_view name, std::uint64_t call_seq, double gpu_exec_us,
                      const std::vector<std::uint64_t>& refs,
                      std::optional<std::uint64_t> new_shadow_id, double arrival_us) {
  // IDs are altered before device execution.
  for (std::uint64_t ref : refs) {
    std::uint64_t real = id_map_.resolve(ref);
    if (!device_.has_resource(real))
      throw ProtocolFault("resolved resource " + std::to_string(real) + " missing on device");
  }
  if (new_shadow_id) {
    std::uint64_t real = next_real_id_++;
    device_.create_resource(name, real);
    id_map_.bind(*new_shadow_id, real);
  }
  return device_.submit(name, call_seq, gpu_exec_us, arrival_us);
}

ClientStub::ClientStub(Channel& fwd, Channel& rev, Proxy& proxy, const NetworkConfig& net,
                       DispatchPolicy dispatch, bool sr, bool locality)
    : fwd_(fwd), rev_(rev), proxy_(proxy), net_(net), dispatch_(dispatch), sr_(sr),
      locality_(locality) {
  if (dispatch_.mode == DispatchPolicy::Mode::Batch && dispatch_.batch_size < 1)
    throw std::invalid_argument("batch size must be >= 1");
  if (locality_ && !sr_)
    throw std::invalid_argument("locality requires shadow resources");
}

ApiClass ClientStub::effective_class(const ApiCall& api) const {
  if (sr_ && api.sr_class &&
      (*api.sr_class == ApiClass::Async || locality_))
    return *api.sr_class;
  return api.cls;
}

bool ClientStub::creates_shadow(const ApiCall& api) const {
  // A sync call made async by SR is the resource-creating pattern.
  return sr_ && api.cls == ApiClass::Sync && api.sr_class == ApiClass::Async;
}

Message ClientStub::make_request(const ApiCall& api) {
  Message msg;
  msg.kind = MessageKind::Request;
  msg.name = api.name;
  msg.payload_len = api.payload_req;
  msg.gpu_exec_us = api.gpu_exec_us;
  msg.payload_resp = api.payload_resp;
  msg.call_seq = api.seq;
  if (creates_shadow(api)) {
    msg.new_shadow_id = shadow_.allocate(api.name, api.seq);
  } else if (std::uint64_t ref = shadow_.latest(); ref != 0) {
    msg.shadow_refs.push_back(ref);  // later calls compute on the created resource
  }
  return msg;
}

double ClientStub::send_request(Message msg, double send_us, bool track_outstanding) {
  msg.seq = next_seq_++;
  msg.timestamp_us = send_us;
  message_log_.push_back(msg);
  double arrival = fwd_.send(std::move(msg), send_us);
  if (track_outstanding) outstanding_.push(next_seq_ - 1, send_us, arrival);
  ++requests_sent_;
  return arrival;
}

double ClientStub::flush_batch(double now) {
  Message msg;
  msg.kind = MessageKind::Request;
  msg.name = "__batch";
  msg.cls = ApiClass::Async;
  msg.entries = std::move(buffer_);
  buffer_.clear();
  msg.payload_len = buffered_payload_;
  buffered_payload_ = 0;
  msg.call_seq = msg.entries.front().call_seq;
  double send_us = now + net_.start_us;  // one start overhead for the whole batch
  send_request(std::move(msg), send_us, true);
  return send_us;
}

CallOutcome ClientStub::call(const ApiCall& api, double now) {
  if (closed_) throw ProtocolFault("session closed");
  ApiClass cls = effective_class(api);

  if (cls == ApiClass::Local) {
    // Answered from the shadow state; nothing leaves the client.
    shadow_.reads += 1;
    return {now + api.local_exec_us, false};
  }

  try {
    if (cls == ApiClass::Async) {
      if (dispatch_.mode == DispatchPolicy::Mode::Batch) {
        BatchEntry e{api.name, api.seq, api.gpu_exec_us, api.payload_req, {}, std::nullopt};
        if (creates_shadow(api)) {
          e.new_shadow_id = shadow_.allocate(api.name, api.seq);
        } else if (std::uint64_t ref = shadow_.latest(); ref != 0) {
          e.shadow_refs.push_back(ref);
        }
        buffered_payload_ += e.payload_req;
        buffer_.push_back(std::move(e));
        if (buffer_.size() >= dispatch_.batch_size) return {flush_batch(now), true};
        return {now, true};
      }
      Message msg = make_request(api);
      double send_us = now + net_.start_for(api.name);
      send_request(std::move(msg), send_us, true);
      return {send_us, true};
    }

    // Sync: a pending batch is flushed first so device order follows issue order.
    double t = now;
    if (dispatch_.mode == DispatchPolicy::Mode::Batch && !buffer_.empty()) t = flush_batch(t);
    Message msg = make_request(api);
    msg.cls = ApiClass::Sync;
    double send_us = t + net_.start_for(api.name);
    std::uint64_t want_seq = next_seq_;
    double arrival = send_request(std::move(msg), send_us, false);

    std::optional<Message> response;
    for (auto& [m, at] : fwd_.deliver(arrival)) {
      auto resp = proxy_.handle(m, at);
      if (resp) response = std::move(resp);
    }
    if (!response || response->seq != want_seq)
      throw ProtocolFault("missing response for request " + std::to_string(want_seq));
    double resp_send = response->timestamp_us;
    message_log_.push_back(*response);
    double resp_arrival = rev_.send(std::move(*response), resp_send);
    rev_.deliver(resp_arrival);  // the client consumes its response
    return {resp_arrival, true};
  } catch (const ProtocolFault&) {
    closed_ = true;
    throw;
  }
}

}  // namespace remlab
