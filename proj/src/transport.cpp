#include "remlab/transport.hpp"

#include <ostream>
#include <stdexcept>

namespace remlab {

namespace {

struct Pending {
  Message msg;
  double arrival;
  std::uint64_t order;
};

struct ArrivalOrder {
  bool operator()(const Pending& a, const Pending& b) const {
    if (a.arrival != b.arrival) return a.arrival > b.arrival;
    return a.order > b.order;  // ties: send order
  }
};

class ChannelBase : public Channel {
 public:
  std::vector<std::pair<Message, double>> deliver(double until) override {
    std::vector<std::pair<Message, double>> out;
    while (!queue_.empty() && queue_.top().arrival <= until) {
      out.emplace_back(queue_.top().msg, queue_.top().arrival);
      queue_.pop();
    }
    return out;
  }

  std::uint64_t sent_count() const override { return sent_; }
  std::uint64_t pending_count() const override { return queue_.size(); }
  const std::vector<TransportEvent>& events() const override { return events_; }

 protected:
  void check_monotone(double now) {
    if (sent_ > 0 && now < last_send_)
      throw std::logic_error("transport sends must be issued in time order");
    last_send_ = now;
  }

  void accept(Message msg, double now, double serialize_start, double arrival) {
    events_.push_back({msg.seq, now, serialize_start, arrival});
    queue_.push({std::move(msg), arrival, sent_++});
  }

 private:
  std::priority_queue<Pending, std::vector<Pending>, ArrivalOrder> queue_;
  std::vector<TransportEvent> events_;
  std::uint64_t sent_ = 0;
  double last_send_ = 0;
};

class IdealChannel final : public ChannelBase {
 public:
  double send(Message msg, double now) override {
    check_monotone(now);
    accept(std::move(msg), now, now, now);
    return now;
  }
};

class EmulatedChannel final : public ChannelBase {
 public:
  explicit EmulatedChannel(const NetworkConfig& net) : net_(net) { net_.validate(); }

  double send(Message msg, double now) override {
    check_monotone(now);
    double serialize_start = std::max(now, link_busy_until_);
    double ready = serialize_start;
    if (msg.payload_len > 0) {
      ready += static_cast<double>(msg.payload_len) / net_.bandwidth_bytes_per_us;
      link_busy_until_ = ready;  // zero-payload messages never move the busy point
    }
    double arrival = ready + net_.rtt_us / 2.0;
    accept(std::move(msg), now, serialize_start, arrival);
    return arrival;
  }

 private:
  NetworkConfig net_;
  double link_busy_until_ = 0;
};

}  // namespace

std::unique_ptr<Channel> make_ideal_channel() { return std::make_unique<IdealChannel>(); }

std::unique_ptr<Channel> make_emulated_channel(const NetworkConfig& net) {
  return std::make_unique<EmulatedChannel>(net);
}

std::unique_ptr<Channel> make_channel(TransportBackend backend, const NetworkConfig& net) {
  if (backend == TransportBackend::Ideal) return make_ideal_channel();
  return make_emulated_channel(net);
}

void export_transport_csv(std::ostream& out, const std::vector<TransportEvent>& events) {
  out << "seq,send_us,serialize_start_us,arrival_us\n";
  for (const TransportEvent& e : events)
    out << e.seq << ',' << e.send_us << ',' << e.serialize_start_us << ',' << e.arrival_us
        << '\n';
}

}  // namespace remlab
