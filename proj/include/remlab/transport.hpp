#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <queue>
#include <utility>
#include <vector>

#include "remlab/cost_model.hpp"
#include "remlab/message.hpp"

namespace remlab {

enum class TransportBackend { Ideal, Emulated };

struct TransportEvent {
  std::uint64_t seq = 0;
  double send_us = 0;
  double serialize_start_us = 0;
  double arrival_us = 0;
};

/// One direction of a FIFO message channel. Sends must be issued with
/// nondecreasing timestamps; delivery order equals send order.
class Channel {
 public:
  virtual ~Channel() = default;

  /// Accepts the message and returns its expected arrival time.
  virtual double send(Message msg, double now) = 0;

  /// All messages with arrival_time <= until, in arrival order, ties broken
  /// by send order. Each message is delivered exactly once.
  virtual std::vector<std::pair<Message, double>> deliver(double until) = 0;

  virtual std::uint64_t sent_count() const = 0;
  virtual std::uint64_t pending_count() const = 0;
  virtual const std::vector<TransportEvent>& events() const = 0;
};

/// Zero-delay in-process channel (the shared-memory stand-in).
std::unique_ptr<Channel> make_ideal_channel();

/// Emulated link: serialization is charged at the sender against a
/// link-busy point (inflight regulation), then propagation adds rtt/2.
std::unique_ptr<Channel> make_emulated_channel(const NetworkConfig& net);

std::unique_ptr<Channel> make_channel(TransportBackend backend, const NetworkConfig& net);

void export_transport_csv(std::ostream& out, const std::vector<TransportEvent>& events);

}  // namespace remlab
