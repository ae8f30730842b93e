#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "remlab/trace.hpp"

namespace remlab {

enum class MessageKind : std::uint8_t { Request = 0, Response = 1 };

/// One call folded into a batch request.
struct BatchEntry {
  std::string name;
  std::uint64_t call_seq = 0;
  double gpu_exec_us = 0;
  std::uint64_t payload_req = 0;
  std::vector<std::uint64_t> shadow_refs;
  std::optional<std::uint64_t> new_shadow_id;
};

/// Protocol message. The wire header carries kind/seq/name/refs/payload_len/
/// timestamp; the remaining fields are simulation metadata that a real
/// implementation would marshal inside the opaque payload.
struct Message {
  MessageKind kind = MessageKind::Request;
  std::uint64_t seq = 0;  // per-connection ordinal; responses echo the request seq
  std::string name;
  std::vector<std::uint64_t> shadow_refs;
  std::uint64_t payload_len = 0;
  double timestamp_us = 0;  // simulated send time

  // simulation metadata
  ApiClass cls = ApiClass::Async;
  std::optional<std::uint64_t> new_shadow_id;
  double gpu_exec_us = 0;
  std::uint64_t payload_resp = 0;
  std::uint64_t call_seq = 0;
  std::vector<BatchEntry> entries;  // nonempty only for batch requests
};

/// Fixed little-endian header {kind:1B, seq:8B, name_len:2B, n_refs:2B,
/// payload_len:8B, timestamp:8B}, then name bytes, then 8B per shadow ref,
/// then payload_len opaque bytes (zero-filled here).
std::vector<std::byte> encode_message(const Message& msg);

/// Decodes one message starting at data[0]; sets *consumed to its size.
Message decode_message(std::span<const std::byte> data, std::size_t* consumed);

void write_message_log(std::ostream& out, std::span<const Message> msgs);
std::vector<Message> read_message_log(std::istream& in);

}  // namespace remlab
