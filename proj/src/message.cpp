#include "remlab/message.hpp"

#include <bit>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace remlab {

namespace {

constexpr std::size_t kHeaderSize = 1 + 8 + 2 + 2 + 8 + 8;

template <typename T>
void put_le(std::vector<std::byte>& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i)
    out.push_back(static_cast<std::byte>((value >> (8 * i)) & 0xff));
}

template <typename T>
T get_le(std::span<const std::byte> in, std::size_t offset) {
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i)
    value |= static_cast<T>(std::to_integer<std::uint8_t>(in[offset + i])) << (8 * i);
  return value;
}

}  // namespace

std::vector<std::byte> encode_message(const Message& msg) {
  if (msg.name.size() > 0xffff) throw std::length_error("message name too long");
  if (msg.shadow_refs.size() > 0xffff) throw std::length_error("too many shadow refs");
  std::vector<std::byte> out;
  out.reserve(kHeaderSize + msg.name.size() + 8 * msg.shadow_refs.size() + msg.payload_len);
  out.push_back(static_cast<std::byte>(msg.kind));
  put_le<std::uint64_t>(out, msg.seq);
  put_le<std::uint16_t>(out, static_cast<std::uint16_t>(msg.name.size()));
  put_le<std::uint16_t>(out, static_cast<std::uint16_t>(msg.shadow_refs.size()));
  put_le<std::uint64_t>(out, msg.payload_len);
  put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(msg.timestamp_us));
  for (char c : msg.name) out.push_back(static_cast<std::byte>(c));
  for (std::uint64_t ref : msg.shadow_refs) put_le<std::uint64_t>(out, ref);
  out.resize(out.size() + msg.payload_len);  // opaque payload, zero-filled
  return out;
}

Message decode_message(std::span<const std::byte> data, std::size_t* consumed) {
  if (data.size() < kHeaderSize) throw std::invalid_argument("truncated message header");
  Message msg;
  auto kind = std::to_integer<std::uint8_t>(data[0]);
  if (kind > 1) throw std::invalid_argument("bad message kind");
  msg.kind = static_cast<MessageKind>(kind);
  msg.seq = get_le<std::uint64_t>(data, 1);
  auto name_len = get_le<std::uint16_t>(data, 9);
  auto n_refs = get_le<std::uint16_t>(data, 11);
  msg.payload_len = get_le<std::uint64_t>(data, 13);
  msg.timestamp_us = std::bit_cast<double>(get_le<std::uint64_t>(data, 21));
  std::size_t need = kHeaderSize + name_len + 8ull * n_refs + msg.payload_len;
  if (data.size() < need) throw std::invalid_argument("truncated message body");
  std::size_t off = kHeaderSize;
  msg.name.resize(name_len);
  std::memcpy(msg.name.data(), data.data() + off, name_len);
  off += name_len;
  for (std::uint16_t i = 0; i < n_refs; ++i, off += 8)
    msg.shadow_refs.push_back(get_le<std::uint64_t>(data, off));
  if (consumed) *consumed = need;
  return msg;
}

void write_message_log(std::ostream& out, std::span<const Message> msgs) {
  for (const Message& m : msgs) {
    auto bytes = encode_message(m);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
  }
}

std::vector<Message> read_message_log(std::istream& in) {
  std::vector<std::byte> buf;
  char c;
  while (in.get(c)) buf.push_back(static_cast<std::byte>(c));
  std::vector<Message> msgs;
  std::size_t off = 0;
  while (off < buf.size()) {
    std::size_t consumed = 0;
    msgs.push_back(decode_message(std::span(buf).subspan(off), &consumed));
    off += consumed;
  }
  return msgs;
}

}  // namespace remlab
