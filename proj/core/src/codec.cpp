#include "aisolsr/codec.hpp"

#include <cmath>
#include <limits>

namespace aisolsr {

const char* to_string(DecodeFailure f) {
  switch (f) {
    case DecodeFailure::truncated: return "truncated";
    case DecodeFailure::bad_type: return "bad-type";
    case DecodeFailure::length_mismatch: return "length-mismatch";
  }
  return "unknown";
}

namespace {

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) {
    out_.push_back(static_cast<std::uint8_t>(v >> 8));
    out_.push_back(static_cast<std::uint8_t>(v));
  }
  void u32(std::uint32_t v) {
    u16(static_cast<std::uint16_t>(v >> 16));
    u16(static_cast<std::uint16_t>(v));
  }
  void patch_u16(std::size_t off, std::uint16_t v) {
    out_[off] = static_cast<std::uint8_t>(v >> 8);
    out_[off + 1] = static_cast<std::uint8_t>(v);
  }
  std::size_t size() const { return out_.size(); }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}
  std::uint8_t u8() { return in_[pos_++]; }
  std::uint16_t u16() {
    const auto hi = in_[pos_], lo = in_[pos_ + 1];
    pos_ += 2;
    return static_cast<std::uint16_t>(hi << 8 | lo);
  }
  std::uint32_t u32() {
    const std::uint32_t hi = u16();
    return hi << 16 | u16();
  }
  std::size_t pos() const { return pos_; }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

std::uint16_t fixed16(double value, double scale, const char* field) {
  const double q = std::round(value * scale);
  if (!(q >= 0.0 && q <= 65535.0)) {
    throw EncodeError(field, std::string("field '") + field + "' out of 16-bit fixed-point range");
  }
  return static_cast<std::uint16_t>(q);
}

constexpr double kCentijoules = 100.0;
constexpr double kDecimeters = 10.0;

void write_header(Writer& w, std::uint8_t type, const MessageHeader& h) {
  w.u16(0);  // packet_length, patched
  w.u16(h.packet_sequence);
  w.u8(type);
  w.u8(h.vtime);
  w.u16(0);  // message_size, patched
  w.u32(h.originator.value);
  w.u8(h.ttl);
  w.u8(h.hop_count);
  w.u16(h.message_sequence);
}

std::vector<std::uint8_t> finish(Writer& w) {
  if (w.size() > 0xFFFF) throw EncodeError("packet_length", "packet exceeds 65535 bytes");
  w.patch_u16(0, static_cast<std::uint16_t>(w.size()));
  w.patch_u16(6, static_cast<std::uint16_t>(w.size() - 4));
  return w.take();
}

void write_position(Writer& w, Position p) {
  w.u16(fixed16(p.x, kDecimeters, "geographic.x"));
  w.u16(fixed16(p.y, kDecimeters, "geographic.y"));
}

Position read_position(Reader& r) {
  const double x = r.u16() / kDecimeters;
  const double y = r.u16() / kDecimeters;
  return {x, y};
}

}  // namespace

std::vector<std::uint8_t> encode(const HelloMessage& msg) {
  Writer w;
  write_header(w, kHelloType, msg.header);
  w.u16(fixed16(msg.energy, kCentijoules, "energy"));
  w.u16(fixed16(msg.distance, kDecimeters, "distance"));
  write_position(w, msg.position);
  for (const auto& b : msg.neighbors) {
    w.u8(b.link_code);
    w.u32(b.neighbor.value);
  }
  return finish(w);
}

std::vector<std::uint8_t> encode(const TcMessage& msg) {
  Writer w;
  write_header(w, kTcType, msg.header);
  w.u16(msg.ansn);
  w.u16(fixed16(msg.originator_energy, kCentijoules, "originator_energy"));
  write_position(w, msg.originator_position);
  for (const auto& a : msg.advertised) {
    w.u32(a.neighbor.value);
    w.u16(fixed16(a.distance, kDecimeters, "advertised.distance"));
    w.u16(fixed16(a.neighbor_energy, kCentijoules, "advertised.neighbor_energy"));
  }
  return finish(w);
}

std::vector<std::uint8_t> encode(const ControlMessage& msg) {
  return std::visit([](const auto& m) { return encode(m); }, msg);
}

ControlMessage decode(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2) throw DecodeError(DecodeFailure::truncated, "buffer too short for packet_length");
  const std::size_t packet_length = static_cast<std::size_t>(bytes[0]) << 8 | bytes[1];
  if (bytes.size() < packet_length) {
    throw DecodeError(DecodeFailure::truncated, "buffer shorter than declared packet_length");
  }
  if (packet_length < kFixedPacketBytes) {
    throw DecodeError(DecodeFailure::length_mismatch, "packet_length smaller than fixed header");
  }
  const auto packet = bytes.first(packet_length);
  Reader r(packet);

  r.u16();
  MessageHeader h;
  h.packet_sequence = r.u16();
  const std::uint8_t type = r.u8();
  if (type != kHelloType && type != kTcType) {
    throw DecodeError(DecodeFailure::bad_type, "unknown message_type " + std::to_string(type));
  }
  h.vtime = r.u8();
  const std::size_t message_size = r.u16();
  if (message_size != packet_length - 4) {
    throw DecodeError(DecodeFailure::length_mismatch, "message_size disagrees with packet_length");
  }
  h.originator = NodeId(r.u32());
  h.ttl = r.u8();
  h.hop_count = r.u8();
  h.message_sequence = r.u16();

  const std::size_t body = packet_length - kFixedPacketBytes;
  if (type == kHelloType) {
    if (body % kHelloBlockBytes != 0) {
      throw DecodeError(DecodeFailure::length_mismatch, "HELLO body is not a whole number of neighbor blocks");
    }
    HelloMessage m;
    m.header = h;
    m.energy = r.u16() / kCentijoules;
    m.distance = r.u16() / kDecimeters;
    m.position = read_position(r);
    m.neighbors.reserve(body / kHelloBlockBytes);
    while (r.pos() < packet_length) {
      NeighborBlock b;
      b.link_code = r.u8();
      b.neighbor = NodeId(r.u32());
      m.neighbors.push_back(b);
    }
    return m;
  }

  if (body % kTcBlockBytes != 0) {
    throw DecodeError(DecodeFailure::length_mismatch, "TC body is not a whole number of advertised links");
  }
  TcMessage m;
  m.header = h;
  m.ansn = r.u16();
  m.originator_energy = r.u16() / kCentijoules;
  m.originator_position = read_position(r);
  m.advertised.reserve(body / kTcBlockBytes);
  while (r.pos() < packet_length) {
    AdvertisedLink a;
    a.neighbor = NodeId(r.u32());
    a.distance = r.u16() / kDecimeters;
    a.neighbor_energy = r.u16() / kCentijoules;
    m.advertised.push_back(a);
  }
  return m;
}

// value = C * (1 + a/16) * 2^b, a in high nibble, b in low nibble.
std::uint8_t encode_vtime(double seconds) {
  constexpr double c = 1.0 / 16.0;
  if (seconds <= c) return 0;
  int b = 0;
  while (b < 15 && seconds / c >= std::ldexp(1.0, b + 1)) ++b;
  int a = static_cast<int>(16.0 * (seconds / (c * std::ldexp(1.0, b)) - 1.0));
  if (a >= 16) {
    a = 0;
    ++b;
  }
  if (b > 15) return 0xFF;
  return static_cast<std::uint8_t>(a << 4 | b);
}

double decode_vtime(std::uint8_t code) {
  constexpr double c = 1.0 / 16.0;
  const int a = code >> 4;
  const int b = code & 0x0F;
  return c * (1.0 + a / 16.0) * std::ldexp(1.0, b);
}

}  // namespace aisolsr
