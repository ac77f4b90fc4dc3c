#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "aisolsr/types.hpp"

namespace aisolsr {

// Wire layout (big-endian, one message per packet). See docs/wire-format.md.
//
//   off  size  field
//     0     2  packet_length        (whole packet, computed)
//     2     2  packet_sequence
//     4     1  message_type         (1 = HELLO, 2 = TC)
//     5     1  vtime
//     6     2  message_size         (from offset 4 to end, computed)
//     8     4  originator
//    12     1  ttl
//    13     1  hop_count
//    14     2  message_sequence
//   HELLO:
//    16     2  energy               (centijoules)
//    18     2  distance             (decimeters)
//    20     2  geographic x         (decimeters)
//    22     2  geographic y         (decimeters)
//    24   5*k  { link_code u8, neighbor u32 }
//   TC:
//    16     2  ansn
//    18     2  originator energy    (centijoules)
//    20     2  geographic x         (decimeters)
//    22     2  geographic y         (decimeters)
//    24   8*k  { neighbor u32, link distance u16 (dm), neighbor energy u16 (cJ) }

inline constexpr std::uint8_t kHelloType = 1;
inline constexpr std::uint8_t kTcType = 2;
inline constexpr std::size_t kFixedPacketBytes = 24;
inline constexpr std::size_t kHelloBlockBytes = 5;
inline constexpr std::size_t kTcBlockBytes = 8;

// Link codes follow the classic (neighbor_type << 2) | link_type packing.
enum class LinkType : std::uint8_t { unspecified = 0, asymmetric = 1, symmetric = 2, lost = 3 };
enum class NeighborType : std::uint8_t { none = 0, symmetric = 1, mpr = 2 };

constexpr std::uint8_t make_link_code(LinkType l, NeighborType n) {
  return static_cast<std::uint8_t>((static_cast<unsigned>(n) << 2) | static_cast<unsigned>(l));
}
constexpr LinkType link_type_of(std::uint8_t code) { return static_cast<LinkType>(code & 0x3); }
constexpr NeighborType neighbor_type_of(std::uint8_t code) { return static_cast<NeighborType>((code >> 2) & 0x3); }

/// Fields shared by every message. Length fields are derived on encode.
struct MessageHeader {
  std::uint16_t packet_sequence = 0;
  std::uint8_t vtime = 0;
  NodeId originator;
  std::uint8_t ttl = 0;
  std::uint8_t hop_count = 0;
  std::uint16_t message_sequence = 0;

  friend bool operator==(const MessageHeader&, const MessageHeader&) = default;
};

struct NeighborBlock {
  std::uint8_t link_code = 0;
  NodeId neighbor;

  friend bool operator==(const NeighborBlock&, const NeighborBlock&) = default;
};

struct HelloMessage {
  MessageHeader header;
  double energy = 0.0;    // joules
  double distance = 0.0;  // meters; the originator always sends 0
  Position position;
  std::vector<NeighborBlock> neighbors;

  friend bool operator==(const HelloMessage&, const HelloMessage&) = default;
};

struct AdvertisedLink {
  NodeId neighbor;
  double distance = 0.0;         // meters
  double neighbor_energy = 0.0;  // joules

  friend bool operator==(const AdvertisedLink&, const AdvertisedLink&) = default;
};

struct TcMessage {
  MessageHeader header;
  std::uint16_t ansn = 0;
  double originator_energy = 0.0;  // joules
  Position originator_position;
  std::vector<AdvertisedLink> advertised;

  friend bool operator==(const TcMessage&, const TcMessage&) = default;
};

using ControlMessage = std::variant<HelloMessage, TcMessage>;

/// Thrown when a field does not fit its wire width.
class EncodeError : public std::runtime_error {
 public:
  EncodeError(std::string field, const std::string& what)
      : std::runtime_error(what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

enum class DecodeFailure { truncated, bad_type, length_mismatch };

const char* to_string(DecodeFailure f);

class DecodeError : public std::runtime_error {
 public:
  explicit DecodeError(DecodeFailure reason, const std::string& what)
      : std::runtime_error(what), reason_(reason) {}
  DecodeFailure reason() const { return reason_; }

 private:
  DecodeFailure reason_;
};

std::vector<std::uint8_t> encode(const HelloMessage& msg);
std::vector<std::uint8_t> encode(const TcMessage& msg);
std::vector<std::uint8_t> encode(const ControlMessage& msg);

/// Decodes exactly the packet declared by the leading packet_length; bytes
/// past it are ignored.
ControlMessage decode(std::span<const std::uint8_t> bytes);

/// RFC 3626 mantissa/exponent validity-time encoding (C = 1/16 s).
std::uint8_t encode_vtime(double seconds);
double decode_vtime(std::uint8_t code);

}  // namespace aisolsr
