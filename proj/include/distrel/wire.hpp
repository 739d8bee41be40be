#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "distrel/types.hpp"

namespace distrel::wire {

using Bytes = std::vector<std::uint8_t>;

inline constexpr std::uint8_t kVersion = 0x01;
// version byte + 4-byte big-endian length
inline constexpr std::size_t kHeaderSize = 5;
inline constexpr std::uint32_t kMaxFrameLength = 1u << 30;

enum class Tag : std::uint8_t {
  kBetaBcast = 1,
  kDensityReq = 2,
  kDensityResp = 3,
  kSummaryReq = 4,
  kSummaryResp = 5,
  kShutdown = 6,
};

const char* to_string(Tag tag) noexcept;

class ByteWriter {
 public:
  void put_u64(std::uint64_t v);
  void put_f64(double v);
  void put_vector(const Vector& v);
  Bytes take() { return std::move(buf_); }
  const Bytes& bytes() const { return buf_; }

 private:
  Bytes buf_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}
  std::uint64_t get_u64();
  double get_f64();
  Vector get_vector();
  bool done() const { return pos_ == bytes_.size(); }
  // Throws Protocol if bytes remain.
  void expect_done() const;

 private:
  void need(std::size_t n) const;
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

struct Frame {
  Tag tag = Tag::kShutdown;
  Bytes payload;
};

// [0x01][u32 BE length of tag+payload][tag][payload]
Bytes encode_frame(Tag tag, std::span<const std::uint8_t> payload);
inline Bytes encode_frame(Tag tag, const Bytes& payload) {
  return encode_frame(tag, std::span<const std::uint8_t>(payload));
}

// Length of tag+payload announced by a header; validates version and bounds.
std::uint32_t parse_header(std::span<const std::uint8_t> header);

// Decodes one complete frame; throws Protocol on malformed input.
Frame decode_frame(std::span<const std::uint8_t> bytes);

// Message payloads.
Bytes beta_payload(const Vector& beta);
Vector parse_beta(std::span<const std::uint8_t> payload);

Bytes density_request_payload(double bandwidth);
double parse_density_request(std::span<const std::uint8_t> payload);

Bytes density_response_payload(double density, std::uint64_t count);
std::pair<double, std::uint64_t> parse_density_response(std::span<const std::uint8_t> payload);

Bytes summary_request_payload(double f0, double tau);
std::pair<double, double> parse_summary_request(std::span<const std::uint8_t> payload);

}  // namespace distrel::wire
