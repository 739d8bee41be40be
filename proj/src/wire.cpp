#include "distrel/wire.hpp"

#include <bit>

namespace distrel::wire {

const char* to_string(Tag tag) noexcept {
  switch (tag) {
    case Tag::kBetaBcast: return "BETA_BCAST";
    case Tag::kDensityReq: return "DENSITY_REQ";
    case Tag::kDensityResp: return "DENSITY_RESP";
    case Tag::kSummaryReq: return "SUMMARY_REQ";
    case Tag::kSummaryResp: return "SUMMARY_RESP";
    case Tag::kShutdown: return "SHUTDOWN";
  }
  return "UNKNOWN";
}

void ByteWriter::put_u64(std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::put_f64(double v) { put_u64(std::bit_cast<std::uint64_t>(v)); }

void ByteWriter::put_vector(const Vector& v) {
  put_u64(static_cast<std::uint64_t>(v.size()));
  buf_.reserve(buf_.size() + 8 * static_cast<std::size_t>(v.size()));
  for (Index i = 0; i < v.size(); ++i) put_f64(v[i]);
}

void ByteReader::need(std::size_t n) const {
  if (bytes_.size() - pos_ < n) throw Error(ErrorKind::kProtocol, "truncated payload");
}

std::uint64_t ByteReader::get_u64() {
  need(8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
  pos_ += 8;
  return v;
}

double ByteReader::get_f64() { return std::bit_cast<double>(get_u64()); }

Vector ByteReader::get_vector() {
  const std::uint64_t len = get_u64();
  if (len > (bytes_.size() - pos_) / 8) throw Error(ErrorKind::kProtocol, "vector length overruns payload");
  Vector v(static_cast<Index>(len));
  for (Index i = 0; i < v.size(); ++i) v[i] = get_f64();
  return v;
}

void ByteReader::expect_done() const {
  if (!done()) throw Error(ErrorKind::kProtocol, "trailing bytes in payload");
}

Bytes encode_frame(Tag tag, std::span<const std::uint8_t> payload) {
  const std::size_t body = payload.size() + 1;
  if (body > kMaxFrameLength) throw Error(ErrorKind::kProtocol, "frame too large");
  Bytes out;
  out.reserve(kHeaderSize + body);
  out.push_back(kVersion);
  const auto len = static_cast<std::uint32_t>(body);
  out.push_back(static_cast<std::uint8_t>(len >> 24));
  out.push_back(static_cast<std::uint8_t>(len >> 16));
  out.push_back(static_cast<std::uint8_t>(len >> 8));
  out.push_back(static_cast<std::uint8_t>(len));
  out.push_back(static_cast<std::uint8_t>(tag));
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

std::uint32_t parse_header(std::span<const std::uint8_t> header) {
  if (header.size() < kHeaderSize) throw Error(ErrorKind::kProtocol, "short frame header");
  if (header[0] != kVersion) {
    throw Error(ErrorKind::kProtocol, "unsupported frame version " + std::to_string(header[0]));
  }
  const std::uint32_t len = (std::uint32_t{header[1]} << 24) | (std::uint32_t{header[2]} << 16) |
                            (std::uint32_t{header[3]} << 8) | std::uint32_t{header[4]};
  if (len < 1 || len > kMaxFrameLength) throw Error(ErrorKind::kProtocol, "bad frame length");
  return len;
}

Frame decode_frame(std::span<const std::uint8_t> bytes) {
  const std::uint32_t len = parse_header(bytes);
  if (bytes.size() != kHeaderSize + len) throw Error(ErrorKind::kProtocol, "frame size mismatch");
  const std::uint8_t raw = bytes[kHeaderSize];
  if (raw < 1 || raw > 6) throw Error(ErrorKind::kProtocol, "unknown tag " + std::to_string(raw));
  Frame f;
  f.tag = static_cast<Tag>(raw);
  f.payload.assign(bytes.begin() + kHeaderSize + 1, bytes.end());
  return f;
}

Bytes beta_payload(const Vector& beta) {
  ByteWriter w;
  w.put_vector(beta);
  return w.take();
}

Vector parse_beta(std::span<const std::uint8_t> payload) {
  ByteReader r(payload);
  Vector v = r.get_vector();
  r.expect_done();
  return v;
}

Bytes density_request_payload(double bandwidth) {
  ByteWriter w;
  w.put_f64(bandwidth);
  return w.take();
}

double parse_density_request(std::span<const std::uint8_t> payload) {
  ByteReader r(payload);
  const double h = r.get_f64();
  r.expect_done();
  return h;
}

Bytes density_response_payload(double density, std::uint64_t count) {
  ByteWriter w;
  w.put_f64(density);
  w.put_u64(count);
  return w.take();
}

std::pair<double, std::uint64_t> parse_density_response(std::span<const std::uint8_t> payload) {
  ByteReader r(payload);
  const double d = r.get_f64();
  const std::uint64_t c = r.get_u64();
  r.expect_done();
  return {d, c};
}

Bytes summary_request_payload(double f0, double tau) {
  ByteWriter w;
  w.put_f64(f0);
  w.put_f64(tau);
  return w.take();
}

std::pair<double, double> parse_summary_request(std::span<const std::uint8_t> payload) {
  ByteReader r(payload);
  const double f0 = r.get_f64();
  const double tau = r.get_f64();
  r.expect_done();
  return {f0, tau};
}

}  // namespace distrel::wire
