#pragma once

// End-to-end compression and the .scz container.
//
// Header, all little-endian:
//   "SCZ1" | u8 version | u8 q_bits | u8 precision | u8 dim_count | u32 dims[]
//   | u64 T | u32 N | u32 K | u64 nnz | f64 scale | i64 zero_point
//   | u32 alphabet_size | u16 freqs[alphabet_size] | u64 payload_byte_len
// followed by the rANS payload.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "scz/byte_io.hpp"
#include "scz/error.hpp"
#include "scz/rans.hpp"
#include "scz/reshape_optimizer.hpp"
#include "scz/sparse.hpp"
#include "scz/tensor.hpp"

namespace scz {

inline constexpr std::string_view kContainerMagic = "SCZ1";
inline constexpr std::uint8_t kContainerVersion = 1;
inline constexpr int kMinContainerPrecision = 8;
// Frequencies travel as u16, so 2^16 (a single-symbol table at n = 16)
// cannot be represented.
inline constexpr int kMaxContainerPrecision = 15;

struct ContainerHeader {
  std::uint8_t version = kContainerVersion;
  int q_bits = 4;
  int precision = kDefaultPrecision;
  std::vector<std::uint32_t> dims;
  std::uint64_t total = 0;
  std::uint32_t n_rows = 0;
  std::uint32_t n_cols = 0;
  std::uint64_t nnz = 0;
  double scale = 1.0;
  std::int64_t zero_point = 0;

  std::uint64_t stream_length() const { return 2 * nnz + n_rows; }
};

struct Container {
  ContainerHeader header;
  FrequencyTable table;
  Bitstream payload;

  std::size_t header_bytes() const {
    return 4 + 4 + 4 * header.dims.size() + 8 + 4 + 4 + 8 + 8 + 8 + 4 +
           2 * table.alphabet_size() + 8;
  }
  std::size_t payload_bytes() const { return payload.bytes.size(); }
  std::size_t total_bytes() const { return header_bytes() + payload_bytes(); }
};

struct CompressOptions {
  int q_bits = 4;
  std::optional<std::size_t> n_rows;  // unset: pick with search()
  int precision = kDefaultPrecision;
  CostProfile profile;
};

/// Rows used when the caller does not fix N: the approximate search, or a
/// single column when no divisor is feasible (only T = 1).
inline std::size_t select_rows(const FeatureTensor& t, int q_bits, const CostProfile& profile,
                               SearchReport* report = nullptr) {
  try {
    return search(t, q_bits, profile, report);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNoFeasibleReshape) throw;
    return t.size();
  }
}

inline Container compress(const FeatureTensor& t, const CompressOptions& opt) {
  validate(t);
  check_q_bits(opt.q_bits);
  if (opt.precision < kMinContainerPrecision || opt.precision > kMaxContainerPrecision) {
    fail(ErrorCode::kInvalidInput, "container precision must be in [8, 15]");
  }
  const std::size_t n_rows = opt.n_rows ? *opt.n_rows : select_rows(t, opt.q_bits, opt.profile);
  const auto shape = reshape_shape(t.size(), n_rows);
  if (shape.n_rows > UINT32_MAX || shape.n_cols > UINT32_MAX) {
    fail(ErrorCode::kInvalidInput, "reshape dimension exceeds 32 bits");
  }

  const auto params = params_for(t, opt.q_bits);
  const auto matrix = reshape(quantize(t, params), n_rows);
  const auto stream = concat(csr_encode(matrix));

  Container c;
  c.header.q_bits = opt.q_bits;
  c.header.precision = opt.precision;
  c.header.dims = t.dims;
  c.header.total = t.size();
  c.header.n_rows = static_cast<std::uint32_t>(shape.n_rows);
  c.header.n_cols = static_cast<std::uint32_t>(shape.n_cols);
  c.header.nnz = stream.nnz;
  c.header.scale = params.scale;
  c.header.zero_point = params.zero_point;
  c.table = build_table(stream.data, alphabet_size_for(stream.data), opt.precision);
  c.payload = encode(stream, c.table);
  return c;
}

inline FeatureTensor decompress(const Container& c) {
  const auto& h = c.header;
  if (static_cast<std::uint64_t>(h.n_rows) * h.n_cols != h.total ||
      element_count(h.dims) != h.total) {
    fail(ErrorCode::kInvalidContainer, "N*K, T and product(dims) disagree");
  }
  if (h.nnz > h.total) fail(ErrorCode::kInvalidContainer, "nnz exceeds T");

  ConcatStream stream;
  stream.nnz = h.nnz;
  stream.n_rows = h.n_rows;
  stream.data = decode(c.payload, c.table, h.stream_length());

  QuantParams p;
  p.q_bits = h.q_bits;
  p.scale = h.scale;
  p.zero_point = h.zero_point;
  const auto matrix =
      csr_decode(split(stream), h.n_rows, h.n_cols, static_cast<Symbol>(h.zero_point));
  return dequantize(matrix, p, h.dims);
}

inline std::vector<std::uint8_t> serialize(const Container& c) {
  const auto& h = c.header;
  ByteWriter w;
  w.put_tag(kContainerMagic);
  w.put(h.version);
  w.put(static_cast<std::uint8_t>(h.q_bits));
  w.put(static_cast<std::uint8_t>(h.precision));
  w.put(static_cast<std::uint8_t>(h.dims.size()));
  for (auto d : h.dims) w.put(d);
  w.put(h.total);
  w.put(h.n_rows);
  w.put(h.n_cols);
  w.put(h.nnz);
  w.put(h.scale);
  w.put(h.zero_point);
  write_table(w, c.table);
  w.put(static_cast<std::uint64_t>(c.payload.bytes.size()));
  w.put_bytes(c.payload.bytes);
  return w.take();
}

inline Container deserialize(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes, ErrorCode::kInvalidContainer);
  if (!r.tag_matches(kContainerMagic)) fail(ErrorCode::kInvalidContainer, "bad magic");

  Container c;
  auto& h = c.header;
  h.version = r.get<std::uint8_t>();
  if (h.version != kContainerVersion) {
    fail(ErrorCode::kUnsupportedVersion, "container version " + std::to_string(h.version));
  }
  h.q_bits = r.get<std::uint8_t>();
  h.precision = r.get<std::uint8_t>();
  if (h.q_bits < kMinQBits || h.q_bits > kMaxQBits) {
    fail(ErrorCode::kInvalidContainer, "q_bits out of range");
  }
  if (h.precision < kMinContainerPrecision || h.precision > kMaxContainerPrecision) {
    fail(ErrorCode::kInvalidContainer, "precision out of range");
  }
  h.dims.resize(r.get<std::uint8_t>());
  if (h.dims.empty()) fail(ErrorCode::kInvalidContainer, "missing tensor dims");
  for (auto& d : h.dims) d = r.get<std::uint32_t>();
  h.total = r.get<std::uint64_t>();
  h.n_rows = r.get<std::uint32_t>();
  h.n_cols = r.get<std::uint32_t>();
  h.nnz = r.get<std::uint64_t>();
  h.scale = r.get<double>();
  h.zero_point = r.get<std::int64_t>();
  if (!(h.scale > 0.0) || !std::isfinite(h.scale)) {
    fail(ErrorCode::kInvalidContainer, "scale must be positive and finite");
  }
  if (h.zero_point < 0 || h.zero_point > (std::int64_t{1} << h.q_bits) - 1) {
    fail(ErrorCode::kInvalidContainer, "zero point outside symbol range");
  }
  if (static_cast<std::uint64_t>(h.n_rows) * h.n_cols != h.total ||
      element_count(h.dims) != h.total) {
    fail(ErrorCode::kInvalidContainer, "N*K, T and product(dims) disagree");
  }
  if (h.nnz > h.total) fail(ErrorCode::kInvalidContainer, "nnz exceeds T");
  c.table = read_table(r, h.precision);

  const auto payload_len = r.get<std::uint64_t>();
  if (payload_len < r.remaining()) {
    fail(ErrorCode::kInvalidContainer, "trailing bytes after payload");
  }
  if (payload_len > r.remaining()) {
    fail(ErrorCode::kCorruptStream, "payload truncated: " + std::to_string(r.remaining()) +
                                        " of " + std::to_string(payload_len) + " bytes");
  }
  auto payload = r.get_bytes(payload_len);
  c.payload.bytes.assign(payload.begin(), payload.end());
  return c;
}

inline std::vector<std::uint8_t> compress_bytes(const FeatureTensor& t, const CompressOptions& opt) {
  return serialize(compress(t, opt));
}

inline FeatureTensor decompress_bytes(std::span<const std::uint8_t> bytes) {
  return decompress(deserialize(bytes));
}

}  // namespace scz
