#pragma once

// Feature tensors, asymmetric integer quantization and the N x K matrix view.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "scz/byte_io.hpp"
#include "scz/error.hpp"

namespace scz {

using Symbol = std::uint32_t;

inline constexpr int kMinQBits = 2;
inline constexpr int kMaxQBits = 8;

/// Dense float32 activation with its logical shape, e.g. {C, H, W}.
struct FeatureTensor {
  std::vector<std::uint32_t> dims;
  std::vector<float> data;

  std::size_t size() const noexcept { return data.size(); }

  friend bool operator==(const FeatureTensor&, const FeatureTensor&) = default;
};

inline std::size_t element_count(std::span<const std::uint32_t> dims) {
  if (dims.empty()) return 0;
  std::size_t total = 1;
  for (auto d : dims) total *= d;
  return total;
}

inline void validate(const FeatureTensor& t) {
  if (t.dims.empty() || t.dims.size() > 255) {
    fail(ErrorCode::kInvalidInput, "tensor must have between 1 and 255 dims");
  }
  if (std::ranges::any_of(t.dims, [](auto d) { return d == 0; })) {
    fail(ErrorCode::kInvalidInput, "tensor dims must be positive");
  }
  if (element_count(t.dims) != t.data.size()) {
    fail(ErrorCode::kInvalidInput, "data length does not match product of dims");
  }
  if (!std::ranges::all_of(t.data, [](float v) { return std::isfinite(v); })) {
    fail(ErrorCode::kInvalidInput, "tensor contains NaN or Inf");
  }
}

struct QuantParams {
  int q_bits = 8;
  double scale = 1.0;
  std::int64_t zero_point = 0;
  double x_min = 0.0;
  double x_max = 0.0;

  Symbol max_symbol() const noexcept { return (Symbol{1} << q_bits) - 1; }
};

/// Quantized symbols for the flattened tensor. zero_mask marks elements whose
/// original value was exactly 0.0; those are the ones sparse coding drops.
struct QuantizedTensor {
  std::vector<Symbol> data;
  std::vector<std::uint8_t> zero_mask;
};

/// Row-major N x K view over quantized symbols.
struct QuantizedMatrix {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::vector<Symbol> data;
  std::vector<std::uint8_t> zero_mask;

  Symbol at(std::size_t row, std::size_t col) const { return data[row * n_cols + col]; }
  bool is_zero(std::size_t row, std::size_t col) const {
    return zero_mask[row * n_cols + col] != 0;
  }

  friend bool operator==(const QuantizedMatrix&, const QuantizedMatrix&) = default;
};

// Round half away from zero, which is what std::round does on every platform.
inline double round_half_away(double v) { return std::round(v); }

inline std::int64_t clamp_symbol(double v, int q_bits) {
  const double hi = static_cast<double>((std::int64_t{1} << q_bits) - 1);
  return static_cast<std::int64_t>(std::clamp(v, 0.0, hi));
}

inline void check_q_bits(int q_bits) {
  if (q_bits < kMinQBits || q_bits > kMaxQBits) {
    fail(ErrorCode::kInvalidInput, "q_bits must be in [2, 8], got " + std::to_string(q_bits));
  }
}

inline QuantParams compute_params(double x_min, double x_max, int q_bits) {
  check_q_bits(q_bits);
  if (!std::isfinite(x_min) || !std::isfinite(x_max)) {
    fail(ErrorCode::kInvalidInput, "quantization range must be finite");
  }
  if (x_min > x_max) fail(ErrorCode::kInvalidInput, "x_min > x_max");

  QuantParams p;
  p.q_bits = q_bits;
  p.x_min = x_min;
  p.x_max = x_max;
  if (x_max == x_min) {
    p.scale = 1.0;
    p.zero_point = clamp_symbol(round_half_away(-x_min), q_bits);
    return p;
  }
  p.scale = (x_max - x_min) / static_cast<double>((1 << q_bits) - 1);
  p.zero_point = clamp_symbol(round_half_away(-x_min / p.scale), q_bits);
  return p;
}

/// Per-tensor quantization range. Zero is always included so that the
/// zero-point lands inside the symbol grid and the error bound holds for
/// strictly positive or strictly negative tensors too.
inline std::pair<double, double> quantization_range(const FeatureTensor& t) {
  double lo = 0.0;
  double hi = 0.0;
  for (float v : t.data) {
    lo = std::min(lo, static_cast<double>(v));
    hi = std::max(hi, static_cast<double>(v));
  }
  return {lo, hi};
}

inline QuantParams params_for(const FeatureTensor& t, int q_bits) {
  auto [lo, hi] = quantization_range(t);
  return compute_params(lo, hi, q_bits);
}

inline Symbol quantize_value(float x, const QuantParams& p) {
  const double scaled = static_cast<double>(x) / p.scale + static_cast<double>(p.zero_point);
  return static_cast<Symbol>(clamp_symbol(round_half_away(scaled), p.q_bits));
}

inline QuantizedTensor quantize(const FeatureTensor& t, const QuantParams& p) {
  QuantizedTensor out;
  out.data.resize(t.data.size());
  out.zero_mask.resize(t.data.size());
  for (std::size_t i = 0; i < t.data.size(); ++i) {
    out.data[i] = quantize_value(t.data[i], p);
    out.zero_mask[i] = t.data[i] == 0.0f ? 1 : 0;
  }
  return out;
}

inline float dequantize_value(Symbol q, const QuantParams& p) {
  return static_cast<float>((static_cast<double>(q) - static_cast<double>(p.zero_point)) * p.scale);
}

inline FeatureTensor dequantize(const QuantizedMatrix& q, const QuantParams& p,
                                std::span<const std::uint32_t> dims) {
  if (dims.empty()) fail(ErrorCode::kInvalidContainer, "missing original tensor dims");
  if (element_count(dims) != q.data.size() || q.zero_mask.size() != q.data.size()) {
    fail(ErrorCode::kInvalidContainer, "recorded dims do not match quantized data");
  }
  FeatureTensor out;
  out.dims.assign(dims.begin(), dims.end());
  out.data.resize(q.data.size());
  for (std::size_t i = 0; i < q.data.size(); ++i) {
    out.data[i] = q.zero_mask[i] ? 0.0f : dequantize_value(q.data[i], p);
  }
  return out;
}

struct MatrixShape {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
};

inline MatrixShape reshape_shape(std::size_t total, std::size_t n_rows) {
  if (n_rows == 0 || total % n_rows != 0) {
    fail(ErrorCode::kNonDivisible,
         std::to_string(n_rows) + " does not divide " + std::to_string(total));
  }
  return {n_rows, total / n_rows};
}

/// Views the flattened symbols as N x K, keeping row-major element order.
inline QuantizedMatrix reshape(QuantizedTensor q, std::size_t n_rows) {
  auto shape = reshape_shape(q.data.size(), n_rows);
  return {shape.n_rows, shape.n_cols, std::move(q.data), std::move(q.zero_mask)};
}

inline QuantizedMatrix reshape(const FeatureTensor& t, const QuantParams& p, std::size_t n_rows) {
  reshape_shape(t.size(), n_rows);
  return reshape(quantize(t, p), n_rows);
}

// ---- RTF: "RTF1", u8 dim count, u32 dims, float32 values; little-endian.

inline constexpr std::string_view kRtfMagic = "RTF1";

inline std::vector<std::uint8_t> encode_rtf(const FeatureTensor& t) {
  validate(t);
  ByteWriter w;
  w.put_tag(kRtfMagic);
  w.put(static_cast<std::uint8_t>(t.dims.size()));
  for (auto d : t.dims) w.put(d);
  for (float v : t.data) w.put(v);
  return w.take();
}

inline FeatureTensor decode_rtf(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes, ErrorCode::kInvalidInput);
  if (!r.tag_matches(kRtfMagic)) fail(ErrorCode::kInvalidInput, "bad RTF magic");
  FeatureTensor t;
  t.dims.resize(r.get<std::uint8_t>());
  for (auto& d : t.dims) d = r.get<std::uint32_t>();
  const std::size_t total = element_count(t.dims);
  if (total == 0) fail(ErrorCode::kInvalidInput, "RTF tensor has no elements");
  if (r.remaining() != total * sizeof(float)) {
    fail(ErrorCode::kInvalidInput, "RTF payload length does not match dims");
  }
  t.data.resize(total);
  for (auto& v : t.data) v = r.get<float>();
  validate(t);
  return t;
}

inline std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kInvalidInput, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Writes via a sibling temp file and rename so readers never see a partial file.
inline void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::kInvalidInput, "cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) fail(ErrorCode::kInvalidInput, "short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline FeatureTensor read_rtf(const std::filesystem::path& path) {
  return decode_rtf(read_file(path));
}

inline void write_rtf(const std::filesystem::path& path, const FeatureTensor& t) {
  write_file(path, encode_rtf(t));
}

}  // namespace scz
