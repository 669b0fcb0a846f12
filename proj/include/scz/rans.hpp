#pragma once

// Static-model rANS over the unified symbol stream, with byte-wise
// renormalization of a 32-bit state kept in [2^23, 2^32).
//
// Symbols are encoded last-to-first so that the decoder reads the byte stream
// strictly forward and emits symbols in their original order. Stream layout:
//   [final encoder state, u32 LE][renormalization bytes in read order]

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <queue>
#include <span>
#include <vector>

#include "scz/byte_io.hpp"
#include "scz/error.hpp"
#include "scz/sparse.hpp"

namespace scz {

inline constexpr std::uint32_t kRansLowerBound = 1u << 23;
inline constexpr int kDefaultPrecision = 14;
inline constexpr int kMaxPrecision = 16;

struct FrequencyTable {
  int precision = kDefaultPrecision;
  std::vector<std::uint64_t> raw_counts;  // empty when rebuilt from the wire form
  std::vector<std::uint32_t> freqs;       // normalized, sums to 2^precision
  std::vector<std::uint32_t> cdf;         // cdf[i] = sum of freqs[0..i), size alphabet+1

  std::size_t alphabet_size() const noexcept { return freqs.size(); }
  std::uint32_t total() const noexcept { return std::uint32_t{1} << precision; }

  /// Builds a table from already-normalized frequencies, checking the sum.
  static FrequencyTable from_normalized(std::vector<std::uint32_t> freqs, int precision) {
    if (precision < 1 || precision > kMaxPrecision) {
      fail(ErrorCode::kInvalidInput, "precision must be in [1, 16]");
    }
    FrequencyTable t;
    t.precision = precision;
    t.freqs = std::move(freqs);
    t.cdf.resize(t.freqs.size() + 1, 0);
    std::uint64_t acc = 0;
    for (std::size_t i = 0; i < t.freqs.size(); ++i) {
      acc += t.freqs[i];
      t.cdf[i + 1] = static_cast<std::uint32_t>(std::min<std::uint64_t>(acc, UINT32_MAX));
    }
    if (acc != t.total()) {
      fail(ErrorCode::kNormalizeError, "frequencies sum to " + std::to_string(acc) +
                                           ", expected " + std::to_string(t.total()));
    }
    return t;
  }
};

struct Bitstream {
  std::vector<std::uint8_t> bytes;

  std::size_t payload_bits() const noexcept { return bytes.size() * 8; }
};

// ---- statistics

inline std::size_t alphabet_size_for(std::span<const Symbol> data) {
  Symbol hi = 0;
  for (auto x : data) hi = std::max(hi, x);
  return static_cast<std::size_t>(hi) + 1;
}

inline std::vector<std::uint64_t> build_counts(std::span<const Symbol> data,
                                               std::size_t alphabet_size) {
  std::vector<std::uint64_t> counts(alphabet_size, 0);
  for (auto x : data) {
    if (x >= alphabet_size) {
      fail(ErrorCode::kAlphabetOverflow, "symbol " + std::to_string(x) +
                                             " outside alphabet of size " +
                                             std::to_string(alphabet_size));
    }
    ++counts[x];
  }
  return counts;
}

inline std::vector<std::uint64_t> build_counts(const ConcatStream& d, std::size_t alphabet_size) {
  return build_counts(std::span<const Symbol>(d.data), alphabet_size);
}

inline std::uint64_t total_count(std::span<const std::uint64_t> counts) {
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  return total;
}

/// Shannon entropy of the empirical distribution, in bits per symbol.
inline double entropy(std::span<const std::uint64_t> counts) {
  const std::uint64_t total = total_count(counts);
  if (total == 0) fail(ErrorCode::kInvalidInput, "entropy of an empty distribution");
  const double n = static_cast<double>(total);
  double h = 0.0;
  for (auto c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    h -= p * std::log2(p);
  }
  return h > 0.0 ? h : 0.0;
}

/// Ideal coded size in bits: symbol count times entropy.
inline double expected_size(std::span<const std::uint64_t> counts) {
  return static_cast<double>(total_count(counts)) * entropy(counts);
}

inline double compression_ratio(std::span<const std::uint64_t> counts, std::size_t alphabet_size) {
  if (alphabet_size < 2) fail(ErrorCode::kInvalidInput, "alphabet size must be at least 2");
  const double n = static_cast<double>(total_count(counts));
  if (n == 0) fail(ErrorCode::kInvalidInput, "empty distribution");
  return expected_size(counts) / (n * std::log2(static_cast<double>(alphabet_size)));
}

// ---- table normalization

/// Scales counts to sum to exactly 2^precision (Hamilton / largest remainder),
/// gives every present symbol at least one slot, then takes any surplus
/// created by that minimum back from the largest entries. Ties go to the
/// lower symbol index throughout.
inline FrequencyTable normalize_frequencies(std::span<const std::uint64_t> counts, int precision) {
  if (precision < 1 || precision > kMaxPrecision) {
    fail(ErrorCode::kInvalidInput, "precision must be in [1, 16]");
  }
  const std::uint64_t total = total_count(counts);
  if (total == 0) fail(ErrorCode::kNormalizeError, "all counts are zero");
  const std::uint64_t target = std::uint64_t{1} << precision;
  const auto distinct =
      static_cast<std::uint64_t>(std::ranges::count_if(counts, [](auto c) { return c > 0; }));
  if (distinct > target || counts.size() > target) {
    fail(ErrorCode::kPrecisionTooSmall, std::to_string(distinct) + " symbols cannot fit in 2^" +
                                            std::to_string(precision) + " slots");
  }

  const std::size_t m = counts.size();
  std::vector<std::uint64_t> freq(m, 0);
  std::vector<std::uint64_t> remainder(m, 0);
  std::uint64_t assigned = 0;
  for (std::size_t i = 0; i < m; ++i) {
    // counts[i] * 2^16 can overflow for very large inputs; use 128-bit.
    const unsigned __int128 scaled = static_cast<unsigned __int128>(counts[i]) * target;
    freq[i] = static_cast<std::uint64_t>(scaled / total);
    remainder[i] = static_cast<std::uint64_t>(scaled % total);
    assigned += freq[i];
  }

  if (assigned < target) {
    std::vector<std::size_t> order(m);
    for (std::size_t i = 0; i < m; ++i) order[i] = i;
    std::ranges::stable_sort(order, [&](std::size_t a, std::size_t b) {
      return remainder[a] > remainder[b];
    });
    for (std::size_t k = 0; assigned < target; k = (k + 1) % m) {
      if (counts[order[k]] == 0) continue;
      ++freq[order[k]];
      ++assigned;
    }
  }

  for (std::size_t i = 0; i < m; ++i) {
    if (counts[i] > 0 && freq[i] == 0) {
      freq[i] = 1;
      ++assigned;
    }
  }

  if (assigned > target) {
    // max-heap on (freq, -index)
    auto less = [&](std::size_t a, std::size_t b) {
      return freq[a] != freq[b] ? freq[a] < freq[b] : a > b;
    };
    std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(less)> heap(less);
    for (std::size_t i = 0; i < m; ++i) {
      if (freq[i] > 1) heap.push(i);
    }
    while (assigned > target) {
      const std::size_t i = heap.top();
      heap.pop();
      --freq[i];
      --assigned;
      if (freq[i] > 1) heap.push(i);
    }
  }

  std::vector<std::uint32_t> out(freq.begin(), freq.end());
  auto table = FrequencyTable::from_normalized(std::move(out), precision);
  table.raw_counts.assign(counts.begin(), counts.end());
  return table;
}

inline FrequencyTable build_table(std::span<const Symbol> data, std::size_t alphabet_size,
                                  int precision = kDefaultPrecision) {
  auto counts = build_counts(data, alphabet_size);
  return normalize_frequencies(counts, precision);
}

// ---- single-step state transforms

/// s' = floor(s / f) * 2^n + F + (s mod f)
constexpr std::uint32_t encode_step(std::uint32_t state, std::uint32_t freq, std::uint32_t cum,
                                    int precision) {
  return ((state / freq) << precision) + cum + (state % freq);
}

/// Inverse of encode_step given the symbol's (freq, cum); slot = s mod 2^n.
constexpr std::uint32_t decode_step(std::uint32_t state, std::uint32_t freq, std::uint32_t cum,
                                    int precision) {
  const std::uint32_t mask = (std::uint32_t{1} << precision) - 1;
  return freq * (state >> precision) + (state & mask) - cum;
}

/// Symbol x with cdf[x] <= slot < cdf[x+1].
inline Symbol find_symbol(const FrequencyTable& t, std::uint32_t slot) {
  auto it = std::upper_bound(t.cdf.begin(), t.cdf.end(), slot);
  return static_cast<Symbol>(std::distance(t.cdf.begin(), it) - 1);
}

// ---- coder

inline Bitstream encode(std::span<const Symbol> data, const FrequencyTable& t) {
  const int n = t.precision;
  std::vector<std::uint8_t> emitted;
  emitted.reserve(data.size() / 2 + 16);

  std::uint32_t state = kRansLowerBound;
  for (auto it = data.rbegin(); it != data.rend(); ++it) {
    const Symbol x = *it;
    if (x >= t.alphabet_size() || t.freqs[x] == 0) {
      fail(ErrorCode::kUncodableSymbol, "symbol " + std::to_string(x) + " has zero frequency");
    }
    const std::uint32_t freq = t.freqs[x];
    const std::uint64_t limit = static_cast<std::uint64_t>((kRansLowerBound >> n) << 8) * freq;
    while (state >= limit) {
      emitted.push_back(static_cast<std::uint8_t>(state & 0xff));
      state >>= 8;
    }
    state = encode_step(state, freq, t.cdf[x], n);
    assert(state >= kRansLowerBound);
  }

  Bitstream out;
  out.bytes.reserve(4 + emitted.size());
  for (int i = 0; i < 4; ++i) out.bytes.push_back(static_cast<std::uint8_t>(state >> (8 * i)));
  out.bytes.insert(out.bytes.end(), emitted.rbegin(), emitted.rend());
  return out;
}

inline Bitstream encode(const ConcatStream& d, const FrequencyTable& t) {
  return encode(std::span<const Symbol>(d.data), t);
}

inline std::vector<Symbol> decode(std::span<const std::uint8_t> bytes, const FrequencyTable& t,
                                  std::size_t count) {
  if (bytes.size() < 4) fail(ErrorCode::kCorruptStream, "stream shorter than the state header");
  const int n = t.precision;
  const std::uint32_t mask = t.total() - 1;

  std::uint32_t state = 0;
  for (int i = 0; i < 4; ++i) state |= static_cast<std::uint32_t>(bytes[i]) << (8 * i);
  std::size_t pos = 4;

  std::vector<Symbol> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (state < kRansLowerBound) fail(ErrorCode::kCorruptStream, "state below lower bound");
    const std::uint32_t slot = state & mask;
    const Symbol x = find_symbol(t, slot);
    out[i] = x;
    state = decode_step(state, t.freqs[x], t.cdf[x], n);
    while (state < kRansLowerBound) {
      if (pos >= bytes.size()) fail(ErrorCode::kCorruptStream, "byte underrun");
      state = (state << 8) | bytes[pos++];
    }
  }
  if (state != kRansLowerBound) {
    fail(ErrorCode::kCorruptStream, "final decoder state does not match the initial encoder state");
  }
  if (pos != bytes.size()) {
    fail(ErrorCode::kCorruptStream, std::to_string(bytes.size() - pos) + " trailing bytes");
  }
  return out;
}

inline std::vector<Symbol> decode(const Bitstream& b, const FrequencyTable& t, std::size_t count) {
  return decode(std::span<const std::uint8_t>(b.bytes), t, count);
}

// ---- table wire form: u32 alphabet size, then one u16 per symbol.

inline void write_table(ByteWriter& w, const FrequencyTable& t) {
  w.put(static_cast<std::uint32_t>(t.alphabet_size()));
  for (auto f : t.freqs) {
    if (f > UINT16_MAX) {
      fail(ErrorCode::kInvalidInput, "frequency " + std::to_string(f) + " does not fit in 16 bits");
    }
    w.put(static_cast<std::uint16_t>(f));
  }
}

inline FrequencyTable read_table(ByteReader& r, int precision) {
  const auto alphabet = r.get<std::uint32_t>();
  if (alphabet == 0 || alphabet > (std::uint32_t{1} << precision)) {
    fail(ErrorCode::kInvalidContainer, "alphabet size " + std::to_string(alphabet) +
                                           " invalid for precision " + std::to_string(precision));
  }
  std::vector<std::uint32_t> freqs(alphabet);
  for (auto& f : freqs) f = r.get<std::uint16_t>();
  try {
    return FrequencyTable::from_normalized(std::move(freqs), precision);
  } catch (const Error& e) {
    fail(ErrorCode::kInvalidContainer, e.what());
  }
}

}  // namespace scz
