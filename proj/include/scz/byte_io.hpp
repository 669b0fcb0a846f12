#pragma once

// Little-endian field packing shared by the RTF and SCZ formats.

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <string_view>
#include <type_traits>
#include <vector>

#include "scz/error.hpp"

namespace scz {

class ByteWriter {
 public:
  template <typename T>
    requires std::is_arithmetic_v<T>
  void put(T value) {
    using U = std::conditional_t<sizeof(T) == 1, std::uint8_t,
              std::conditional_t<sizeof(T) == 2, std::uint16_t,
              std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>>>;
    U bits = std::bit_cast<U>(value);
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      bytes_.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
    }
  }

  void put_bytes(std::span<const std::uint8_t> bytes) {
    bytes_.insert(bytes_.end(), bytes.begin(), bytes.end());
  }

  void put_tag(std::string_view tag) {
    for (char ch : tag) bytes_.push_back(static_cast<std::uint8_t>(ch));
  }

  std::size_t size() const noexcept { return bytes_.size(); }
  std::vector<std::uint8_t>& bytes() noexcept { return bytes_; }
  std::vector<std::uint8_t> take() noexcept { return std::move(bytes_); }

 private:
  std::vector<std::uint8_t> bytes_;
};

/// Bounds-checked reader. Running off the end raises `underrun_code`, which
/// lets each format choose whether truncation means a bad header or a bad
/// payload.
class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes,
                      ErrorCode underrun_code = ErrorCode::kInvalidContainer)
      : bytes_(bytes), underrun_code_(underrun_code) {}

  template <typename T>
    requires std::is_arithmetic_v<T>
  T get() {
    using U = std::conditional_t<sizeof(T) == 1, std::uint8_t,
              std::conditional_t<sizeof(T) == 2, std::uint16_t,
              std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>>>;
    require(sizeof(U));
    U bits = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      bits |= static_cast<U>(static_cast<U>(bytes_[pos_ + i]) << (8 * i));
    }
    pos_ += sizeof(U);
    return std::bit_cast<T>(bits);
  }

  std::span<const std::uint8_t> get_bytes(std::size_t count) {
    require(count);
    auto out = bytes_.subspan(pos_, count);
    pos_ += count;
    return out;
  }

  bool tag_matches(std::string_view tag) {
    if (remaining() < tag.size()) return false;
    bool ok = std::memcmp(bytes_.data() + pos_, tag.data(), tag.size()) == 0;
    pos_ += tag.size();
    return ok;
  }

  std::size_t position() const noexcept { return pos_; }
  std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

 private:
  void require(std::size_t count) const {
    if (remaining() < count) {
      fail(underrun_code_, "unexpected end of data at offset " + std::to_string(pos_));
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
  ErrorCode underrun_code_;
};

}  // namespace scz
