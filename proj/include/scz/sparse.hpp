#pragma once

// Modified CSR: the row array holds per-row nonzero counts rather than
// cumulative offsets, which keeps every row symbol in [0, K]. The prefix sum
// is only formed on decode.

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#include "scz/error.hpp"
#include "scz/tensor.hpp"

namespace scz {

struct SparseCSR {
  std::vector<Symbol> values;
  std::vector<Symbol> col_idx;
  std::vector<Symbol> row_counts;

  std::size_t nnz() const noexcept { return values.size(); }
  std::size_t n_rows() const noexcept { return row_counts.size(); }

  friend bool operator==(const SparseCSR&, const SparseCSR&) = default;
};

/// D = values ++ col_idx ++ row_counts. Segment boundaries follow from
/// (nnz, n_rows) alone.
struct ConcatStream {
  std::vector<Symbol> data;
  std::size_t nnz = 0;
  std::size_t n_rows = 0;

  static constexpr std::size_t expected_length(std::size_t nnz, std::size_t n_rows) {
    return 2 * nnz + n_rows;
  }
  std::size_t size() const noexcept { return data.size(); }
};

/// Single row-major pass. `visited`, when given, accumulates the number of
/// matrix elements touched.
inline SparseCSR csr_encode(const QuantizedMatrix& q, std::size_t* visited = nullptr) {
  SparseCSR s;
  s.row_counts.resize(q.n_rows);
  const Symbol* data = q.data.data();
  const std::uint8_t* mask = q.zero_mask.data();
  for (std::size_t i = 0; i < q.n_rows; ++i) {
    Symbol count = 0;
    const std::size_t base = i * q.n_cols;
    for (std::size_t j = 0; j < q.n_cols; ++j) {
      if (mask[base + j]) continue;
      s.values.push_back(data[base + j]);
      s.col_idx.push_back(static_cast<Symbol>(j));
      ++count;
    }
    s.row_counts[i] = count;
  }
  if (visited) *visited += q.n_rows * q.n_cols;
  return s;
}

/// Inverse of csr_encode. Positions absent from the CSR are marked in
/// zero_mask and filled with `fill` (the zero-point when the matrix came
/// from quantize()).
inline QuantizedMatrix csr_decode(const SparseCSR& s, std::size_t n_rows, std::size_t n_cols,
                                  Symbol fill = 0) {
  if (s.row_counts.size() != n_rows) {
    fail(ErrorCode::kCorruptStream, "row count array length does not match N");
  }
  if (s.col_idx.size() != s.values.size()) {
    fail(ErrorCode::kCorruptStream, "values and column indices differ in length");
  }
  std::uint64_t total = 0;
  for (auto r : s.row_counts) total += r;
  if (total != s.values.size()) {
    fail(ErrorCode::kCorruptStream, "row counts sum to " + std::to_string(total) + " but " +
                                        std::to_string(s.values.size()) + " values present");
  }

  QuantizedMatrix q;
  q.n_rows = n_rows;
  q.n_cols = n_cols;
  q.data.assign(n_rows * n_cols, fill);
  q.zero_mask.assign(n_rows * n_cols, 1);
  std::size_t offset = 0;  // running prefix sum of row_counts
  for (std::size_t i = 0; i < n_rows; ++i) {
    const std::size_t end = offset + s.row_counts[i];
    std::int64_t prev_col = -1;
    for (std::size_t j = offset; j < end; ++j) {
      const Symbol col = s.col_idx[j];
      if (col >= n_cols || static_cast<std::int64_t>(col) <= prev_col) {
        fail(ErrorCode::kCorruptStream, "column index out of range or out of order");
      }
      prev_col = col;
      q.data[i * n_cols + col] = s.values[j];
      q.zero_mask[i * n_cols + col] = 0;
    }
    offset = end;
  }
  return q;
}

inline ConcatStream concat(const SparseCSR& s) {
  ConcatStream d;
  d.nnz = s.nnz();
  d.n_rows = s.n_rows();
  d.data.reserve(ConcatStream::expected_length(d.nnz, d.n_rows));
  d.data.insert(d.data.end(), s.values.begin(), s.values.end());
  d.data.insert(d.data.end(), s.col_idx.begin(), s.col_idx.end());
  d.data.insert(d.data.end(), s.row_counts.begin(), s.row_counts.end());
  return d;
}

inline SparseCSR split(const ConcatStream& d) {
  if (d.data.size() != ConcatStream::expected_length(d.nnz, d.n_rows)) {
    fail(ErrorCode::kCorruptStream, "stream length " + std::to_string(d.data.size()) +
                                        " != 2*nnz + N = " +
                                        std::to_string(ConcatStream::expected_length(d.nnz, d.n_rows)));
  }
  auto begin = d.data.begin();
  const auto nnz = static_cast<std::ptrdiff_t>(d.nnz);
  SparseCSR s;
  s.values.assign(begin, begin + nnz);
  s.col_idx.assign(begin + nnz, begin + 2 * nnz);
  s.row_counts.assign(begin + 2 * nnz, d.data.end());
  return s;
}

}  // namespace scz
