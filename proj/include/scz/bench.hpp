#pragma once

// Synthetic activations and the Q/N sweep harness behind `scz bench`.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "scz/channel.hpp"
#include "scz/container.hpp"
#include "scz/error.hpp"
#include "scz/reshape_optimizer.hpp"
#include "scz/tensor.hpp"

namespace scz {

enum class SyntheticKind { kReluLaplace, kUniform, kConstant };

inline SyntheticKind parse_kind(std::string_view name) {
  if (name == "relu-laplace") return SyntheticKind::kReluLaplace;
  if (name == "uniform") return SyntheticKind::kUniform;
  if (name == "constant") return SyntheticKind::kConstant;
  fail(ErrorCode::kInvalidInput, "unknown synthetic kind '" + std::string(name) + "'");
}

namespace detail {

// mt19937_64's output sequence is fixed by the standard; the library
// distributions are not, so values are derived from raw draws here.
class SplitRng {
 public:
  explicit SplitRng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in the open interval (0, 1).
  double open_unit() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace detail

/// kReluLaplace: zero with probability `sparsity`, otherwise |Laplace(0, 1)|.
/// kUniform: zero with probability `sparsity`, otherwise uniform in (-1, 1).
/// kConstant: every element 1.0; `sparsity` is ignored.
inline FeatureTensor gen_synthetic(SyntheticKind kind, std::vector<std::uint32_t> dims,
                                   double sparsity, std::uint64_t seed) {
  if (!(sparsity >= 0.0 && sparsity <= 1.0)) {
    fail(ErrorCode::kInvalidInput, "sparsity must be in [0, 1]");
  }
  FeatureTensor t;
  t.dims = std::move(dims);
  const std::size_t total = element_count(t.dims);
  if (total == 0) fail(ErrorCode::kInvalidInput, "dims must be positive");
  t.data.resize(total);

  detail::SplitRng rng(seed);
  for (auto& v : t.data) {
    switch (kind) {
      case SyntheticKind::kConstant:
        v = 1.0f;
        break;
      case SyntheticKind::kReluLaplace: {
        const bool zero = rng.open_unit() < sparsity;
        const double mag = -std::log(rng.open_unit());
        v = zero ? 0.0f : static_cast<float>(mag);
        break;
      }
      case SyntheticKind::kUniform: {
        const bool zero = rng.open_unit() < sparsity;
        const double u = 2.0 * rng.open_unit() - 1.0;
        v = zero ? 0.0f : static_cast<float>(u);
        break;
      }
    }
  }
  return t;
}

struct BenchRecord {
  std::string tensor_id;
  int q_bits = 0;
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::size_t nnz = 0;
  double entropy_bits = 0.0;
  std::size_t header_bytes = 0;
  std::size_t payload_bytes = 0;
  std::size_t total_bytes = 0;
  double enc_ms = 0.0;  // median
  double enc_ms_std = 0.0;
  double dec_ms = 0.0;  // median
  double dec_ms_std = 0.0;
  double t_comm_s = 0.0;
  double max_abs_err = 0.0;
  std::string error;  // non-empty when this row failed

  bool ok() const { return error.empty(); }
  /// Spread below the median on both timings; rows failing this are noisy.
  bool timing_stable() const { return enc_ms_std < enc_ms && dec_ms_std < dec_ms; }
};

struct ReshapePolicy {
  enum class Kind { kOptimizer, kExhaustive, kExplicit } kind = Kind::kOptimizer;
  std::vector<std::size_t> rows;  // used by kExplicit

  static ReshapePolicy optimizer() { return {Kind::kOptimizer, {}}; }
  static ReshapePolicy exhaustive() { return {Kind::kExhaustive, {}}; }
  static ReshapePolicy explicit_rows(std::vector<std::size_t> rows) {
    return {Kind::kExplicit, std::move(rows)};
  }
};

struct SweepOptions {
  std::string tensor_id = "tensor";
  int repetitions = 20;
  int warmup = 2;
  int precision = kDefaultPrecision;
  ChannelParams channel;
};

struct TimingStats {
  double median = 0.0;
  double stddev = 0.0;
};

inline TimingStats summarize(std::vector<double> samples) {
  TimingStats s;
  if (samples.empty()) return s;
  std::ranges::sort(samples);
  const std::size_t n = samples.size();
  s.median = n % 2 ? samples[n / 2] : 0.5 * (samples[n / 2 - 1] + samples[n / 2]);
  const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  double var = 0.0;
  for (double x : samples) var += (x - mean) * (x - mean);
  s.stddev = n > 1 ? std::sqrt(var / (n - 1)) : 0.0;
  return s;
}

template <typename Fn>
TimingStats time_ms(Fn&& fn, int repetitions, int warmup) {
  for (int i = 0; i < warmup; ++i) fn();
  std::vector<double> samples;
  samples.reserve(repetitions);
  for (int i = 0; i < repetitions; ++i) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    samples.push_back(
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count());
  }
  return summarize(std::move(samples));
}

inline double max_abs_error(const FeatureTensor& a, const FeatureTensor& b) {
  double err = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    err = std::max(err, std::abs(static_cast<double>(a.data[i]) - b.data[i]));
  }
  return err;
}

/// One compress/decompress measurement at a fixed (Q, N).
inline BenchRecord bench_one(const FeatureTensor& t, int q_bits, std::size_t n_rows,
                             const SweepOptions& opt) {
  BenchRecord rec;
  rec.tensor_id = opt.tensor_id;
  rec.q_bits = q_bits;
  rec.n_rows = n_rows;
  try {
    CompressOptions copt;
    copt.q_bits = q_bits;
    copt.n_rows = n_rows;
    copt.precision = opt.precision;
    const Container c = compress(t, copt);
    const FeatureTensor back = decompress(c);

    rec.n_cols = c.header.n_cols;
    rec.nnz = c.header.nnz;
    rec.entropy_bits = entropy(c.table.raw_counts);
    rec.header_bytes = c.header_bytes();
    rec.payload_bytes = c.payload_bytes();
    rec.total_bytes = c.total_bytes();
    rec.max_abs_err = max_abs_error(t, back);
    rec.t_comm_s = comm_latency(static_cast<double>(rec.total_bytes) * 8.0, opt.channel);

    const int reps = std::max(opt.repetitions, 1);
    const auto enc = time_ms([&] { (void)compress(t, copt); }, reps, opt.warmup);
    const auto dec = time_ms([&] { (void)decompress(c); }, reps, opt.warmup);
    rec.enc_ms = enc.median;
    rec.enc_ms_std = enc.stddev;
    rec.dec_ms = dec.median;
    rec.dec_ms_std = dec.stddev;
  } catch (const Error& e) {
    rec.error = e.what();
  }
  return rec;
}

inline std::vector<BenchRecord> run_sweep(const FeatureTensor& t, std::span<const int> q_list,
                                          const ReshapePolicy& policy,
                                          const SweepOptions& opt = {}) {
  validate(t);
  std::vector<BenchRecord> out;
  for (int q : q_list) {
    std::vector<std::size_t> rows;
    try {
      switch (policy.kind) {
        case ReshapePolicy::Kind::kOptimizer:
          rows.push_back(select_rows(t, q, {}));
          break;
        case ReshapePolicy::Kind::kExhaustive:
          try {
            rows.push_back(exhaustive_search(t, q, {}));
          } catch (const Error& e) {
            if (e.code() != ErrorCode::kNoFeasibleReshape) throw;
            rows.push_back(t.size());
          }
          break;
        case ReshapePolicy::Kind::kExplicit:
          rows = policy.rows;
          break;
      }
    } catch (const Error& e) {
      BenchRecord rec;
      rec.tensor_id = opt.tensor_id;
      rec.q_bits = q;
      rec.error = e.what();
      out.push_back(std::move(rec));
      continue;
    }
    for (auto n : rows) out.push_back(bench_one(t, q, n, opt));
  }
  return out;
}

inline constexpr std::string_view kBenchCsvHeader =
    "tensor_id,Q,N,K,nnz,entropy_bits,header_bytes,payload_bytes,total_bytes,"
    "enc_ms,enc_ms_std,dec_ms,dec_ms_std,t_comm_s,max_abs_err,error";

inline std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

inline std::string to_csv(std::span<const BenchRecord> records) {
  std::ostringstream out;
  out.precision(10);
  out << kBenchCsvHeader << '\n';
  for (const auto& r : records) {
    out << csv_escape(r.tensor_id) << ',' << r.q_bits << ',' << r.n_rows << ',' << r.n_cols << ','
        << r.nnz << ',' << r.entropy_bits << ',' << r.header_bytes << ',' << r.payload_bytes
        << ',' << r.total_bytes << ',' << r.enc_ms << ',' << r.enc_ms_std << ',' << r.dec_ms << ','
        << r.dec_ms_std << ',' << r.t_comm_s << ',' << r.max_abs_err << ','
        << csv_escape(r.error) << '\n';
  }
  return out.str();
}

inline void write_csv(const std::filesystem::path& path, std::span<const BenchRecord> records) {
  const std::string text = to_csv(records);
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace scz
