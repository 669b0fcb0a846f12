#pragma once

// Choice of the reshape dimension N for an N x K view of the tensor.
//
// The proxy cost of a reshape is l_D * H(p(N)): the ideal coded size in bits
// of the concatenated CSR stream. search() walks feasible divisors of T from
// the largest N downwards and stops at the first strict increase;
// exhaustive_search() scores every feasible divisor and is the reference the
// approximate search is judged against.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <span>
#include <thread>
#include <vector>

#include "scz/error.hpp"
#include "scz/rans.hpp"
#include "scz/sparse.hpp"
#include "scz/tensor.hpp"

namespace scz {

/// Weights for the encode/decode time terms. With both alphas at zero the
/// cost is the pure size proxy.
struct CostProfile {
  double alpha_enc = 0.0;
  double alpha_dec = 0.0;
  double t_enc_ms = 0.0;
  double t_dec_ms = 0.0;
};

struct CostBreakdown {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::size_t nnz = 0;
  std::size_t stream_length = 0;  // l_D
  double entropy_bits = 0.0;      // H(p(N)), bits per symbol
  double t_tot_bits = 0.0;        // l_D * H(p(N))
  double total = 0.0;             // alpha terms + t_tot
};

struct SearchReport {
  std::vector<CostBreakdown> evaluated;  // in evaluation order
  std::size_t chosen = 0;
  std::size_t candidate_count = 0;  // feasible divisors in [N_min, N_max]
  bool early_stopped = false;
  double wall_ms = 0.0;

  const CostBreakdown* find(std::size_t n) const {
    auto it = std::ranges::find(evaluated, n, &CostBreakdown::n_rows);
    return it == evaluated.end() ? nullptr : &*it;
  }
};

inline std::vector<std::size_t> divisors(std::size_t total) {
  std::vector<std::size_t> low;
  std::vector<std::size_t> high;
  for (std::size_t d = 1; d * d <= total; ++d) {
    if (total % d != 0) continue;
    low.push_back(d);
    if (d != total / d) high.push_back(total / d);
  }
  low.insert(low.end(), high.rbegin(), high.rend());
  return low;
}

struct CandidateBounds {
  std::size_t n_min = 0;
  std::size_t n_max = 0;
};

inline std::size_t isqrt(std::size_t v) {
  auto r = static_cast<std::size_t>(std::sqrt(static_cast<double>(v)));
  while (r * r > v) --r;
  while ((r + 1) * (r + 1) <= v) ++r;
  return r;
}

/// N > sqrt(T) (more rows than columns) and K = T/N <= 2^Q.
inline CandidateBounds candidate_bounds(std::size_t total, int q_bits) {
  check_q_bits(q_bits);
  const std::size_t levels = std::size_t{1} << q_bits;
  const std::size_t by_rows = isqrt(total) + 1;
  const std::size_t by_cols = (total + levels - 1) / levels;
  return {std::max(by_rows, by_cols), total};
}

/// Feasible divisors in descending order, the order search() visits them.
inline std::vector<std::size_t> candidates(std::size_t total, int q_bits) {
  const auto bounds = candidate_bounds(total, q_bits);
  std::vector<std::size_t> out;
  for (auto d : divisors(total)) {
    if (d >= bounds.n_min && d <= bounds.n_max) out.push_back(d);
  }
  std::ranges::reverse(out);
  return out;
}

/// Cost of one reshape given the already-quantized tensor. Quantization does
/// not depend on N, so the searches quantize once and call this per candidate.
inline CostBreakdown cost_quantized(const QuantizedTensor& q, std::size_t n_rows,
                                    const CostProfile& profile) {
  const auto shape = reshape_shape(q.data.size(), n_rows);
  const QuantizedMatrix view{shape.n_rows, shape.n_cols, q.data, q.zero_mask};
  const auto stream = concat(csr_encode(view));
  const auto counts = build_counts(stream, alphabet_size_for(stream.data));

  CostBreakdown c;
  c.n_rows = shape.n_rows;
  c.n_cols = shape.n_cols;
  c.nnz = stream.nnz;
  c.stream_length = stream.size();
  c.entropy_bits = entropy(counts);
  c.t_tot_bits = static_cast<double>(c.stream_length) * c.entropy_bits;
  c.total = profile.alpha_enc * profile.t_enc_ms + profile.alpha_dec * profile.t_dec_ms +
            c.t_tot_bits;
  return c;
}

inline CostBreakdown cost(const FeatureTensor& t, std::size_t n_rows, int q_bits,
                          const CostProfile& profile = {}) {
  reshape_shape(t.size(), n_rows);
  return cost_quantized(quantize(t, params_for(t, q_bits)), n_rows, profile);
}

inline std::vector<std::size_t> require_candidates(const FeatureTensor& t, int q_bits) {
  auto list = candidates(t.size(), q_bits);
  if (list.empty()) {
    fail(ErrorCode::kNoFeasibleReshape,
         "no divisor N of T=" + std::to_string(t.size()) + " satisfies N^2 > T and T/N <= 2^Q");
  }
  return list;
}

/// Algorithm core: visit `list` in order, keep the first strict minimum, and
/// stop at the first strict increase over the previous candidate's cost.
template <typename CostFn>
std::size_t early_stop_scan(std::span<const std::size_t> list, CostFn&& cost_of,
                            SearchReport& report) {
  double best = std::numeric_limits<double>::infinity();
  double prev = std::numeric_limits<double>::infinity();
  std::size_t chosen = list.empty() ? 0 : list.front();
  report.candidate_count = list.size();
  report.early_stopped = false;
  for (auto n : list) {
    const CostBreakdown c = cost_of(n);
    report.evaluated.push_back(c);
    if (c.total < best) {
      best = c.total;
      chosen = n;
    }
    if (c.total > prev) {
      report.early_stopped = true;
      break;
    }
    prev = c.total;
  }
  report.chosen = chosen;
  return chosen;
}

inline std::size_t search(const FeatureTensor& t, int q_bits, const CostProfile& profile,
                          SearchReport* report = nullptr) {
  const auto start = std::chrono::steady_clock::now();
  const auto list = require_candidates(t, q_bits);
  const auto q = quantize(t, params_for(t, q_bits));

  SearchReport local;
  const auto chosen = early_stop_scan(
      list, [&](std::size_t n) { return cost_quantized(q, n, profile); }, local);
  local.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  if (report) *report = std::move(local);
  return chosen;
}

/// Scores every feasible divisor. Candidates are independent, so they are
/// spread over up to `threads` workers; results keep descending-N order.
inline std::size_t exhaustive_search(const FeatureTensor& t, int q_bits,
                                     const CostProfile& profile, SearchReport* report = nullptr,
                                     unsigned threads = 0) {
  const auto start = std::chrono::steady_clock::now();
  const auto list = require_candidates(t, q_bits);
  const auto q = quantize(t, params_for(t, q_bits));

  std::vector<CostBreakdown> scored(list.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, list.size()));
  {
    std::vector<std::jthread> workers;
    for (unsigned w = 0; w < threads; ++w) {
      workers.emplace_back([&, w] {
        for (std::size_t i = w; i < list.size(); i += threads) {
          scored[i] = cost_quantized(q, list[i], profile);
        }
      });
    }
  }

  std::size_t chosen = list.front();
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : scored) {
    if (c.total < best) {
      best = c.total;
      chosen = c.n_rows;
    }
  }
  if (report) {
    report->evaluated = std::move(scored);
    report->chosen = chosen;
    report->candidate_count = list.size();
    report->early_stopped = false;
    report->wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }
  return chosen;
}

/// N, K, nnz, entropy_bits_per_symbol, t_tot_bits, chosen
inline void write_report_csv(std::ostream& out, const SearchReport& report) {
  out << "N,K,nnz,entropy_bits_per_symbol,t_tot_bits,chosen\n";
  const auto old_precision = out.precision(17);
  for (const auto& c : report.evaluated) {
    out << c.n_rows << ',' << c.n_cols << ',' << c.nnz << ',' << c.entropy_bits << ','
        << c.t_tot_bits << ',' << (c.n_rows == report.chosen ? 1 : 0) << '\n';
  }
  out.precision(old_precision);
}

}  // namespace scz
