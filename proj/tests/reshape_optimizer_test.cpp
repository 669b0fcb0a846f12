#include "scz/reshape_optimizer.hpp"

#include <gtest/gtest.h>

#include <random>

#include "scz/bench.hpp"

namespace scz {
namespace {

std::vector<std::size_t> trial_division(std::size_t total) {
  std::vector<std::size_t> out;
  for (std::size_t d = 1; d <= total; ++d) {
    if (total % d == 0) out.push_back(d);
  }
  return out;
}

TEST(Divisors, MatchTrialDivision) {
  EXPECT_EQ(divisors(12), (std::vector<std::size_t>{1, 2, 3, 4, 6, 12}));
  EXPECT_EQ(divisors(97), (std::vector<std::size_t>{1, 97}));
  EXPECT_EQ(divisors(1), (std::vector<std::size_t>{1}));
  for (std::size_t t : {36u, 64u, 360u, 1001u, 4096u, 100352u}) {
    EXPECT_EQ(divisors(t), trial_division(t)) << t;
  }
  // 100352 = 2^11 * 7^2
  const auto d = divisors(100352);
  EXPECT_EQ(d.size(), 36u);
  for (std::size_t n : {784u, 6272u, 14336u}) {
    EXPECT_TRUE(std::ranges::binary_search(d, n)) << n;
  }
}

TEST(CandidateBounds, Formula) {
  auto b = candidate_bounds(100352, 4);
  EXPECT_EQ(b.n_min, 6272u);  // max(316 + 1, 100352 / 16)
  EXPECT_EQ(b.n_max, 100352u);

  auto small = candidate_bounds(16, 4);
  EXPECT_EQ(small.n_min, 5u);
  EXPECT_EQ(candidates(16, 4), (std::vector<std::size_t>{16, 8}));

  auto one = candidate_bounds(1, 4);
  EXPECT_EQ(one.n_min, 2u);
  EXPECT_GT(one.n_min, one.n_max);
  EXPECT_TRUE(candidates(1, 4).empty());
}

TEST(CandidateBounds, FeasibilityOfEveryCandidate) {
  for (std::size_t t : {16u, 97u, 1000u, 100352u, 65536u, 30030u}) {
    for (int q = kMinQBits; q <= kMaxQBits; ++q) {
      const auto list = candidates(t, q);
      EXPECT_FALSE(list.empty()) << t;
      for (auto n : list) {
        EXPECT_EQ(t % n, 0u);
        EXPECT_GT(n * n, t);
        EXPECT_LE(t / n, std::size_t{1} << q);
      }
      EXPECT_TRUE(std::ranges::is_sorted(list, std::greater<>{}));
    }
  }
}

TEST(Cost, AllZeroTensorHasZeroCost) {
  FeatureTensor t{{4, 4}, std::vector<float>(16, 0.0f)};
  for (std::size_t n : {1u, 2u, 4u, 8u, 16u}) {
    const auto c = cost(t, n, 4);
    EXPECT_EQ(c.nnz, 0u);
    EXPECT_EQ(c.stream_length, n);
    EXPECT_EQ(c.t_tot_bits, 0.0);
  }
}

TEST(Cost, ComponentsFollowTheStream) {
  // 2x3 example: D = [5,3,2,1,0,2,1,2]-style stream built by hand from a tensor.
  FeatureTensor t{{6}, {0.0f, 5.0f, 0.0f, 3.0f, 0.0f, 2.0f}};
  const auto c = cost(t, 2, 8);
  EXPECT_EQ(c.n_cols, 3u);
  EXPECT_EQ(c.nnz, 3u);
  EXPECT_EQ(c.stream_length, 8u);
  // range [0,5] at Q=8 -> s = 5/255, z = 0; symbols 255, 153, 102.
  const std::vector<std::uint64_t> counts = [] {
    std::vector<std::uint64_t> h(256, 0);
    for (Symbol x : {255u, 153u, 102u, 1u, 0u, 2u, 1u, 2u}) ++h[x];
    return h;
  }();
  EXPECT_NEAR(c.entropy_bits, entropy(counts), 1e-12);
  EXPECT_NEAR(c.t_tot_bits, 8 * entropy(counts), 1e-9);
  EXPECT_THROW(cost(t, 4, 8), Error);
}

TEST(Cost, AlphaTermsAddLinearly) {
  const auto t = gen_synthetic(SyntheticKind::kReluLaplace, {8, 8, 8}, 0.7, 3);
  const CostProfile profile{1.0, 1.0, 2.5, 4.0};
  const auto base = cost(t, 64, 4);
  const auto weighted = cost(t, 64, 4, profile);
  EXPECT_DOUBLE_EQ(weighted.total, base.t_tot_bits + 2.5 + 4.0);
  EXPECT_DOUBLE_EQ(base.total, base.t_tot_bits);
}

TEST(EarlyStopScan, StopsOneStepPastTheMinimum) {
  const std::vector<std::size_t> list{60, 50, 40, 30, 20, 10};
  const std::vector<double> costs{9, 7, 4, 6, 1, 0};  // min before the rise at 30
  SearchReport r;
  auto fn = [&](std::size_t n) {
    const auto i = static_cast<std::size_t>(std::ranges::find(list, n) - list.begin());
    CostBreakdown c;
    c.n_rows = n;
    c.total = costs[i];
    return c;
  };
  EXPECT_EQ(early_stop_scan(list, fn, r), 40u);
  EXPECT_TRUE(r.early_stopped);
  EXPECT_EQ(r.evaluated.size(), 4u);  // 60, 50, 40, 30
}

TEST(EarlyStopScan, PlateausContinueAndTiesKeepEarlier) {
  const std::vector<std::size_t> list{5, 4, 3, 2};
  SearchReport r;
  auto flat = [](std::size_t n) {
    CostBreakdown c;
    c.n_rows = n;
    c.total = 3.0;
    return c;
  };
  EXPECT_EQ(early_stop_scan(list, flat, r), 5u);
  EXPECT_FALSE(r.early_stopped);
  EXPECT_EQ(r.evaluated.size(), 4u);
}

TEST(Search, TieAtSixteenAndEightPicksSixteen) {
  FeatureTensor t{{16}, std::vector<float>(16, 0.0f)};
  SearchReport r;
  EXPECT_EQ(search(t, 4, {}, &r), 16u);
  ASSERT_EQ(r.evaluated.size(), 2u);
  EXPECT_EQ(r.evaluated[0].total, r.evaluated[1].total);
}

TEST(Search, EmptyCandidateSet) {
  FeatureTensor t{{1}, {2.0f}};
  try {
    search(t, 4, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoFeasibleReshape);
  }
  EXPECT_THROW(exhaustive_search(t, 4, {}), Error);
}

TEST(Search, SingleCandidate) {
  // T = 3: N_min = max(2, 1) = 2, divisors in range {3}.
  FeatureTensor t{{3}, {1.0f, 0.0f, 2.0f}};
  EXPECT_EQ(search(t, 2, {}), 3u);
  EXPECT_EQ(exhaustive_search(t, 2, {}), 3u);
}

TEST(Search, VisitsSubsetOfExhaustiveWithIdenticalCosts) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto t = gen_synthetic(SyntheticKind::kReluLaplace, {32, 16, 16}, 0.5 + 0.04 * seed, seed);
    for (int q : {2, 4, 8}) {
      SearchReport fast, all;
      const auto approx = search(t, q, {}, &fast);
      const auto best = exhaustive_search(t, q, {}, &all);
      EXPECT_EQ(all.evaluated.size(), all.candidate_count);
      EXPECT_LE(fast.evaluated.size(), all.evaluated.size());
      for (const auto& c : fast.evaluated) {
        const auto* match = all.find(c.n_rows);
        ASSERT_NE(match, nullptr);
        EXPECT_EQ(match->t_tot_bits, c.t_tot_bits);
      }
      EXPECT_LE(all.find(best)->total, fast.find(approx)->total);
      // Feasibility of the returned dimension.
      EXPECT_EQ(t.size() % approx, 0u);
      EXPECT_GT(approx * approx, t.size());
      EXPECT_LE(t.size() / approx, std::size_t{1} << q);
    }
  }
}

TEST(Search, Deterministic) {
  const auto t = gen_synthetic(SyntheticKind::kReluLaplace, {64, 14, 14}, 0.8, 5);
  SearchReport a, b;
  EXPECT_EQ(search(t, 4, {}, &a), search(t, 4, {}, &b));
  ASSERT_EQ(a.evaluated.size(), b.evaluated.size());
  for (std::size_t i = 0; i < a.evaluated.size(); ++i) {
    EXPECT_EQ(a.evaluated[i].n_rows, b.evaluated[i].n_rows);
    EXPECT_EQ(a.evaluated[i].total, b.evaluated[i].total);
  }
  SearchReport single, multi;
  EXPECT_EQ(exhaustive_search(t, 4, {}, &single, 1), exhaustive_search(t, 4, {}, &multi, 4));
  for (std::size_t i = 0; i < single.evaluated.size(); ++i) {
    EXPECT_EQ(single.evaluated[i].total, multi.evaluated[i].total);
  }
}

TEST(Search, ProxyRankingUnchangedByConstantTimeTerms) {
  const auto t = gen_synthetic(SyntheticKind::kReluLaplace, {16, 28, 28}, 0.85, 8);
  const CostProfile timed{1.0, 1.0, 3.0, 5.0};
  EXPECT_EQ(exhaustive_search(t, 4, {}), exhaustive_search(t, 4, timed));
  EXPECT_EQ(search(t, 4, {}), search(t, 4, timed));
}

TEST(ReportCsv, Schema) {
  FeatureTensor t{{16}, std::vector<float>(16, 0.0f)};
  SearchReport r;
  search(t, 4, {}, &r);
  std::ostringstream out;
  write_report_csv(out, r);
  EXPECT_EQ(out.str(),
            "N,K,nnz,entropy_bits_per_symbol,t_tot_bits,chosen\n"
            "16,1,0,0,0,1\n"
            "8,2,0,0,0,0\n");
}

}  // namespace
}  // namespace scz
