#include "tfub/gabor.hpp"
#include "tfub/rank.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace tfub;

namespace {

ComplexMatrix W(int n) { return dft_matrix(FiniteAbelianGroup::cyclic(n)); }

// brute-force histogram with a plain SVD per submatrix; independent of RankKernel's LU path
std::map<int, std::map<int, std::uint64_t>> brute_histogram(const ComplexMatrix& M, int r) {
  std::map<int, std::map<int, std::uint64_t>> h;
  for_each_subset(static_cast<int>(M.cols()), r, [&](const std::vector<int>& c) {
    for_each_subset(static_cast<int>(M.rows()), r, [&](const std::vector<int>& rows) {
      ++h[r][numeric_rank(submatrix(M, rows, c)).rank];
      return true;
    });
    return true;
  });
  return h;
}

}  // namespace

TEST(Rank, NumericRankBasics) {
  EXPECT_EQ(numeric_rank(ComplexMatrix::Identity(3, 3)).rank, 3);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd;
  ComplexVector u(5), v(5);
  for (int i = 0; i < 5; ++i) {
    u(i) = Complex(nd(rng), nd(rng));
    v(i) = Complex(nd(rng), nd(rng));
  }
  auto rep = numeric_rank(u * v.adjoint());
  EXPECT_EQ(rep.rank, 1);
  EXPECT_GT(rep.gap_ratio, 1e10);
  EXPECT_FALSE(rep.uncertain());
  EXPECT_THROW(numeric_rank(ComplexMatrix(0, 0)), std::invalid_argument);
  EXPECT_EQ(numeric_rank(ComplexMatrix::Zero(2, 3)).rank, 0);
}

TEST(Rank, GapFlagsUncertain) {
  ComplexMatrix M = ComplexMatrix::Identity(3, 3);
  M(2, 2) = 1e-2;
  auto rep = numeric_rank(M);
  EXPECT_EQ(rep.rank, 3);
  EXPECT_FALSE(rep.uncertain());
  M(2, 2) = 5e-10;  // just above threshold 3e-10: tiny margin
  EXPECT_TRUE(numeric_rank(M).uncertain());
}

TEST(Rank, SubmatrixExamples) {
  ComplexMatrix W4 = W(4);
  auto s = submatrix(W4, {1}, {2});
  ASSERT_EQ(s.size(), 1);
  EXPECT_EQ(s(0, 0), Complex(-1.0));
  EXPECT_EQ(submatrix(W4, {0, 1, 2, 3}, {0, 1, 2, 3}), W4);
  EXPECT_THROW(submatrix(W4, {4}, {0}), std::out_of_range);
  EXPECT_EQ(numeric_rank(submatrix(W(6), {0, 3}, {0, 2})).rank, 1);
}

TEST(Rank, CombinatoricsColex) {
  EXPECT_EQ(binomial(10, 3), 120u);
  EXPECT_EQ(binomial(5, 7), 0u);
  std::uint64_t idx = 0;
  for_each_subset(7, 3, [&](const std::vector<int>& s) {
    EXPECT_EQ(colex_rank(s), idx);
    EXPECT_EQ(colex_unrank(idx, 3), s);
    ++idx;
    return true;
  });
  EXPECT_EQ(idx, 35u);
  EXPECT_EQ(complement({1, 3}, 5), (std::vector<int>{0, 2, 4}));
}

TEST(Rank, DftHistogramsZ5Z6) {
  auto h5 = minor_rank_histogram(W(5), {1, 2, 3, 4, 5});
  EXPECT_EQ(h5.counts[1], (std::map<int, std::uint64_t>{{1, 25}}));
  EXPECT_EQ(h5.counts[2], (std::map<int, std::uint64_t>{{2, 100}}));
  EXPECT_EQ(h5.counts[3], (std::map<int, std::uint64_t>{{3, 100}}));
  EXPECT_EQ(h5.counts[4], (std::map<int, std::uint64_t>{{4, 25}}));
  EXPECT_EQ(h5.counts[5], (std::map<int, std::uint64_t>{{5, 1}}));
  EXPECT_EQ(h5.uncertain, 0u);

  auto h6 = minor_rank_histogram(W(6), {1, 2, 3, 4, 5, 6});
  EXPECT_EQ(h6.counts[2], (std::map<int, std::uint64_t>{{1, 36}, {2, 189}}));
  EXPECT_EQ(h6.counts[3], (std::map<int, std::uint64_t>{{2, 48}, {3, 352}}));
  EXPECT_EQ(h6.counts[4], (std::map<int, std::uint64_t>{{3, 36}, {4, 189}}));
  EXPECT_EQ(h6.counts[5], (std::map<int, std::uint64_t>{{5, 36}}));
  EXPECT_EQ(h6.counts[6], (std::map<int, std::uint64_t>{{6, 1}}));
  EXPECT_EQ(h6.uncertain, 0u);
}

TEST(Rank, HistogramMatchesBruteForce) {
  for (int n : {4, 6, 8}) {
    ComplexMatrix M = W(n);
    for (int r = 1; r < n; ++r) EXPECT_EQ(minor_rank_histogram(M, {r}).counts, brute_histogram(M, r)) << n << "," << r;
  }
  auto Z4 = FiniteAbelianGroup::cyclic(4);
  ComplexMatrix A = gabor_matrix(Z4, random_window(Z4, 3)).matrix;
  for (int r = 1; r <= 3; ++r) EXPECT_EQ(minor_rank_histogram(A, {r}).counts, brute_histogram(A, r)) << r;
}

TEST(Rank, HistogramTotalsAndThreadInvariance) {
  auto Z6 = FiniteAbelianGroup::cyclic(6);
  ComplexMatrix A = gabor_matrix(Z6, random_window(Z6, 2)).matrix;
  EnumerationOptions one;
  one.threads = 1;
  EnumerationOptions many;
  many.threads = 4;
  auto h1 = minor_rank_histogram(A, {2, 3}, one);
  auto h4 = minor_rank_histogram(A, {2, 3}, many);
  EXPECT_EQ(h1.counts, h4.counts);
  EXPECT_EQ(h1.total(2), binomial(36, 2) * binomial(6, 2));
  EXPECT_EQ(h1.total(3), binomial(36, 3) * binomial(6, 3));
  EXPECT_THROW(minor_rank_histogram(A, {7}), std::invalid_argument);
}

TEST(Rank, HistogramBudgetTruncates) {
  EnumerationOptions opt;
  opt.budget = 50;
  auto h = minor_rank_histogram(W(6), {3}, opt);
  EXPECT_TRUE(h.truncated);
  EXPECT_LT(h.total(3), 400u);
}

TEST(Rank, AllMinorsNonzero) {
  for (int p : {2, 3, 5, 7}) {
    ComplexMatrix M = W(p);
    for (int r = 1; r <= p; ++r) EXPECT_TRUE(all_minors_nonzero(M, r).all_full_rank) << p << "," << r;
  }
  auto r6 = all_minors_nonzero(W(6), 2);
  EXPECT_FALSE(r6.all_full_rank);
  ASSERT_TRUE(r6.rows && r6.cols);
  EXPECT_LT(numeric_rank(submatrix(W(6), *r6.rows, *r6.cols)).rank, 2);
}

TEST(Rank, ChebotarevViaGaborZeroTranslationBlock) {
  // the zero-translation block of A_{Zp,g} is conj(W) diag(conj g); with g nowhere zero its
  // minors vanish exactly when those of W do
  for (int p : {2, 3, 5, 7}) {
    auto G = FiniteAbelianGroup::cyclic(p);
    ComplexMatrix A = gabor_matrix(G, unimodular_window(G, 1)).matrix;
    ComplexMatrix block = A.topRows(p);
    for (int r = 1; r <= p; ++r) EXPECT_TRUE(all_minors_nonzero(block, r).all_full_rank);
  }
}

TEST(Rank, ZeroMinorsOfZ4GaborMatrices) {
  auto Z4 = FiniteAbelianGroup::cyclic(4);
  for (std::uint64_t seed : {1, 2, 3}) {
    ComplexMatrix A = gabor_matrix(Z4, random_window(Z4, seed)).matrix;
    EXPECT_FALSE(all_minors_nonzero(A, 2).all_full_rank);
  }
}

TEST(Rank, CompositeOrdersHaveZeroMinorsInTheMiddleRange) {
  for (int n : {4, 6, 8, 9, 10}) {
    int d0 = 2;
    while (n % d0) ++d0;
    for (int r = d0; r <= n - d0; ++r) EXPECT_FALSE(all_minors_nonzero(W(n), r).all_full_rank) << n << "," << r;
  }
}

TEST(Rank, AdjacentMinors) {
  auto Z6 = FiniteAbelianGroup::cyclic(6);
  EXPECT_TRUE(adjacent_minor_check(W(6), Z6, Adjacency::ContiguousColumns, 4).all_nonzero);
  auto Z4 = FiniteAbelianGroup::cyclic(4);
  // rows {0,1} against every column pair
  for_each_subset(4, 2, [&](const std::vector<int>& c) {
    EXPECT_EQ(numeric_rank(submatrix(W(4), {0, 1}, c)).rank, 2);
    return true;
  });
  EXPECT_TRUE(adjacent_minor_check(W(4), Z4, Adjacency::ContiguousRows, 4).all_nonzero);
  // non-contiguous sets do fail
  EXPECT_FALSE(all_minors_nonzero(W(4), 2).all_full_rank);

  ComplexMatrix A = gabor_matrix(Z4, random_window(Z4, 5)).matrix;
  EXPECT_TRUE(adjacent_minor_check(A, Z4, Adjacency::ModulationContiguousRows, 4).all_nonzero);
  EXPECT_THROW(adjacent_minor_check(W(4), FiniteAbelianGroup({2, 2}), Adjacency::ContiguousRows, 2),
               std::invalid_argument);
}

TEST(Rank, ComplementaryMinors) {
  auto p6 = complementary_minor_pairs(W(6), 2);
  EXPECT_EQ(p6.size(), 36u);
  for (auto& p : p6) EXPECT_TRUE(p.both_zero);
  auto p4 = complementary_minor_pairs(W(4), 2);
  bool found = false;
  for (auto& p : p4) {
    EXPECT_TRUE(p.both_zero);
    if (p.rows == std::vector<int>{0, 2} && p.cols == std::vector<int>{0, 2}) {
      found = true;
      EXPECT_EQ(p.comp_rows, (std::vector<int>{1, 3}));
    }
  }
  EXPECT_TRUE(found);
  EXPECT_TRUE(complementary_minor_pairs(W(5), 2).empty());
}

TEST(Rank, MaxDeficientRows) {
  EXPECT_EQ(max_deficient_rows(W(6), 2).max_rows, 3);
  auto r5 = max_deficient_rows(W(5), 2);
  EXPECT_EQ(r5.max_rows, 1);
  EXPECT_EQ(r5.exhausted_size, 2);
  auto Z5 = FiniteAbelianGroup::cyclic(5);
  ComplexMatrix A = gabor_matrix(Z5, random_window(Z5, 1)).matrix;
  EXPECT_EQ(max_deficient_rows(A, 2).max_rows, 1);
  EXPECT_THROW(max_deficient_rows(W(5), 0), std::invalid_argument);
}

TEST(Rank, MaxDeficientRowsMatchesBruteForce) {
  for (int n : {4, 6}) {
    ComplexMatrix M = W(n);
    for (int k = 1; k <= n; ++k) {
      int best = 0;
      for_each_subset(n, k, [&](const std::vector<int>& A) {
        for (int s = n; s >= 1; --s) {
          bool hit = false;
          for_each_subset(n, s, [&](const std::vector<int>& B) {
            if (numeric_rank(submatrix(M, B, A)).rank < k) {
              hit = true;
              return false;
            }
            return true;
          });
          if (hit) {
            best = std::max(best, s);
            break;
          }
        }
        return true;
      });
      EXPECT_EQ(max_deficient_rows(M, k).max_rows, best) << n << "," << k;
    }
  }
}
