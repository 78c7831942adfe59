#pragma once

#include "tfub/combinatorics.hpp"
#include "tfub/group.hpp"
#include "tfub/parallel.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tfub {

inline constexpr double kDefaultRankTol = 1e-10;
inline constexpr double kGapUncertain = 1e3;
inline constexpr double kMarginUncertain = 10.0;

struct RankReport {
  int rank = 0;
  std::vector<double> singular_values;  // descending
  double gap_ratio = std::numeric_limits<double>::infinity();
  // sigma_rank over the threshold; infinity for rank 0
  double margin = std::numeric_limits<double>::infinity();
  bool uncertain() const { return gap_ratio < kGapUncertain || margin < kMarginUncertain; }
};

/// Rank from descending singular values: #{s > tol * s_max * max(rows, cols)}.
inline RankReport rank_from_singular_values(std::vector<double> sv, Eigen::Index rows, Eigen::Index cols,
                                            double tol_rel) {
  RankReport rep;
  rep.singular_values = std::move(sv);
  const auto& s = rep.singular_values;
  if (s.empty() || s.front() == 0.0) return rep;
  double thr = tol_rel * s.front() * static_cast<double>(std::max(rows, cols));
  int r = 0;
  while (r < static_cast<int>(s.size()) && s[r] > thr) ++r;
  rep.rank = r;
  if (r < static_cast<int>(s.size()))
    rep.gap_ratio = s[r] > 0 ? s[r - 1] / s[r] : std::numeric_limits<double>::infinity();
  rep.margin = thr > 0 ? s[r - 1] / thr : std::numeric_limits<double>::infinity();
  return rep;
}

inline RankReport numeric_rank(const ComplexMatrix& M, double tol_rel = kDefaultRankTol) {
  if (M.size() == 0) throw std::invalid_argument("numeric_rank of empty matrix");
  Eigen::JacobiSVD<ComplexMatrix> svd(M);
  const auto& s = svd.singularValues();
  return rank_from_singular_values(std::vector<double>(s.data(), s.data() + s.size()), M.rows(), M.cols(),
                                   tol_rel);
}

/// Rows `rows`, columns `cols` of M. Callers holding (A, B) = (columns, rows) pass B first.
inline ComplexMatrix submatrix(const ComplexMatrix& M, const std::vector<int>& rows, const std::vector<int>& cols) {
  ComplexMatrix S(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] < 0 || rows[i] >= M.rows()) throw std::out_of_range("row index out of range");
    for (std::size_t j = 0; j < cols.size(); ++j) {
      if (cols[j] < 0 || cols[j] >= M.cols()) throw std::out_of_range("column index out of range");
      S(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = M(rows[i], cols[j]);
    }
  }
  return S;
}

struct RankDecision {
  int rank = 0;
  double gap_ratio = std::numeric_limits<double>::infinity();
  double margin = std::numeric_limits<double>::infinity();
  bool via_svd = false;
  bool uncertain() const { return gap_ratio < kGapUncertain || margin < kMarginUncertain; }
};

/// Allocation-free rank decisions for many small submatrices of one matrix.
/// Full rank is accepted without an SVD when LU with complete pivoting proves
/// sigma_min >= 1 / (|L^-1|_F |U^-1|_F) exceeds the threshold by the margin;
/// everything else goes to a Jacobi SVD, so the answer equals the SVD rule.
class RankKernel {
 public:
  explicit RankKernel(double tol_rel = kDefaultRankTol) : tol_(tol_rel) {}

  double tol() const { return tol_; }

  RankDecision decide(const ComplexMatrix& M, const int* rows, int nr, const int* cols, int nc) {
    RankDecision d;
    if (nr == 0 || nc == 0) return d;
    // keep the tall orientation: m >= p
    bool tr = nr < nc;
    int m = tr ? nc : nr;
    int p = tr ? nr : nc;
    a_.resize(m, p);
    if (!tr) {
      for (int j = 0; j < p; ++j)
        for (int i = 0; i < m; ++i) a_(i, j) = M(rows[i], cols[j]);
    } else {
      for (int j = 0; j < p; ++j)
        for (int i = 0; i < m; ++i) a_(i, j) = M(rows[j], cols[i]);
    }
    double frob2 = 0.0;
    for (int j = 0; j < p; ++j)
      for (int i = 0; i < m; ++i) frob2 += std::norm(a_(i, j));
    if (frob2 == 0.0) return d;
    double frob = std::sqrt(frob2);
    double thr = tol_ * frob * static_cast<double>(m);
    if (lu_certifies_full(m, p, frob, thr)) {
      d.rank = p;
      return d;
    }
    return svd_decide(m, p);
  }

  RankDecision decide(const ComplexMatrix& M, const std::vector<int>& rows, const std::vector<int>& cols) {
    return decide(M, rows.data(), static_cast<int>(rows.size()), cols.data(), static_cast<int>(cols.size()));
  }

  std::uint64_t svd_calls() const { return svd_calls_; }

 private:
  bool lu_certifies_full(int m, int p, double frob, double thr) {
    lu_ = a_;
    double amax = 0.0;
    for (int step = 0; step < p; ++step) {
      int pi = step, pj = step;
      double best = -1.0;
      for (int j = step; j < p; ++j)
        for (int i = step; i < m; ++i) {
          double v = std::norm(lu_(i, j));
          if (v > best) {
            best = v;
            pi = i;
            pj = j;
          }
        }
      if (best <= 0.0) return false;
      amax = std::max(amax, std::sqrt(best));
      if (pi != step) lu_.row(pi).swap(lu_.row(step));
      if (pj != step) lu_.col(pj).swap(lu_.col(step));
      Complex piv = lu_(step, step);
      Complex inv = 1.0 / piv;
      for (int i = step + 1; i < m; ++i) {
        Complex l = lu_(i, step) * inv;
        lu_(i, step) = l;
        if (l == 0.0) continue;
        for (int j = step + 1; j < p; ++j) lu_(i, j) -= l * lu_(step, j);
      }
    }
    // |U^-1|_F, back substitution column by column
    double nu = 0.0;
    inv_.resize(p, p);
    inv_.setZero();
    for (int c = 0; c < p; ++c) {
      for (int i = c; i >= 0; --i) {
        Complex s = (i == c) ? Complex(1.0) : Complex(0.0);
        for (int j = i + 1; j <= c; ++j) s -= lu_(i, j) * inv_(j, c);
        inv_(i, c) = s / lu_(i, i);
        nu += std::norm(inv_(i, c));
      }
    }
    // |L_top^-1|_F, unit lower triangular
    double nl = 0.0;
    inv_.setZero();
    for (int c = 0; c < p; ++c) {
      for (int i = c; i < p; ++i) {
        Complex s = (i == c) ? Complex(1.0) : Complex(0.0);
        for (int j = c; j < i; ++j) s -= lu_(i, j) * inv_(j, c);
        inv_(i, c) = s;
        nl += std::norm(s);
      }
    }
    double lower = 1.0 / std::sqrt(nu * nl);
    // backward error of the factorization, generous constant
    double err = 64.0 * p * std::numeric_limits<double>::epsilon() * std::max(frob, amax * p);
    return lower - err > kMarginUncertain * thr;
  }

  RankDecision svd_decide(int m, int p) {
    ++svd_calls_;
    svd_.compute(a_);
    const auto& s = svd_.singularValues();
    auto rep = rank_from_singular_values(std::vector<double>(s.data(), s.data() + s.size()), m, p, tol_);
    RankDecision d;
    d.rank = rep.rank;
    d.gap_ratio = rep.gap_ratio;
    d.margin = rep.margin;
    d.via_svd = true;
    return d;
  }

  double tol_;
  ComplexMatrix a_, lu_, inv_;
  Eigen::JacobiSVD<ComplexMatrix> svd_;
  std::uint64_t svd_calls_ = 0;
};

enum class MatrixKind { Dft, Gabor, Other };

inline std::string to_string(MatrixKind k) {
  switch (k) {
    case MatrixKind::Dft: return "dft";
    case MatrixKind::Gabor: return "gabor";
    default: return "other";
  }
}

struct RankHistogram {
  MatrixKind matrix_kind = MatrixKind::Other;
  std::string group;
  std::optional<std::uint64_t> seed;
  double tol = kDefaultRankTol;
  std::map<int, std::map<int, std::uint64_t>> counts;  // size -> rank -> count
  std::uint64_t uncertain = 0;
  double min_gap_ratio = std::numeric_limits<double>::infinity();
  double min_margin = std::numeric_limits<double>::infinity();
  bool truncated = false;

  std::uint64_t total(int size) const {
    std::uint64_t t = 0;
    auto it = counts.find(size);
    if (it != counts.end())
      for (auto& [r, c] : it->second) t += c;
    return t;
  }
};

struct EnumerationOptions {
  double tol = kDefaultRankTol;
  int threads = 0;  // 0 = default_threads()
  std::uint64_t budget = UINT64_MAX;  // maximum submatrices per call
};

namespace detail {

/// Walks (col-subset outer, row-subset inner) pairs over a flat index range.
class PairCursor {
 public:
  PairCursor(int nrows, int ncols, int rsize, int csize, std::uint64_t start)
      : nrows_(nrows), ncols_(ncols), rsize_(rsize), csize_(csize), nb_(binomial(nrows, rsize)) {
    rows_.resize(static_cast<std::size_t>(rsize));
    cols_.resize(static_cast<std::size_t>(csize));
    colex_unrank(start / nb_, csize, cols_.data());
    colex_unrank(start % nb_, rsize, rows_.data());
  }
  const std::vector<int>& rows() const { return rows_; }
  const std::vector<int>& cols() const { return cols_; }
  void advance() {
    if (next_colex(rows_.data(), rsize_, nrows_)) return;
    for (int i = 0; i < rsize_; ++i) rows_[i] = i;
    next_colex(cols_.data(), csize_, ncols_);
  }

 private:
  int nrows_, ncols_, rsize_, csize_;
  std::uint64_t nb_;
  std::vector<int> rows_, cols_;
};

inline std::uint64_t pair_count(int nrows, int ncols, int rsize, int csize) {
  std::uint64_t a = binomial(ncols, csize), b = binomial(nrows, rsize);
  if (b && a > UINT64_MAX / b) throw std::overflow_error("enumeration too large");
  return a * b;
}

}  // namespace detail

inline RankHistogram minor_rank_histogram(const ComplexMatrix& M, const std::vector<int>& sizes,
                                          const EnumerationOptions& opt = {}) {
  RankHistogram h;
  h.tol = opt.tol;
  int threads = resolve_threads(opt.threads);
  int nr = static_cast<int>(M.rows()), nc = static_cast<int>(M.cols());
  for (int r : sizes) {
    if (r < 1 || r > std::min(nr, nc)) throw std::invalid_argument("minor size out of range");
    std::uint64_t total = detail::pair_count(nr, nc, r, r);
    if (total > opt.budget) {
      total = opt.budget;
      h.truncated = true;
    }
    struct Partial {
      std::vector<std::uint64_t> by_rank;
      std::uint64_t uncertain = 0;
      double min_gap = std::numeric_limits<double>::infinity();
      double min_margin = std::numeric_limits<double>::infinity();
    };
    std::vector<Partial> parts(static_cast<std::size_t>(threads));
    for (auto& p : parts) p.by_rank.assign(static_cast<std::size_t>(r) + 1, 0);
    std::vector<RankKernel> kernels(static_cast<std::size_t>(threads), RankKernel(opt.tol));
    parallel_chunks(total, threads, [&](IndexRange range, int w) {
      auto& part = parts[static_cast<std::size_t>(w)];
      auto& kern = kernels[static_cast<std::size_t>(w)];
      detail::PairCursor cur(nr, nc, r, r, range.begin);
      for (std::uint64_t i = range.begin; i < range.end; ++i) {
        auto d = kern.decide(M, cur.rows(), cur.cols());
        ++part.by_rank[static_cast<std::size_t>(d.rank)];
        if (d.uncertain()) ++part.uncertain;
        part.min_gap = std::min(part.min_gap, d.gap_ratio);
        part.min_margin = std::min(part.min_margin, d.margin);
        cur.advance();
      }
    });
    auto& row = h.counts[r];
    for (auto& p : parts) {
      for (int k = 0; k <= r; ++k)
        if (p.by_rank[static_cast<std::size_t>(k)]) row[k] += p.by_rank[static_cast<std::size_t>(k)];
      h.uncertain += p.uncertain;
      h.min_gap_ratio = std::min(h.min_gap_ratio, p.min_gap);
      h.min_margin = std::min(h.min_margin, p.min_margin);
    }
  }
  return h;
}

struct MinorSearchResult {
  bool all_full_rank = true;
  std::optional<std::vector<int>> rows;  // first counterexample in canonical order
  std::optional<std::vector<int>> cols;
  std::uint64_t checked = 0;
  std::uint64_t uncertain = 0;
};

namespace detail {

/// First (cols outer, rows inner) pair with rank below `target`, over row subsets of size
/// rsize and column subsets of size csize.
inline MinorSearchResult find_deficient(const ComplexMatrix& M, int rsize, int csize, int target,
                                        const EnumerationOptions& opt) {
  MinorSearchResult res;
  int nr = static_cast<int>(M.rows()), nc = static_cast<int>(M.cols());
  std::uint64_t total = pair_count(nr, nc, rsize, csize);
  int threads = resolve_threads(opt.threads);
  std::vector<RankKernel> kernels(static_cast<std::size_t>(threads), RankKernel(opt.tol));
  std::vector<std::uint64_t> uncertain(static_cast<std::size_t>(threads), 0);
  std::uint64_t hit = parallel_find_first(total, threads, [&](IndexRange range, int w, auto& best) {
    auto& kern = kernels[static_cast<std::size_t>(w)];
    PairCursor cur(nr, nc, rsize, csize, range.begin);
    for (std::uint64_t i = range.begin; i < range.end; ++i) {
      if ((i & 1023) == 0 && i > best.load(std::memory_order_relaxed)) return UINT64_MAX;
      auto d = kern.decide(M, cur.rows(), cur.cols());
      if (d.uncertain()) ++uncertain[static_cast<std::size_t>(w)];
      if (d.rank < target) return i;
      cur.advance();
    }
    return UINT64_MAX;
  });
  for (auto u : uncertain) res.uncertain += u;
  if (hit == UINT64_MAX) {
    res.checked = total;
    return res;
  }
  res.all_full_rank = false;
  res.checked = hit + 1;
  std::uint64_t nb = binomial(nr, rsize);
  res.cols = colex_unrank(hit / nb, csize);
  res.rows = colex_unrank(hit % nb, rsize);
  return res;
}

}  // namespace detail

/// True iff every r x r submatrix has certified rank r.
inline MinorSearchResult all_minors_nonzero(const ComplexMatrix& M, int r, const EnumerationOptions& opt = {}) {
  if (r < 1 || r > std::min(M.rows(), M.cols())) throw std::invalid_argument("minor size out of range");
  return detail::find_deficient(M, r, r, r, opt);
}

/// True iff every set of `size` rows (with all columns) has full column rank.
inline MinorSearchResult all_row_subsets_full_rank(const ComplexMatrix& M, int size,
                                                   const EnumerationOptions& opt = {}) {
  if (size < 1 || size > M.rows()) throw std::invalid_argument("row subset size out of range");
  int c = static_cast<int>(M.cols());
  return detail::find_deficient(M, size, c, std::min(size, c), opt);
}

enum class Adjacency {
  ContiguousColumns,          // cyclically contiguous column sets, any rows
  ContiguousRows,             // cyclically contiguous row sets, any columns
  ModulationContiguousRows,   // Gabor rows: per translation, a cyclic arc of modulations
  TranslationContiguousRows,  // Gabor rows: per modulation, a cyclic arc of translations
};

struct AdjacentMinorResult {
  bool all_nonzero = true;
  std::optional<std::vector<int>> rows;
  std::optional<std::vector<int>> cols;
  std::uint64_t checked = 0;
};

namespace detail {

inline std::vector<std::vector<int>> cyclic_arcs(int n, int len) {
  std::vector<std::vector<int>> out;
  if (len < 1 || len > n) return out;
  int starts = (len == n) ? 1 : n;
  for (int s = 0; s < starts; ++s) {
    std::vector<int> a;
    for (int t = 0; t < len; ++t) a.push_back((s + t) % n);
    std::sort(a.begin(), a.end());
    out.push_back(a);
  }
  return out;
}

/// Row sets of size r in a Gabor matrix (n*n rows) that, per block value, are cyclic arcs in
/// the other coordinate. `outer_is_translation` selects which coordinate forms the blocks.
inline void gabor_arc_sets(int n, int r, bool by_translation, std::vector<std::vector<int>>& out) {
  std::vector<int> lens(static_cast<std::size_t>(n), 0);
  std::function<void(int, int)> rec;
  std::vector<std::vector<int>> chosen(static_cast<std::size_t>(n));
  rec = [&](int block, int left) {
    if (block == n) {
      if (left != 0) return;
      std::vector<int> rows;
      for (int b = 0; b < n; ++b)
        for (int v : chosen[static_cast<std::size_t>(b)])
          rows.push_back(by_translation ? b * n + v : v * n + b);
      std::sort(rows.begin(), rows.end());
      out.push_back(rows);
      return;
    }
    chosen[static_cast<std::size_t>(block)].clear();
    rec(block + 1, left);
    for (int len = 1; len <= std::min(left, n); ++len)
      for (auto& arc : cyclic_arcs(n, len)) {
        chosen[static_cast<std::size_t>(block)] = arc;
        rec(block + 1, left - len);
      }
    chosen[static_cast<std::size_t>(block)].clear();
  };
  rec(0, r);
}

}  // namespace detail

/// Checks all minors of size 1..max_size whose constrained side follows the adjacency rule.
/// For the Gabor variants n is the group order and M must have n*n rows.
inline AdjacentMinorResult adjacent_minor_check(const ComplexMatrix& M, const FiniteAbelianGroup& G, Adjacency adj,
                                                int max_size, double tol = kDefaultRankTol) {
  if (!G.is_cyclic()) throw std::invalid_argument("adjacent minors need a cyclic group");
  AdjacentMinorResult res;
  RankKernel kern(tol);
  int n = G.order();
  int nr = static_cast<int>(M.rows()), nc = static_cast<int>(M.cols());
  bool gabor = adj == Adjacency::ModulationContiguousRows || adj == Adjacency::TranslationContiguousRows;
  if (gabor && nr != n * n) throw std::invalid_argument("expected a Gabor matrix");
  for (int r = 1; r <= max_size; ++r) {
    std::vector<std::vector<int>> constrained;
    if (adj == Adjacency::ContiguousColumns) constrained = detail::cyclic_arcs(nc, r);
    else if (adj == Adjacency::ContiguousRows) constrained = detail::cyclic_arcs(nr, r);
    else detail::gabor_arc_sets(n, r, adj == Adjacency::ModulationContiguousRows, constrained);
    bool constrain_rows = adj != Adjacency::ContiguousColumns;
    int free_n = constrain_rows ? nc : nr;
    if (r > free_n) break;
    for (auto& c : constrained) {
      bool stop = false;
      for_each_subset(free_n, r, [&](const std::vector<int>& f) {
        ++res.checked;
        const auto& rows = constrain_rows ? c : f;
        const auto& cols = constrain_rows ? f : c;
        if (kern.decide(M, rows, cols).rank < r) {
          res.all_nonzero = false;
          res.rows = rows;
          res.cols = cols;
          stop = true;
          return false;
        }
        return true;
      });
      if (stop) return res;
    }
  }
  return res;
}

struct ComplementaryPair {
  std::vector<int> rows, cols;
  std::vector<int> comp_rows, comp_cols;
  bool both_zero = false;
};

/// For each zero r x r minor (up to sample_budget of them), evaluates the complementary minor.
inline std::vector<ComplementaryPair> complementary_minor_pairs(const ComplexMatrix& W, int r,
                                                                std::uint64_t sample_budget = UINT64_MAX,
                                                                double tol = kDefaultRankTol) {
  if (W.rows() != W.cols()) throw std::invalid_argument("square matrix required");
  int n = static_cast<int>(W.rows());
  if (r < 1 || r >= n) throw std::invalid_argument("minor size out of range");
  std::vector<ComplementaryPair> out;
  RankKernel kern(tol);
  for_each_subset(n, r, [&](const std::vector<int>& cols) {
    for_each_subset(n, r, [&](const std::vector<int>& rows) {
      if (kern.decide(W, rows, cols).rank == r) return true;
      ComplementaryPair p{rows, cols, complement(rows, n), complement(cols, n), false};
      p.both_zero = kern.decide(W, p.comp_rows, p.comp_cols).rank < n - r;
      out.push_back(std::move(p));
      return out.size() < sample_budget;
    });
    return out.size() < sample_budget;
  });
  return out;
}

struct DeficiencyResult {
  int max_rows = 0;
  std::optional<std::vector<int>> witness_cols;  // A, |A| = k
  std::optional<std::vector<int>> witness_rows;  // B, |B| = max_rows
  int exhausted_size = -1;                       // size at which no deficient pair exists
  std::uint64_t exhausted_checked = 0;
  std::uint64_t total_checked = 0;
  std::uint64_t uncertain = 0;
};

struct SubsetPair {
  std::vector<int> cols;
  std::vector<int> rows;
};

/// max{|B| : exists A, |A| = k, rank M_{B,A} < rank M_{:,A}}.
/// Deficiency is inherited by subsets of B, so the search climbs from the best verified hint
/// and stops at the first size that is exhausted without a hit. A level larger than
/// opt.budget pairs stops the climb with exhausted_size = -1 and max_rows a lower bound.
inline DeficiencyResult max_deficient_rows(const ComplexMatrix& M, int k, const std::vector<SubsetPair>& hints = {},
                                           const EnumerationOptions& opt = {}) {
  int nr = static_cast<int>(M.rows()), nc = static_cast<int>(M.cols());
  if (k < 1 || k > nc) throw std::invalid_argument("k out of range");
  DeficiencyResult res;
  RankKernel kern(opt.tol);
  auto deficient = [&](const std::vector<int>& rows, const std::vector<int>& cols) {
    std::vector<int> all = first_subset(nr);
    int full = kern.decide(M, all, cols).rank;
    return kern.decide(M, rows, cols).rank < full;
  };
  int lb = -1;
  for (const auto& h : hints) {
    if (static_cast<int>(h.cols.size()) != k) continue;
    if (static_cast<int>(h.rows.size()) > lb && deficient(h.rows, h.cols)) {
      lb = static_cast<int>(h.rows.size());
      res.witness_cols = h.cols;
      res.witness_rows = h.rows;
    }
  }
  // columns with rank M_{:,A} < k are handled by comparing with rank M_{:,A}; the common case
  // (all k-column sets independent) reduces to rank < k.
  bool independent = true;
  {
    auto cols = first_subset(k);
    auto all = first_subset(nr);
    do {
      if (kern.decide(M, all, cols).rank < k) {
        independent = false;
        break;
      }
    } while (next_colex(cols, nc));
  }
  for (int s = std::max(lb + 1, 0); s <= nr; ++s) {
    if (detail::pair_count(nr, nc, s, k) > opt.budget) break;  // undecided: exhausted_size stays -1
    if (independent) {
      auto found = detail::find_deficient(M, s, k, k, opt);
      res.total_checked += found.checked;
      res.uncertain += found.uncertain;
      if (found.all_full_rank) {
        res.exhausted_size = s;
        res.exhausted_checked = found.checked;
        break;
      }
      res.witness_cols = found.cols;
      res.witness_rows = found.rows;
      lb = s;
    } else {
      bool hit = false;
      std::uint64_t checked = 0;
      for_each_subset(nc, k, [&](const std::vector<int>& cols) {
        for_each_subset(nr, s, [&](const std::vector<int>& rows) {
          ++checked;
          if (deficient(rows, cols)) {
            hit = true;
            res.witness_cols = cols;
            res.witness_rows = rows;
            return false;
          }
          return true;
        });
        return !hit;
      });
      res.total_checked += checked;
      if (!hit) {
        res.exhausted_size = s;
        res.exhausted_checked = checked;
        break;
      }
      lb = s;
    }
  }
  res.max_rows = std::max(lb, 0);
  return res;
}

}  // namespace tfub
