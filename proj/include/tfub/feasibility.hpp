#pragma once

#include "tfub/bounds.hpp"
#include "tfub/gabor.hpp"
#include "tfub/rank.hpp"

#include <Eigen/Eigenvalues>

#include <array>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace tfub {

enum class CellStatus { FeasibleWitnessed, InfeasibleProved, InfeasibleExhausted, Unknown };

inline std::string to_string(CellStatus s) {
  switch (s) {
    case CellStatus::FeasibleWitnessed: return "FeasibleWitnessed";
    case CellStatus::InfeasibleProved: return "InfeasibleProved";
    case CellStatus::InfeasibleExhausted: return "InfeasibleExhausted";
    default: return "Unknown";
  }
}

inline char status_code(CellStatus s) {
  switch (s) {
    case CellStatus::FeasibleWitnessed: return 'F';
    case CellStatus::InfeasibleProved: return 'I';
    case CellStatus::InfeasibleExhausted: return 'X';
    default: return 'U';
  }
}

inline CellStatus cell_status_from_string(const std::string& s) {
  for (auto c : {CellStatus::FeasibleWitnessed, CellStatus::InfeasibleProved, CellStatus::InfeasibleExhausted,
                 CellStatus::Unknown})
    if (to_string(c) == s) return c;
  throw std::invalid_argument("unknown cell status: " + s);
}

inline bool is_feasible(CellStatus s) { return s == CellStatus::FeasibleWitnessed; }
inline bool is_infeasible(CellStatus s) {
  return s == CellStatus::InfeasibleProved || s == CellStatus::InfeasibleExhausted;
}

struct SearchOptions {
  double tol = kDefaultRankTol;
  int threads = 0;
  std::uint64_t budget = 50'000'000;  // (A, B) pairs per search
  std::uint64_t seed = 1;
};

struct PairSearchResult {
  CellStatus status = CellStatus::Unknown;  // FeasibleWitnessed here means a valid (A, B) was found
  std::optional<std::vector<int>> cols;     // A
  std::optional<std::vector<int>> rows;     // B
  std::uint64_t checked = 0;
  std::uint64_t total = 0;
};

namespace detail {

/// rank M_{B, A\{a}} = rank M_{B,A} = rank M_{B+{y}, A} - 1 < |A| for all a in A, y outside B.
inline bool witness_conditions_hold(RankKernel& kern, const ComplexMatrix& M, const std::vector<int>& B,
                         const std::vector<int>& A, std::vector<int>& scratch_a, std::vector<int>& scratch_b) {
  int k = static_cast<int>(A.size());
  int r = kern.decide(M, B, A).rank;
  if (r >= k) return false;
  for (int drop = 0; drop < k; ++drop) {
    scratch_a.clear();
    for (int j = 0; j < k; ++j)
      if (j != drop) scratch_a.push_back(A[static_cast<std::size_t>(j)]);
    if (kern.decide(M, B, scratch_a).rank != r) return false;
  }
  int m = static_cast<int>(M.rows());
  std::size_t bi = 0;
  for (int y = 0; y < m; ++y) {
    if (bi < B.size() && B[bi] == y) {
      ++bi;
      continue;
    }
    scratch_b.assign(B.begin(), B.end());
    scratch_b.insert(std::upper_bound(scratch_b.begin(), scratch_b.end(), y), y);
    if (kern.decide(M, scratch_b, A).rank != r + 1) return false;
  }
  return true;
}

}  // namespace detail

/// Searches A (|A| = k, outer) and B (|B| = rows - l, inner) for the rank condition that makes
/// (k, l) = (|supp f|, |supp M f|) achievable.
inline PairSearchResult pair_feasible(const ComplexMatrix& M, int k, int l, const SearchOptions& opt = {}) {
  int m = static_cast<int>(M.rows()), nc = static_cast<int>(M.cols());
  if (k < 1 || k > nc || l < 1 || l > m) throw std::invalid_argument("(k, l) out of range");
  PairSearchResult res;
  int bsize = m - l;
  res.total = detail::pair_count(m, nc, bsize, k);
  std::uint64_t limit = std::min(res.total, opt.budget);
  int threads = resolve_threads(opt.threads);
  std::vector<RankKernel> kernels(static_cast<std::size_t>(threads), RankKernel(opt.tol));
  std::uint64_t hit = parallel_find_first(limit, threads, [&](IndexRange range, int w, auto& best) {
    auto& kern = kernels[static_cast<std::size_t>(w)];
    std::vector<int> sa, sb;
    detail::PairCursor cur(m, nc, bsize, k, range.begin);
    for (std::uint64_t i = range.begin; i < range.end; ++i) {
      if ((i & 1023) == 0 && i > best.load(std::memory_order_relaxed)) return UINT64_MAX;
      if (detail::witness_conditions_hold(kern, M, cur.rows(), cur.cols(), sa, sb)) return i;
      cur.advance();
    }
    return UINT64_MAX;
  });
  if (hit == UINT64_MAX) {
    res.checked = limit;
    res.status = limit == res.total ? CellStatus::InfeasibleExhausted : CellStatus::Unknown;
    return res;
  }
  res.checked = hit + 1;
  res.status = CellStatus::FeasibleWitnessed;
  std::uint64_t nb = binomial(m, bsize);
  res.cols = colex_unrank(hit / nb, k);
  res.rows = colex_unrank(hit % nb, bsize);
  return res;
}

enum class WitnessMethod { GeometricWeights, GenericCombination };

inline std::string to_string(WitnessMethod w) {
  return w == WitnessMethod::GeometricWeights ? "geometric_weights" : "generic_combination";
}

struct WitnessPair {
  ComplexVector f;  // length cols(M), supported on A
  int k = 0;        // achieved |supp f|
  int l = 0;        // achieved |supp M f|
  WitnessMethod method = WitnessMethod::GeometricWeights;
  double N = 0.0;   // weight base when the geometric construction was used
};

namespace detail {

inline std::vector<int> support_of(const ComplexVector& v, double zero_tol = kDefaultZeroTol) {
  std::vector<int> s;
  if (v.size() == 0) return s;
  double t = zero_tol * std::max(1.0, v.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (std::abs(v(i)) > t) s.push_back(static_cast<int>(i));
  return s;
}

inline double min_nonzero_modulus(const ComplexVector& v) {
  double t = kDefaultZeroTol * std::max(1.0, v.cwiseAbs().maxCoeff());
  double m = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (std::abs(v(i)) > t) m = std::min(m, std::abs(v(i)));
  return m;
}

}  // namespace detail

/// Builds f with supp f = A and supp M f = complement of B, following the constructive proof:
/// one kernel element per a in A and per y outside B, normalized and combined with weights N^{2r}.
/// When that dynamic range is too wide for double precision a seeded generic kernel combination
/// is used instead. Both routes are verified before returning.
inline WitnessPair construct_witness(const ComplexMatrix& M, const std::vector<int>& A, const std::vector<int>& B,
                                     std::uint64_t seed = 1, double tol = kDefaultRankTol) {
  int m = static_cast<int>(M.rows()), nc = static_cast<int>(M.cols());
  int k = static_cast<int>(A.size());
  if (k == 0) throw std::invalid_argument("empty column set");
  std::vector<int> target_out = complement(B, m);
  // kernel basis of M_{B,A}, as k x d
  ComplexMatrix K;
  if (B.empty()) {
    K = ComplexMatrix::Identity(k, k);
  } else {
    ComplexMatrix S = submatrix(M, B, A);
    Eigen::JacobiSVD<ComplexMatrix> svd(S, Eigen::ComputeFullV);
    auto rep = rank_from_singular_values(
        std::vector<double>(svd.singularValues().data(), svd.singularValues().data() + svd.singularValues().size()),
        S.rows(), S.cols(), tol);
    int d = k - rep.rank;
    if (d <= 0) throw std::invalid_argument("rank condition violated: M_{B,A} has full column rank");
    K = svd.matrixV().rightCols(d);
  }
  ComplexMatrix MA(m, k);
  for (int j = 0; j < k; ++j) MA.col(j) = M.col(A[static_cast<std::size_t>(j)]);
  ComplexMatrix image = MA * K;  // m x d

  auto embed = [&](const ComplexVector& c) {
    ComplexVector f = ComplexVector::Zero(nc);
    for (int j = 0; j < k; ++j) f(A[static_cast<std::size_t>(j)]) = c(j);
    return f;
  };
  auto verify = [&](const ComplexVector& c, WitnessPair& w) {
    ComplexVector f = embed(c);
    ComplexVector g = M * f;
    auto sf = detail::support_of(f);
    auto sg = detail::support_of(g);
    if (sf != A || sg != target_out) return false;
    w.f = f / f.cwiseAbs().maxCoeff();
    w.k = static_cast<int>(sf.size());
    w.l = static_cast<int>(sg.size());
    return true;
  };

  // geometric route
  std::vector<ComplexVector> hs;
  auto add_unique = [&](Eigen::Index col) {
    ComplexVector h = K.col(col);
    for (auto& e : hs)
      if ((e - h).norm() <= 1e-12 * h.norm()) return;
    hs.push_back(h);
  };
  for (int j = 0; j < k; ++j) {
    Eigen::Index best;
    K.row(j).cwiseAbs().maxCoeff(&best);
    if (std::abs(K(j, best)) <= 1e-9) throw std::invalid_argument("rank condition violated at column " + std::to_string(A[j]));
    add_unique(best);
  }
  for (int y : target_out) {
    Eigen::Index best;
    image.row(y).cwiseAbs().maxCoeff(&best);
    if (std::abs(image(y, best)) <= 1e-9 * std::max(1.0, image.cwiseAbs().maxCoeff()))
      throw std::invalid_argument("rank condition violated at row " + std::to_string(y));
    add_unique(best);
  }
  double need = 1.0;
  std::vector<ComplexVector> normalized;
  for (auto& h : hs) {
    ComplexVector hf = embed(h);
    double s = detail::min_nonzero_modulus(hf);
    ComplexVector hn = h / s;
    ComplexVector img = MA * hn;
    need = std::max({need, hn.cwiseAbs().maxCoeff(), img.cwiseAbs().maxCoeff()});
    double mi = detail::min_nonzero_modulus(img);
    if (std::isfinite(mi)) need = std::max(need, 1.0 / mi);
    normalized.push_back(hn);
  }
  double N = 10.0;
  while (N - 1.0 < need) N *= 10.0;
  int R = static_cast<int>(normalized.size());
  WitnessPair w;
  if (std::pow(N, 2.0 * R - 1.0) <= 1e7) {
    ComplexVector c = ComplexVector::Zero(k);
    double wgt = 1.0;
    for (auto& h : normalized) {
      c += wgt * h;
      wgt *= N * N;
    }
    if (verify(c, w)) {
      w.method = WitnessMethod::GeometricWeights;
      w.N = N;
      return w;
    }
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  for (int attempt = 0; attempt < 64; ++attempt) {
    ComplexVector coef(K.cols());
    for (Eigen::Index i = 0; i < coef.size(); ++i) coef(i) = Complex(nd(rng), nd(rng));
    if (verify(K * coef, w)) {
      w.method = WitnessMethod::GenericCombination;
      return w;
    }
  }
  throw std::runtime_error("witness verification failed for the given (A, B)");
}

struct Cell {
  std::vector<int> key;  // (k, l) or (kf, kg, l)
  CellStatus status = CellStatus::Unknown;
  std::string note;
  std::uint64_t checked = 0;
  std::vector<ComplexVector> witness;  // f, or (f, g) for triple maps
};

struct FeasibilityMap {
  std::string transform;  // fourier | stft | stft-triple
  std::string group;
  std::vector<std::string> axes;
  std::vector<std::pair<int, int>> ranges;  // inclusive, per axis
  std::optional<std::uint64_t> seed;
  std::optional<ComplexVector> window;  // stft pair maps
  std::map<std::vector<int>, Cell> cells;

  const Cell& at(const std::vector<int>& key) const {
    auto it = cells.find(key);
    if (it == cells.end()) throw std::out_of_range("no such cell");
    return it->second;
  }
  CellStatus status(const std::vector<int>& key) const { return at(key).status; }
};

/// Recomputes the support counts of a stored witness.
inline bool verify_cell(const FeasibilityMap& map, const Cell& c) {
  if (c.status != CellStatus::FeasibleWitnessed) return true;
  auto G = FiniteAbelianGroup::parse(map.group);
  if (map.transform == "fourier") {
    if (c.witness.size() != 1) return false;
    SignalVector f(G, c.witness[0]);
    return f.support_size() == c.key[0] && fourier(f).support_size() == c.key[1];
  }
  if (map.transform == "stft") {
    if (c.witness.size() != 1 || !map.window) return false;
    SignalVector f(G, c.witness[0]), g(G, *map.window);
    return f.support_size() == c.key[0] && support_size(stft(f, g)) == c.key[1];
  }
  if (map.transform == "stft-triple") {
    if (c.witness.size() != 2) return false;
    SignalVector f(G, c.witness[0]), g(G, c.witness[1]);
    return f.support_size() == c.key[0] && g.support_size() == c.key[1] && support_size(stft(f, g)) == c.key[2];
  }
  return false;
}

struct MapOptions {
  SearchOptions search;
  int max_order = 16;
  bool override_guard = false;
};

namespace detail {

inline void map_guard(int n, int limit, bool override_guard) { guard(n, limit, override_guard); }

inline std::string fourier_note(int n, int k, int l) {
  if (k + l >= n + 1) return "sum bound sharpness";
  if (n % k == 0 && k * l == n) return "subgroup indicator";
  return "exhaustive search";
}

}  // namespace detail

/// (|supp f|, |supp fhat|) for all k, l in 1..|G|.
inline FeasibilityMap fourier_pair_map(const FiniteAbelianGroup& G, const MapOptions& opt = {}) {
  int n = G.order();
  detail::map_guard(n, opt.max_order, opt.override_guard);
  FeasibilityMap map;
  map.transform = "fourier";
  map.group = G.spec();
  map.axes = {"k", "l"};
  map.ranges = {{1, n}, {1, n}};
  ComplexMatrix F = fourier_matrix(G);
  // lower triangle (k >= l) searched; the mirror cell follows by applying the transform
  for (int k = 1; k <= n; ++k)
    for (int l = 1; l <= k; ++l) {
      Cell c{{k, l}, CellStatus::Unknown, "", 0, {}};
      if (static_cast<long long>(k) * l < n) {
        c.status = CellStatus::InfeasibleProved;
        c.note = "product bound";
      } else {
        auto r = pair_feasible(F, k, l, opt.search);
        c.checked = r.checked;
        c.status = r.status;
        if (r.status == CellStatus::FeasibleWitnessed) {
          auto w = construct_witness(F, *r.cols, *r.rows, opt.search.seed, opt.search.tol);
          c.witness = {w.f};
          c.note = detail::fourier_note(n, k, l) + "; " + to_string(w.method);
        } else if (r.status == CellStatus::InfeasibleExhausted) {
          c.note = "exhaustive search over " + std::to_string(r.total) + " (A,B) pairs";
        } else {
          c.note = "budget exhausted after " + std::to_string(r.checked) + " of " + std::to_string(r.total);
        }
      }
      map.cells[{k, l}] = c;
    }
  for (int k = 1; k <= n; ++k)
    for (int l = k + 1; l <= n; ++l) {
      const Cell& src = map.cells.at({l, k});
      Cell c{{k, l}, src.status, src.note, src.checked, {}};
      if (src.status == CellStatus::FeasibleWitnessed) {
        SignalVector f(G, src.witness[0]);
        ComplexVector fh = fourier(f).values();
        c.witness = {fh / fh.cwiseAbs().maxCoeff()};
        c.note = "transform of the (" + std::to_string(l) + "," + std::to_string(k) + ") witness";
      } else if (src.status != CellStatus::Unknown) {
        if (src.status == CellStatus::InfeasibleProved) c.note = src.note;
        else c.note = "mirror of (" + std::to_string(l) + "," + std::to_string(k) + "): " + src.note;
      }
      map.cells[{k, l}] = c;
    }
  return map;
}

struct StftMapOptions {
  SearchOptions search;
  int max_order = 8;
  bool override_guard = false;
  bool certify_minors = true;   // try the all-minors-nonzero shortcut first
  bool exact_phi = true;        // exclude l < phi(k) by exhaustive deficiency search
  std::uint64_t phi_budget = 20'000'000;
};

/// (|supp f|, |supp V_g f|) for a fixed window.
inline FeasibilityMap stft_pair_map(const FiniteAbelianGroup& G, const SignalVector& g, const StftMapOptions& opt = {}) {
  int n = G.order();
  detail::map_guard(n, opt.max_order, opt.override_guard);
  FeasibilityMap map;
  map.transform = "stft";
  map.group = G.spec();
  map.axes = {"k", "l"};
  map.ranges = {{1, n}, {1, n * n}};
  map.window = g.values();
  ComplexMatrix A = gabor_matrix(G, g).matrix;
  int m = n * n;
  EnumerationOptions eo{opt.search.tol, opt.search.threads, UINT64_MAX};

  bool all_nonzero = false;
  std::uint64_t cert_checked = 0;
  if (opt.certify_minors) {
    std::uint64_t cost = 0;
    for (int r = 1; r <= n; ++r) cost += detail::pair_count(m, n, r, r);
    if (cost <= opt.search.budget) {
      all_nonzero = true;
      for (int r = 1; r <= n && all_nonzero; ++r) {
        auto res = all_minors_nonzero(A, r, eo);
        cert_checked += res.checked;
        all_nonzero = res.all_full_rank;
      }
    }
  }
  std::vector<int> phi(static_cast<std::size_t>(n) + 1, -1);
  std::vector<std::uint64_t> phi_checked(static_cast<std::size_t>(n) + 1, 0);
  if (!all_nonzero && opt.exact_phi) {
    EnumerationOptions capped = eo;
    capped.budget = opt.phi_budget;
    for (int k = 1; k <= n; ++k) {
      auto d = max_deficient_rows(A, k, {}, capped);
      if (d.exhausted_size < 0) continue;
      phi[static_cast<std::size_t>(k)] = m - d.max_rows;
      phi_checked[static_cast<std::size_t>(k)] = d.exhausted_checked;
    }
  }
  for (int k = 1; k <= n; ++k)
    for (int l = 1; l <= m; ++l) {
      Cell c{{k, l}, CellStatus::Unknown, "", 0, {}};
      if (l < n) {
        c.status = CellStatus::InfeasibleProved;
        c.note = "stft support at least |G|";
      } else if (all_nonzero && k + l <= m) {
        c.status = CellStatus::InfeasibleProved;
        c.note = "all minors nonzero (" + std::to_string(cert_checked) + " checked)";
        c.checked = cert_checked;
      } else if (!all_nonzero && phi[static_cast<std::size_t>(k)] > l) {
        c.status = CellStatus::InfeasibleExhausted;
        c.note = "below exact phi(" + std::to_string(k) + ")=" + std::to_string(phi[static_cast<std::size_t>(k)]);
        c.checked = phi_checked[static_cast<std::size_t>(k)];
      } else {
        auto r = pair_feasible(A, k, l, opt.search);
        c.checked = r.checked;
        c.status = r.status;
        if (r.status == CellStatus::FeasibleWitnessed) {
          auto w = construct_witness(A, *r.cols, *r.rows, opt.search.seed, opt.search.tol);
          c.witness = {w.f};
          c.note = to_string(w.method);
        } else if (r.status == CellStatus::InfeasibleExhausted) {
          c.note = "exhaustive search over " + std::to_string(r.total) + " (A,B) pairs";
        } else {
          c.note = "budget exhausted after " + std::to_string(r.checked) + " of " + std::to_string(r.total);
        }
      }
      map.cells[{k, l}] = c;
    }
  return map;
}

/// Solutions of the Z3 system where f and g have full support and some STFT row vanishes twice.
struct Z3OracleResult {
  std::set<int> achieved;  // |supp V_g f| over all solutions with at least two extra zeros
  bool complete = true;    // false if some subsystem was not zero-dimensional
  int solutions = 0;
};

namespace detail {

/// Polynomial in b with coefficients depending on a, as coefficient callbacks.
struct QuadInB {
  std::array<Complex, 3> c;  // c0 + c1 b + c2 b^2
};

// Row 1 zero at w: a + a^2 b w + b^2 w^2; row 2 zero at w: b + a^2 w + a b^2 w^2
inline QuadInB z3_row_poly(int row, Complex a, Complex w) {
  if (row == 1) return {{a, a * a * w, w * w}};
  return {{a * a * w, Complex(1.0), a * w * w}};
}

inline Complex sylvester2(const QuadInB& p, const QuadInB& q) {
  Eigen::Matrix4cd S = Eigen::Matrix4cd::Zero();
  // rows: p*b, p, q*b, q acting on (b^3, b^2, b, 1)
  S(0, 0) = p.c[2]; S(0, 1) = p.c[1]; S(0, 2) = p.c[0];
  S(1, 1) = p.c[2]; S(1, 2) = p.c[1]; S(1, 3) = p.c[0];
  S(2, 0) = q.c[2]; S(2, 1) = q.c[1]; S(2, 2) = q.c[0];
  S(3, 1) = q.c[2]; S(3, 2) = q.c[1]; S(3, 3) = q.c[0];
  return S.determinant();
}

inline std::vector<Complex> poly_roots(std::vector<Complex> coef) {
  // coef[i] multiplies a^i; strip negligible leading terms
  double scale = 0.0;
  for (auto& c : coef) scale = std::max(scale, std::abs(c));
  while (!coef.empty() && std::abs(coef.back()) <= 1e-10 * scale) coef.pop_back();
  // a = 0 is never wanted; dividing it out keeps a multiple zero root from splitting into tiny spurious ones
  while (coef.size() > 1 && std::abs(coef.front()) <= 1e-10 * scale) coef.erase(coef.begin());
  int deg = static_cast<int>(coef.size()) - 1;
  if (deg < 1) return {};
  Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(deg, deg);
  for (int i = 1; i < deg; ++i) C(i, i - 1) = 1.0;
  for (int i = 0; i < deg; ++i) C(i, deg - 1) = -coef[static_cast<std::size_t>(i)] / coef.back();
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, false);
  auto ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

inline std::vector<Complex> quad_roots(const QuadInB& p) {
  if (std::abs(p.c[2]) < 1e-14) {
    if (std::abs(p.c[1]) < 1e-14) return {};
    return {-p.c[0] / p.c[1]};
  }
  Complex d = std::sqrt(p.c[1] * p.c[1] - 4.0 * p.c[2] * p.c[0]);
  return {(-p.c[1] + d) / (2.0 * p.c[2]), (-p.c[1] - d) / (2.0 * p.c[2])};
}

inline Complex eval_quad(const QuadInB& p, Complex b) { return p.c[0] + b * (p.c[1] + b * p.c[2]); }

}  // namespace detail

/// Exhausts every placement of two zeros in STFT rows 1 and 2 for f = (1,a,b), g = 1/conj(f),
/// the normal form of full-support pairs whose row 0 vanishes twice.
inline Z3OracleResult z3_low_support_oracle() {
  Z3OracleResult res;
  auto G = FiniteAbelianGroup::cyclic(3);
  std::array<Complex, 3> ws{Complex(1.0), std::conj(unit_root(1, 3)), std::conj(unit_root(2, 3))};
  struct Zero {
    int row;
    int w;
  };
  std::vector<Zero> zeros;
  for (int row = 1; row <= 2; ++row)
    for (int w = 0; w < 3; ++w) zeros.push_back({row, w});
  const int S = 32;  // resultant degree is at most 8 in a
  for (std::size_t i = 0; i < zeros.size(); ++i)
    for (std::size_t j = i + 1; j < zeros.size(); ++j) {
      auto zi = zeros[i], zj = zeros[j];
      std::vector<Complex> samples(S), coef(S);
      for (int s = 0; s < S; ++s) {
        Complex a = unit_root(s, S);
        samples[static_cast<std::size_t>(s)] = detail::sylvester2(
            detail::z3_row_poly(zi.row, a, ws[static_cast<std::size_t>(zi.w)]),
            detail::z3_row_poly(zj.row, a, ws[static_cast<std::size_t>(zj.w)]));
      }
      double mx = 0.0;
      for (int d = 0; d < S; ++d) {
        Complex acc = 0.0;
        for (int s = 0; s < S; ++s) acc += samples[static_cast<std::size_t>(s)] * std::conj(unit_root(static_cast<long long>(d) * s, S));
        coef[static_cast<std::size_t>(d)] = acc / static_cast<double>(S);
        mx = std::max(mx, std::abs(coef[static_cast<std::size_t>(d)]));
      }
      if (mx < 1e-12) {
        res.complete = false;
        continue;
      }
      for (Complex a : detail::poly_roots(coef)) {
        if (std::abs(a) < 1e-8) continue;
        auto p = detail::z3_row_poly(zi.row, a, ws[static_cast<std::size_t>(zi.w)]);
        auto q = detail::z3_row_poly(zj.row, a, ws[static_cast<std::size_t>(zj.w)]);
        for (Complex b : detail::quad_roots(p)) {
          if (std::abs(b) < 1e-8) continue;
          if (std::abs(detail::eval_quad(q, b)) > 1e-7 * std::max(1.0, std::abs(b) * std::abs(b))) continue;
          ComplexVector fv(3), gv(3);
          fv << 1.0, a, b;
          for (int t = 0; t < 3; ++t) gv(t) = 1.0 / std::conj(fv(t));
          SignalVector f(G, fv), g(G, gv);
          res.achieved.insert(support_size(stft(f, g), 1e-7));
          ++res.solutions;
        }
      }
    }
  return res;
}

struct TripleMapOptions {
  int trials = 10000;  // random (f, g) per (kf, kg)
  std::uint64_t seed = 1;
  int max_order = 5;
  bool override_guard = false;
};

namespace detail {

inline std::vector<Complex> triple_alphabet() {
  Complex w = unit_root(1, 3);
  return {1.0, -1.0, 2.0, -2.0, 0.5, -0.5, 3.0, -3.0, 4.0, -4.0, 5.0, -5.0, 8.0, 10.0,
          Complex(0, 1), Complex(0, -1), w, w * w, unit_root(1, 5), unit_root(2, 5)};
}

}  // namespace detail

/// (|supp f|, |supp g|, |supp V_g f|) over all windows.
inline FeasibilityMap stft_triple_map(const FiniteAbelianGroup& G, const TripleMapOptions& opt = {}) {
  int n = G.order();
  detail::map_guard(n, opt.max_order, opt.override_guard);
  FeasibilityMap map;
  map.transform = "stft-triple";
  map.group = G.spec();
  map.axes = {"kf", "kg", "l"};
  map.ranges = {{1, n}, {1, n}, {1, n * n}};
  map.seed = opt.seed;
  auto alphabet = detail::triple_alphabet();
  bool prime = is_prime(n);
  std::optional<Z3OracleResult> z3;
  if (n == 3) z3 = z3_low_support_oracle();
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> nd;
  auto random_support = [&](int k) {
    std::vector<int> idx(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(static_cast<std::size_t>(k));
    std::sort(idx.begin(), idx.end());
    return idx;
  };
  auto pick = [&]() { return alphabet[std::uniform_int_distribution<std::size_t>(0, alphabet.size() - 1)(rng)]; };
  for (int kf = 1; kf <= n; ++kf)
    for (int kg = 1; kg <= n; ++kg) {
      std::map<int, std::pair<ComplexVector, ComplexVector>> found;
      for (int t = 0; t < opt.trials; ++t) {
        ComplexVector fv = ComplexVector::Zero(n), gv = ComplexVector::Zero(n);
        auto sf = random_support(kf);
        auto sg = random_support(kg);
        int mode = t % 4;
        for (int x : sf) fv(x) = mode == 3 ? Complex(nd(rng), nd(rng)) : pick();
        if (mode == 1 && kf == kg) {
          sg = sf;
          Complex c = pick();
          for (int x : sg) gv(x) = c / std::conj(fv(x));
        } else if (mode == 2) {
          Complex c = pick();
          for (int x : sg) gv(x) = c;
        } else {
          for (int x : sg) gv(x) = mode == 3 ? Complex(nd(rng), nd(rng)) : pick();
        }
        SignalVector f(G, fv), g(G, gv);
        if (f.support_size() != kf || g.support_size() != kg) continue;
        int l = support_size(stft(f, g));
        if (!found.count(l)) found[l] = {fv, gv};
      }
      for (int l = 1; l <= n * n; ++l) {
        Cell c{{kf, kg, l}, CellStatus::Unknown, "", 0, {}};
        auto it = found.find(l);
        if (it != found.end()) {
          c.status = CellStatus::FeasibleWitnessed;
          c.witness = {it->second.first, it->second.second};
          c.note = "random search";
        } else if (l < n) {
          c.status = CellStatus::InfeasibleProved;
          c.note = "stft support at least |G|";
        } else if (kf == 1 || kg == 1) {
          int other = kf == 1 ? kg : kf;
          if (l != n * other) {
            c.status = CellStatus::InfeasibleProved;
            c.note = "delta closed form: |G| times the other support";
          }
        }
        if (c.status == CellStatus::Unknown && prime && l < prime_stft_bound(n, kf, kg)) {
          c.status = CellStatus::InfeasibleProved;
          c.note = "prime cyclic sumset bound " + std::to_string(prime_stft_bound(n, kf, kg));
        }
        if (c.status == CellStatus::Unknown && z3 && z3->complete && kf == 3 && kg == 3 && (l == 4 || l == 5) &&
            !z3->achieved.count(l)) {
          c.status = CellStatus::InfeasibleProved;
          c.note = "Z3 algebraic exhaustion (" + std::to_string(z3->solutions) + " solutions, all support 3)";
        }
        map.cells[{kf, kg, l}] = c;
      }
    }
  return map;
}

struct ConjectureCell {
  int k = 0;
  int l = 0;
  CellStatus stft = CellStatus::Unknown;
  CellStatus predicted = CellStatus::Unknown;  // from the shifted Fourier map
  enum class Verdict { Agree, Violation, Undecided } verdict = Verdict::Undecided;
};

struct ConjectureReport {
  std::string group;
  int agreements = 0;
  int violations = 0;
  int undecided = 0;
  std::vector<ConjectureCell> cells;
  FeasibilityMap stft_map;
  FeasibilityMap fourier_map;
};

/// Compares the STFT pair map with {(k, l + |G|^2 - |G|) : (k, l) feasible for the Fourier transform}.
inline ConjectureReport conjecture_check(const FiniteAbelianGroup& G, const SignalVector& g,
                                         const StftMapOptions& stft_opt = {}, const MapOptions& fourier_opt = {}) {
  int n = G.order();
  detail::map_guard(n, stft_opt.max_order, stft_opt.override_guard);
  ConjectureReport rep;
  rep.group = G.spec();
  rep.fourier_map = fourier_pair_map(G, fourier_opt);
  rep.stft_map = stft_pair_map(G, g, stft_opt);
  int shift = n * n - n;
  for (int k = 1; k <= n; ++k)
    for (int l = 1; l <= n * n; ++l) {
      ConjectureCell c;
      c.k = k;
      c.l = l;
      c.stft = rep.stft_map.status({k, l});
      int lf = l - shift;
      c.predicted = (lf >= 1 && lf <= n) ? rep.fourier_map.status({k, lf}) : CellStatus::InfeasibleProved;
      bool sd = c.stft != CellStatus::Unknown, pd = c.predicted != CellStatus::Unknown;
      if (sd && pd) {
        c.verdict = is_feasible(c.stft) == is_feasible(c.predicted) ? ConjectureCell::Verdict::Agree
                                                                    : ConjectureCell::Verdict::Violation;
      }
      if (c.verdict == ConjectureCell::Verdict::Agree) ++rep.agreements;
      else if (c.verdict == ConjectureCell::Verdict::Violation) ++rep.violations;
      else ++rep.undecided;
      rep.cells.push_back(c);
    }
  return rep;
}

}  // namespace tfub
