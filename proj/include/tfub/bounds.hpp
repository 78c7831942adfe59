#pragma once

#include "tfub/gabor.hpp"
#include "tfub/rank.hpp"
#include "tfub/rational.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

namespace tfub {

inline bool is_prime(long long n) {
  if (n < 2) return false;
  for (long long d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

inline std::vector<int> divisors(int n) {
  std::vector<int> d;
  for (int i = 1; i <= n; ++i)
    if (n % i == 0) d.push_back(i);
  return d;
}

namespace detail {
inline void check_k(int n, int k) {
  if (k < 1 || k > n) throw std::invalid_argument("k out of range");
}
inline void check_prime(long long p) {
  if (!is_prime(p)) throw std::invalid_argument("p is not prime");
}
}  // namespace detail

/// Minimum spectral support implied by |f|_0 |fhat|_0 >= n.
inline int donoho_stark(int n, int k) {
  detail::check_k(n, k);
  return (n + k - 1) / k;
}

/// ceil(2 sqrt(n)), computed exactly.
inline int donoho_stark_sum_bound(int n) {
  int s = 0;
  while (static_cast<long long>(s) * s < 4LL * n) ++s;
  return s;
}

inline int tao_bound(int p, int k) {
  detail::check_prime(p);
  detail::check_k(p, k);
  return p + 1 - k;
}

struct DivisorBracket {
  int d1 = 1;  // largest divisor <= k
  int d2 = 1;  // smallest divisor >= k
};

inline DivisorBracket divisor_bracket(int n, int k) {
  detail::check_k(n, k);
  DivisorBracket b{1, n};
  for (int d : divisors(n)) {
    if (d <= k) b.d1 = d;
    if (d >= k && d < b.d2) b.d2 = d;
  }
  return b;
}

/// u(n, k) = (n / (d1 d2)) (d1 + d2 - k)
inline Rational meshulam_u(int n, int k) {
  auto [d1, d2] = divisor_bracket(n, k);
  return Rational(n, static_cast<std::int64_t>(d1) * d2) * Rational(d1 + d2 - k);
}

inline Rational meshulam_theta_lower(const FiniteAbelianGroup& G, int k) { return meshulam_u(G.order(), k); }

inline Rational phi_lower_main(const FiniteAbelianGroup& G, int k) {
  int n = G.order();
  auto [d1, d2] = divisor_bracket(n, k);
  return Rational(static_cast<std::int64_t>(n) * n, static_cast<std::int64_t>(d1) * d2) * Rational(d1 + d2 - k);
}

/// p^2 (q^2 - k + 1) for k < q, else (p^2 - k/q + 1)(q^2 - q + 1).
inline Rational phi_lower_zpq(int p, int q, int k) {
  detail::check_prime(p);
  detail::check_prime(q);
  if (q >= p) throw std::invalid_argument("need q < p");
  detail::check_k(p * q, k);
  std::int64_t p2 = static_cast<std::int64_t>(p) * p, q2 = static_cast<std::int64_t>(q) * q;
  if (k < q) return Rational(p2 * (q2 - k + 1));
  return (Rational(p2 + 1) - Rational(k, q)) * Rational(q2 - q + 1);
}

/// Reference Z6 row, which disagrees with phi_lower_zpq(3, 2, k) for k >= 2; kept for side-by-side output.
inline const std::vector<int>& phi_lower_zpq_reference_z6() {
  static const std::vector<int> row{36, 26, 25, 23, 22, 20};
  return row;
}

inline int cauchy_davenport(int a, int b, int p) {
  detail::check_prime(p);
  if (a < 1 || b < 1 || a > p || b > p) throw std::invalid_argument("set sizes out of range");
  return std::min(a + b - 1, p);
}

inline int prime_stft_bound(int p, int kf, int kg) {
  detail::check_prime(p);
  detail::check_k(p, kf);
  detail::check_k(p, kg);
  if (kf + kg > p) return p * (p + 1) - kf * kg;
  return p * (p + 1) - (p + 1 - kf) * (p + 1 - kg);
}

struct PrimePairBounds {
  Rational max_form;
  Rational averaged;
};

inline PrimePairBounds prime_stft_pair_bounds(int p, int kf, int kfh, int kg, int kgh) {
  detail::check_prime(p);
  for (int v : {kf, kfh, kg, kgh}) detail::check_k(p, v);
  std::int64_t a = static_cast<std::int64_t>(p + 1 - kg) * (p + 1 - kfh);
  std::int64_t b = static_cast<std::int64_t>(p + 1 - kf) * (p + 1 - kgh);
  return {Rational(std::max(a, b)), Rational(a + b, 2)};
}

enum class ThetaKind { Exact, Meshulam, TaoPrime, NaivePlusOne };

inline std::string to_string(ThetaKind k) {
  switch (k) {
    case ThetaKind::Exact: return "exact";
    case ThetaKind::Meshulam: return "meshulam";
    case ThetaKind::TaoPrime: return "tao_prime";
    default: return "naive_plus_one";
  }
}

struct ExactOptions {
  EnumerationOptions enumeration;
  int max_order = 16;  // guard for DFT searches; Gabor searches use max_gabor_order
  int max_gabor_order = 8;
  bool override_guard = false;
};

struct ThetaResult {
  int value = 0;
  SignalVector witness;  // |f|_0 <= k and |fhat|_0 = value
  bool witness_verified = false;
  DeficiencyResult certificate;
};

namespace detail {

/// Element sets of subgroups: all cyclic subgroups plus products of factor subgroups.
inline std::vector<std::vector<int>> subgroup_candidates(const FiniteAbelianGroup& G) {
  std::set<std::vector<int>> out;
  int n = G.order();
  for (int x = 0; x < n; ++x) {
    std::vector<int> h{0};
    for (int y = x; y != 0; y = G.add(y, x)) h.push_back(y);
    std::sort(h.begin(), h.end());
    out.insert(h);
  }
  const auto& f = G.factors();
  std::vector<std::vector<int>> steps;  // per factor, admissible step sizes
  for (int d : f) steps.push_back(divisors(d));
  std::vector<std::size_t> pick(f.size(), 0);
  while (true) {
    std::vector<int> h;
    for (int x = 0; x < n; ++x) {
      auto r = G.residues(x);
      bool in = true;
      for (std::size_t i = 0; i < f.size(); ++i)
        if (r[i] % steps[i][pick[i]] != 0) in = false;
      if (in) h.push_back(x);
    }
    out.insert(h);
    std::size_t i = 0;
    while (i < f.size() && ++pick[i] == steps[i].size()) pick[i++] = 0;
    if (i == f.size()) break;
  }
  return {out.begin(), out.end()};
}

/// Vector supported on `cols` with M_{rows, cols} c = 0, from the smallest right singular vector.
inline ComplexVector kernel_vector(const ComplexMatrix& M, const std::vector<int>& rows, const std::vector<int>& cols) {
  ComplexVector c = ComplexVector::Zero(M.cols());
  if (cols.empty()) return c;
  if (rows.empty()) {
    c(cols.front()) = 1.0;
    return c;
  }
  ComplexMatrix S = submatrix(M, rows, cols);
  Eigen::JacobiSVD<ComplexMatrix> svd(S, Eigen::ComputeFullV);
  ComplexVector v = svd.matrixV().col(svd.matrixV().cols() - 1);
  for (std::size_t j = 0; j < cols.size(); ++j) c(cols[j]) = v(static_cast<Eigen::Index>(j));
  return c;
}

inline void guard(int order, int limit, bool override_guard) {
  if (!override_guard && order > limit)
    throw std::length_error("group order " + std::to_string(order) + " exceeds the exhaustive-search guard " +
                            std::to_string(limit));
}

}  // namespace detail

/// theta(G, k) = |G| - max_deficient_rows(F_G, k), seeded by subgroup indicator witnesses.
inline ThetaResult theta_exact(const FiniteAbelianGroup& G, int k, const ExactOptions& opt = {}) {
  int n = G.order();
  detail::check_k(n, k);
  detail::guard(n, opt.max_order, opt.override_guard);
  ComplexMatrix F = fourier_matrix(G);
  std::vector<SubsetPair> hints;
  for (const auto& h : detail::subgroup_candidates(G)) {
    if (static_cast<int>(h.size()) > k) continue;
    ComplexVector ind = ComplexVector::Zero(n);
    for (int x : h) ind(x) = 1.0;
    SignalVector fh = fourier(SignalVector(G, ind));
    auto supp = fh.support();
    SubsetPair sp;
    sp.rows = complement(supp, n);
    sp.cols = h;
    for (int x = 0; static_cast<int>(sp.cols.size()) < k; ++x)
      if (!std::binary_search(h.begin(), h.end(), x)) sp.cols.push_back(x);
    std::sort(sp.cols.begin(), sp.cols.end());
    hints.push_back(std::move(sp));
  }
  ThetaResult res;
  res.certificate = max_deficient_rows(F, k, hints, opt.enumeration);
  res.value = n - res.certificate.max_rows;
  ComplexVector c = detail::kernel_vector(F, res.certificate.witness_rows.value_or(std::vector<int>{}),
                                          res.certificate.witness_cols.value_or(first_subset(k)));
  res.witness = SignalVector(G, c / c.cwiseAbs().maxCoeff());
  res.witness_verified = res.witness.support_size() <= k && fourier(res.witness).support_size() == res.value;
  return res;
}

struct PhiResult {
  int value = 0;
  SignalVector window;
  SignalVector witness;  // |f|_0 <= k and |V_g f|_0 = value
  bool witness_verified = false;
  DeficiencyResult certificate;
};

/// |G|^2 - max_deficient_rows(A_{G,g}, k); equals phi(G, k) for almost every window.
inline PhiResult phi_exact(const FiniteAbelianGroup& G, int k, const SignalVector& g, const ExactOptions& opt = {}) {
  int n = G.order();
  detail::check_k(n, k);
  detail::guard(n, opt.max_gabor_order, opt.override_guard);
  ComplexMatrix A = gabor_matrix(G, g).matrix;
  PhiResult res;
  res.window = g;
  res.certificate = max_deficient_rows(A, k, {}, opt.enumeration);
  res.value = n * n - res.certificate.max_rows;
  ComplexVector c = detail::kernel_vector(A, res.certificate.witness_rows.value_or(std::vector<int>{}),
                                          res.certificate.witness_cols.value_or(first_subset(k)));
  res.witness = SignalVector(G, c / c.cwiseAbs().maxCoeff());
  res.witness_verified =
      res.witness.support_size() <= k && support_size(stft(res.witness, g)) == res.value;
  return res;
}

struct PsiResult {
  int value = 0;
  DeficiencyResult certificate;
};

/// min |D c|_0 over nonzero D c with |c|_0 <= k.
inline PsiResult psi(const ComplexMatrix& D, int k, std::uint64_t max_column_sets = 100000,
                     const EnumerationOptions& opt = {}) {
  if (k < 1 || k > D.cols()) throw std::invalid_argument("k out of range");
  if (binomial(static_cast<int>(D.cols()), k) > max_column_sets) throw std::length_error("psi guard exceeded");
  PsiResult res;
  res.certificate = max_deficient_rows(D, k, {}, opt);
  res.value = static_cast<int>(D.rows()) - res.certificate.max_rows;
  return res;
}

/// theta(k) under one of the providers; Exact values are computed once per k on demand.
class ThetaProvider {
 public:
  ThetaProvider(ThetaKind kind, FiniteAbelianGroup G, ExactOptions opt = {})
      : kind_(kind), G_(std::move(G)), opt_(opt), cache_(static_cast<std::size_t>(G_.order()) + 1, -1) {
    if (kind_ == ThetaKind::TaoPrime) detail::check_prime(G_.order());
  }

  ThetaKind kind() const { return kind_; }
  const FiniteAbelianGroup& group() const { return G_; }

  Rational operator()(int k) const {
    int n = G_.order();
    detail::check_k(n, k);
    switch (kind_) {
      case ThetaKind::Meshulam: return meshulam_theta_lower(G_, k);
      case ThetaKind::TaoPrime: return Rational(tao_bound(n, k));
      case ThetaKind::NaivePlusOne: return Rational(n + 1 - k);
      case ThetaKind::Exact:
      default:
        if (cache_[static_cast<std::size_t>(k)] < 0) cache_[static_cast<std::size_t>(k)] = theta_exact(G_, k, opt_).value;
        return Rational(cache_[static_cast<std::size_t>(k)]);
    }
  }

 private:
  ThetaKind kind_;
  FiniteAbelianGroup G_;
  ExactOptions opt_;
  mutable std::vector<int> cache_;
};

struct StftLowerBounds {
  Rational max_form;    // max of the two products
  Rational mean_form;   // arithmetic mean of the two products
  double geometric_form = 0.0;  // square root of the product of all four theta values
};

inline StftLowerBounds stft_lower_general(const ThetaProvider& theta, int kf, int kfh, int kg, int kgh) {
  Rational a = theta(kg) * theta(kfh);
  Rational b = theta(kf) * theta(kgh);
  StftLowerBounds r;
  r.max_form = std::max(a, b);
  r.mean_form = (a + b) / Rational(2);
  r.geometric_form = std::sqrt(a.to_double() * b.to_double());
  return r;
}

}  // namespace tfub
