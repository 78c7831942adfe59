#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tfub {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr double kDefaultZeroTol = 1e-9;

// exp(2 pi i k / n), exact for multiples of a quarter turn
inline Complex unit_root(long long k, long long n) {
  long long r = ((k % n) + n) % n;
  if (r == 0) return {1.0, 0.0};
  if (4 * r == n) return {0.0, 1.0};
  if (2 * r == n) return {-1.0, 0.0};
  if (4 * r == 3 * n) return {0.0, -1.0};
  double a = 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(n);
  return {std::cos(a), std::sin(a)};
}

struct GroupElement {
  std::vector<int> residues;
  bool operator==(const GroupElement&) const = default;
};

struct Character {
  std::vector<int> residues;
  bool operator==(const Character&) const = default;
};

/// Direct product Z_{d1} x ... x Z_{dm}. Elements and characters are both
/// indexed by mixed radix with the leftmost factor most significant.
class FiniteAbelianGroup {
 public:
  FiniteAbelianGroup() = default;

  explicit FiniteAbelianGroup(std::vector<int> factors) : factors_(std::move(factors)) {
    for (int d : factors_)
      if (d < 2) throw std::invalid_argument("cyclic factor must be >= 2");
    order_ = 1;
    for (int d : factors_) {
      if (order_ > (1 << 20) / d) throw std::invalid_argument("group order too large");
      order_ *= d;
    }
  }

  static FiniteAbelianGroup cyclic(int n) {
    if (n == 1) return FiniteAbelianGroup();
    return FiniteAbelianGroup(std::vector<int>{n});
  }

  // Grammar Z<d>[xZ<d>]*, case-insensitive. "Z1" is the trivial group.
  static FiniteAbelianGroup parse(std::string_view spec) {
    std::vector<int> factors;
    std::size_t i = 0;
    auto fail = [&]() { throw std::invalid_argument("bad group spec: " + std::string(spec)); };
    if (spec.empty()) fail();
    while (true) {
      if (i >= spec.size() || std::tolower(static_cast<unsigned char>(spec[i])) != 'z') fail();
      ++i;
      std::size_t start = i;
      long long d = 0;
      while (i < spec.size() && std::isdigit(static_cast<unsigned char>(spec[i]))) {
        d = d * 10 + (spec[i] - '0');
        if (d > (1 << 20)) fail();
        ++i;
      }
      if (i == start || d < 1) fail();
      if (d >= 2) factors.push_back(static_cast<int>(d));
      if (i == spec.size()) break;
      if (std::tolower(static_cast<unsigned char>(spec[i])) != 'x') fail();
      ++i;
    }
    return FiniteAbelianGroup(std::move(factors));
  }

  const std::vector<int>& factors() const { return factors_; }
  int order() const { return order_; }
  bool is_cyclic() const { return factors_.size() <= 1; }

  std::string spec() const {
    if (factors_.empty()) return "Z1";
    std::string s;
    for (std::size_t i = 0; i < factors_.size(); ++i) {
      if (i) s += 'x';
      s += 'Z' + std::to_string(factors_[i]);
    }
    return s;
  }

  std::vector<int> residues(int index) const {
    check_index(index);
    std::vector<int> r(factors_.size());
    for (std::size_t i = factors_.size(); i-- > 0;) {
      r[i] = index % factors_[i];
      index /= factors_[i];
    }
    return r;
  }

  int index(std::span<const int> residues) const {
    if (residues.size() != factors_.size()) throw std::invalid_argument("group mismatch");
    int idx = 0;
    for (std::size_t i = 0; i < factors_.size(); ++i) {
      if (residues[i] < 0 || residues[i] >= factors_[i])
        throw std::invalid_argument("residue out of range");
      idx = idx * factors_[i] + residues[i];
    }
    return idx;
  }

  GroupElement element(int index) const { return {residues(index)}; }
  Character character(int index) const { return {residues(index)}; }
  int index_of(const GroupElement& x) const { return index(x.residues); }
  int index_of(const Character& xi) const { return index(xi.residues); }

  int add(int a, int b) const { return combine(a, b, +1); }
  int subtract(int a, int b) const { return combine(a, b, -1); }
  int negate(int a) const { return combine(0, a, -1); }

  /// <xi, x> with both given by index.
  Complex pairing_index(int xi, int x) const {
    auto a = residues(xi);
    auto b = residues(x);
    Complex p{1.0, 0.0};
    for (std::size_t i = 0; i < factors_.size(); ++i)
      p *= unit_root(static_cast<long long>(a[i]) * b[i], factors_[i]);
    return p;
  }

  bool operator==(const FiniteAbelianGroup& o) const { return factors_ == o.factors_; }

 private:
  void check_index(int index) const {
    if (index < 0 || index >= order_) throw std::out_of_range("group index out of range");
  }

  int combine(int a, int b, int sign) const {
    auto ra = residues(a);
    auto rb = residues(b);
    for (std::size_t i = 0; i < factors_.size(); ++i)
      ra[i] = ((ra[i] + sign * rb[i]) % factors_[i] + factors_[i]) % factors_[i];
    return index(ra);
  }

  std::vector<int> factors_;
  int order_ = 1;
};

inline Complex pairing(const FiniteAbelianGroup& G, const Character& xi, const GroupElement& x) {
  return G.pairing_index(G.index_of(xi), G.index_of(x));
}

/// Complex function on a group with tolerance-aware support.
class SignalVector {
 public:
  SignalVector() = default;

  SignalVector(FiniteAbelianGroup group, ComplexVector values, double zero_tol = kDefaultZeroTol)
      : group_(std::move(group)), values_(std::move(values)), zero_tol_(zero_tol) {
    if (values_.size() != group_.order()) throw std::invalid_argument("signal length != group order");
    if (zero_tol_ < 0) throw std::invalid_argument("negative zero tolerance");
  }

  static SignalVector zeros(const FiniteAbelianGroup& G) {
    return SignalVector(G, ComplexVector::Zero(G.order()));
  }

  static SignalVector delta(const FiniteAbelianGroup& G, int at = 0) {
    ComplexVector v = ComplexVector::Zero(G.order());
    v(at) = 1.0;
    return SignalVector(G, v);
  }

  const FiniteAbelianGroup& group() const { return group_; }
  const ComplexVector& values() const { return values_; }
  double zero_tol() const { return zero_tol_; }
  int size() const { return static_cast<int>(values_.size()); }
  Complex operator[](int i) const { return values_(i); }

  double threshold() const {
    double m = values_.size() ? values_.cwiseAbs().maxCoeff() : 0.0;
    return zero_tol_ * std::max(1.0, m);
  }

  std::vector<int> support() const {
    std::vector<int> s;
    double t = threshold();
    for (int i = 0; i < size(); ++i)
      if (std::abs(values_(i)) > t) s.push_back(i);
    return s;
  }

  int support_size() const { return static_cast<int>(support().size()); }
  double norm() const { return values_.norm(); }

 private:
  FiniteAbelianGroup group_;
  ComplexVector values_;
  double zero_tol_ = kDefaultZeroTol;
};

/// Support size of an arbitrary complex array under the same rule as SignalVector.
template <typename Derived>
int support_size(const Eigen::MatrixBase<Derived>& v, double zero_tol = kDefaultZeroTol) {
  if (v.size() == 0) return 0;
  double t = zero_tol * std::max(1.0, static_cast<double>(v.cwiseAbs().maxCoeff()));
  int c = 0;
  for (Eigen::Index i = 0; i < v.rows(); ++i)
    for (Eigen::Index j = 0; j < v.cols(); ++j)
      if (std::abs(v(i, j)) > t) ++c;
  return c;
}

/// W_G, entry (r,s) = <S2(r), S1(s)>.
inline ComplexMatrix dft_matrix(const FiniteAbelianGroup& G) {
  int n = G.order();
  ComplexMatrix W(n, n);
  for (int r = 0; r < n; ++r)
    for (int s = 0; s < n; ++s) W(r, s) = G.pairing_index(r, s);
  return W;
}

/// Matrix of the forward transform, conj(W_G).
inline ComplexMatrix fourier_matrix(const FiniteAbelianGroup& G) { return dft_matrix(G).conjugate(); }

inline SignalVector fourier(const SignalVector& f) {
  const auto& G = f.group();
  int n = G.order();
  ComplexVector out = ComplexVector::Zero(n);
  for (int xi = 0; xi < n; ++xi) {
    Complex acc = 0.0;
    for (int x = 0; x < n; ++x) acc += f[x] * std::conj(G.pairing_index(xi, x));
    out(xi) = acc;
  }
  return SignalVector(G, out, f.zero_tol());
}

inline SignalVector inverse_fourier(const SignalVector& fh) {
  const auto& G = fh.group();
  int n = G.order();
  ComplexVector out = ComplexVector::Zero(n);
  for (int x = 0; x < n; ++x) {
    Complex acc = 0.0;
    for (int xi = 0; xi < n; ++xi) acc += fh[xi] * G.pairing_index(xi, x);
    out(x) = acc / static_cast<double>(n);
  }
  return SignalVector(G, out, fh.zero_tol());
}

/// Rf(x, w) = f(x) conj(fhat(w)) conj<w, x>; rows x, cols w.
inline ComplexMatrix rihaczek(const SignalVector& f) {
  const auto& G = f.group();
  int n = G.order();
  SignalVector fh = fourier(f);
  ComplexMatrix R(n, n);
  for (int x = 0; x < n; ++x)
    for (int w = 0; w < n; ++w) R(x, w) = f[x] * std::conj(fh[w]) * std::conj(G.pairing_index(w, x));
  return R;
}

/// Fs F(r, rho) = sum_{x, xi} F(x, xi) conj<rho, x> <xi, r>.
inline ComplexMatrix symplectic_fourier(const FiniteAbelianGroup& G, const ComplexMatrix& F) {
  int n = G.order();
  if (F.rows() != n || F.cols() != n) throw std::invalid_argument("shape mismatch");
  ComplexMatrix W = dft_matrix(G);
  // W is symmetric: W(xi, r) = <xi, r>
  return W.transpose() * F.transpose() * W.adjoint();
}

}  // namespace tfub
