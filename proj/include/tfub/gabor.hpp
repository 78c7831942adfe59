#pragma once

#include "tfub/group.hpp"

#include <Eigen/Eigenvalues>

#include <cstdint>
#include <random>

namespace tfub {

struct TimeFrequencyIndex {
  int x = 0;
  int xi = 0;
  int flat(int n) const { return x * n + xi; }
  static TimeFrequencyIndex from_flat(int flat, int n) { return {flat / n, flat % n}; }
  bool operator==(const TimeFrequencyIndex&) const = default;
};

namespace detail {
inline void same_group(const SignalVector& a, const SignalVector& b) {
  if (!(a.group() == b.group())) throw std::invalid_argument("group mismatch");
}
inline void nonzero_window(const SignalVector& g) {
  if (g.norm() == 0.0) throw std::invalid_argument("zero window");
}
}  // namespace detail

/// (T_x f)(y) = f(y - x)
inline SignalVector translate(const SignalVector& f, int x) {
  const auto& G = f.group();
  ComplexVector v(G.order());
  for (int y = 0; y < G.order(); ++y) v(y) = f[G.subtract(y, x)];
  return SignalVector(G, v, f.zero_tol());
}

inline SignalVector translate(const SignalVector& f, const GroupElement& x) {
  return translate(f, f.group().index_of(x));
}

/// (M_xi f)(y) = f(y) <xi, y>
inline SignalVector modulate(const SignalVector& f, int xi) {
  const auto& G = f.group();
  ComplexVector v(G.order());
  for (int y = 0; y < G.order(); ++y) v(y) = f[y] * G.pairing_index(xi, y);
  return SignalVector(G, v, f.zero_tol());
}

inline SignalVector modulate(const SignalVector& f, const Character& xi) {
  return modulate(f, f.group().index_of(xi));
}

/// pi(x, xi) g = M_xi T_x g
inline SignalVector tf_shift(const SignalVector& g, int x, int xi) { return modulate(translate(g, x), xi); }

/// V_g f(x, xi) = sum_y f(y) conj(g(y - x)) conj<xi, y>; rows x, cols xi.
inline ComplexMatrix stft(const SignalVector& f, const SignalVector& g) {
  detail::same_group(f, g);
  detail::nonzero_window(g);
  const auto& G = f.group();
  int n = G.order();
  ComplexMatrix chars(n, n);
  for (int xi = 0; xi < n; ++xi)
    for (int y = 0; y < n; ++y) chars(xi, y) = std::conj(G.pairing_index(xi, y));
  ComplexMatrix V(n, n);
  ComplexVector h(n);
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y) h(y) = f[y] * std::conj(g[G.subtract(y, x)]);
    V.row(x) = (chars * h).transpose();
  }
  return V;
}

/// f(y) = 1/(|G| |g|^2) sum V(x, xi) g(y - x) <xi, y>
inline SignalVector istft(const ComplexMatrix& F, const SignalVector& g) {
  detail::nonzero_window(g);
  const auto& G = g.group();
  int n = G.order();
  if (F.rows() != n || F.cols() != n) throw std::invalid_argument("shape mismatch");
  ComplexVector out = ComplexVector::Zero(n);
  for (int y = 0; y < n; ++y) {
    Complex acc = 0.0;
    for (int x = 0; x < n; ++x) {
      Complex gy = g[G.subtract(y, x)];
      if (gy == 0.0) continue;
      Complex inner = 0.0;
      for (int xi = 0; xi < n; ++xi) inner += F(x, xi) * G.pairing_index(xi, y);
      acc += gy * inner;
    }
    out(y) = acc;
  }
  out /= static_cast<double>(n) * g.values().squaredNorm();
  return SignalVector(G, out, g.zero_tol());
}

struct GaborMatrix {
  FiniteAbelianGroup group;
  SignalVector window;
  ComplexMatrix matrix;  // |G|^2 x |G|, row x*|G| + xi is conj(pi(x, xi) g)
};

inline GaborMatrix gabor_matrix(const FiniteAbelianGroup& G, const SignalVector& g) {
  if (!(g.group() == G)) throw std::invalid_argument("group mismatch");
  int n = G.order();
  ComplexMatrix A(n * n, n);
  for (int x = 0; x < n; ++x)
    for (int xi = 0; xi < n; ++xi)
      for (int y = 0; y < n; ++y)
        A(x * n + xi, y) = std::conj(g[G.subtract(y, x)] * G.pairing_index(xi, y));
  return {G, g, A};
}

/// The Gabor system {pi(lambda) g} in flat (x outer, xi inner) order.
inline std::vector<SignalVector> gabor_system(const SignalVector& g) {
  int n = g.group().order();
  std::vector<SignalVector> out;
  out.reserve(static_cast<std::size_t>(n) * n);
  for (int x = 0; x < n; ++x)
    for (int xi = 0; xi < n; ++xi) out.push_back(tf_shift(g, x, xi));
  return out;
}

struct FrameBounds {
  double lower = 0.0;
  double upper = 0.0;
  bool is_frame() const { return lower > 0.0; }
  bool is_tight(double rel = 1e-8) const { return is_frame() && upper - lower <= rel * upper; }
};

/// Rows are conj(phi_k), so the analysis map is f -> matrix * f.
inline ComplexMatrix analysis_matrix(const std::vector<SignalVector>& vectors) {
  if (vectors.empty()) throw std::invalid_argument("empty frame");
  int n = vectors.front().size();
  ComplexMatrix M(static_cast<Eigen::Index>(vectors.size()), n);
  for (std::size_t k = 0; k < vectors.size(); ++k) {
    if (vectors[k].size() != n) throw std::invalid_argument("frame vectors differ in length");
    M.row(static_cast<Eigen::Index>(k)) = vectors[k].values().conjugate().transpose();
  }
  return M;
}

inline FrameBounds frame_bounds(const std::vector<SignalVector>& vectors) {
  ComplexMatrix M = analysis_matrix(vectors);
  ComplexMatrix S = M.adjoint() * M;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(S, Eigen::EigenvaluesOnly);
  FrameBounds fb{es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
  if (fb.lower <= 1e-12 * std::max(fb.upper, 1e-300)) fb.lower = 0.0;
  return fb;
}

inline SignalVector random_window(const FiniteAbelianGroup& G, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  ComplexVector v(G.order());
  for (int i = 0; i < G.order(); ++i) {
    double re = nd(rng);
    double im = nd(rng);
    v(i) = Complex(re, im);
  }
  return SignalVector(G, v);
}

inline SignalVector unimodular_window(const FiniteAbelianGroup& G, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  ComplexVector v(G.order());
  for (int i = 0; i < G.order(); ++i) v(i) = std::polar(1.0, 2.0 * std::numbers::pi * ud(rng));
  return SignalVector(G, v);
}

inline SignalVector delta_window(const FiniteAbelianGroup& G) { return SignalVector::delta(G); }

/// Characters of Z_m restricted to the first n coordinates.
inline std::vector<SignalVector> harmonic_frame(int n, int m) {
  if (n < 1 || m < n) throw std::invalid_argument("harmonic_frame needs m >= n >= 1");
  auto G = FiniteAbelianGroup::cyclic(n);
  std::vector<SignalVector> out;
  for (int j = 0; j < m; ++j) {
    ComplexVector v(n);
    for (int t = 0; t < n; ++t) v(t) = unit_root(static_cast<long long>(j) * t, m);
    out.emplace_back(G, v);
  }
  return out;
}

}  // namespace tfub
