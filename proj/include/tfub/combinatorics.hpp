#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace tfub {

inline constexpr int kMaxBinomialN = 66;

/// C(n, k) for 0 <= n < 66; saturates at UINT64_MAX.
inline std::uint64_t binomial(int n, int k) {
  static const auto table = [] {
    std::array<std::array<std::uint64_t, kMaxBinomialN>, kMaxBinomialN> t{};
    for (int i = 0; i < kMaxBinomialN; ++i) {
      t[i][0] = 1;
      for (int j = 1; j <= i; ++j) {
        std::uint64_t a = t[i - 1][j - 1], b = (j <= i - 1) ? t[i - 1][j] : 0;
        t[i][j] = (a > UINT64_MAX - b) ? UINT64_MAX : a + b;
      }
    }
    return t;
  }();
  if (k < 0 || n < 0 || k > n) return 0;
  if (n >= kMaxBinomialN) throw std::out_of_range("binomial argument too large");
  return table[n][k];
}

/// Colex rank of a sorted k-subset: sum_i C(s_i, i + 1).
inline std::uint64_t colex_rank(const int* s, int k) {
  std::uint64_t r = 0;
  for (int i = 0; i < k; ++i) r += binomial(s[i], i + 1);
  return r;
}

inline std::uint64_t colex_rank(const std::vector<int>& s) {
  return colex_rank(s.data(), static_cast<int>(s.size()));
}

/// Inverse of colex_rank.
inline void colex_unrank(std::uint64_t r, int k, int* out) {
  for (int i = k; i >= 1; --i) {
    int c = i - 1;
    while (binomial(c + 1, i) <= r) ++c;
    out[i - 1] = c;
    r -= binomial(c, i);
  }
}

inline std::vector<int> colex_unrank(std::uint64_t r, int k) {
  std::vector<int> s(static_cast<std::size_t>(k));
  colex_unrank(r, k, s.data());
  return s;
}

/// Advance a sorted k-subset of {0..n-1} in colex order; false after the last one.
inline bool next_colex(int* s, int k, int n) {
  for (int i = 0; i < k; ++i) {
    int limit = (i + 1 < k) ? s[i + 1] : n;
    if (s[i] + 1 < limit) {
      ++s[i];
      for (int j = 0; j < i; ++j) s[j] = j;
      return true;
    }
  }
  return false;
}

inline bool next_colex(std::vector<int>& s, int n) {
  return next_colex(s.data(), static_cast<int>(s.size()), n);
}

inline std::vector<int> first_subset(int k) {
  std::vector<int> s(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) s[i] = i;
  return s;
}

/// Sorted complement of s in {0..n-1}.
inline std::vector<int> complement(const std::vector<int>& s, int n) {
  std::vector<int> out;
  std::size_t j = 0;
  for (int i = 0; i < n; ++i) {
    if (j < s.size() && s[j] == i) {
      ++j;
      continue;
    }
    out.push_back(i);
  }
  return out;
}

/// Calls f(subset) for every k-subset of {0..n-1} in colex order until f returns false.
template <typename F>
void for_each_subset(int n, int k, F&& f) {
  if (k < 0 || k > n) return;
  auto s = first_subset(k);
  do {
    if (!f(static_cast<const std::vector<int>&>(s))) return;
  } while (next_colex(s, n));
}

}  // namespace tfub
