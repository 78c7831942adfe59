// Recover a signal on Z16 whose spectrum has at most 3 nonzero entries from 13 of its 16 values.
// 13 = 16 - theta(Z16, 6) + 1, so any two 3-sparse spectra that agree on 13 points are equal.
#include "tfub/tfub.hpp"

#include <cstdio>
#include <random>

using namespace tfub;

int main(int argc, char** argv) {
  std::uint64_t seed = argc > 1 ? std::stoull(argv[1]) : 7;
  std::mt19937_64 rng(seed);
  auto G = FiniteAbelianGroup::cyclic(16);
  ComplexMatrix D = character_dictionary(G);

  ComplexVector c = ComplexVector::Zero(16);
  c(2) = {1.0, -0.5};
  c(7) = {-0.3, 0.8};
  c(11) = {0.6, 0.0};
  ComplexVector f = D * c;

  std::vector<int> rows(16);
  for (int i = 0; i < 16; ++i) rows[static_cast<std::size_t>(i)] = i;
  std::shuffle(rows.begin(), rows.end(), rng);
  rows.resize(13);
  std::sort(rows.begin(), rows.end());
  ComplexVector s(13);
  for (int i = 0; i < 13; ++i) s(i) = f(rows[static_cast<std::size_t>(i)]);

  std::printf("observed points:");
  for (int r : rows) std::printf(" %d", r);
  std::printf("\n");

  auto d = l0_decode(D, rows, s, 3);
  std::printf("decode: %s, residual %.2e\n", to_string(d.status).c_str(), d.residual);
  for (int i = 0; i < 16; ++i)
    if (std::abs(d.coefficients(i)) > 1e-9)
      std::printf("  xi=%2d  %+.6f %+.6fi  (true %+.6f %+.6fi)\n", i, d.coefficients(i).real(), d.coefficients(i).imag(),
                  c(i).real(), c(i).imag());
  std::printf("coefficient error %.2e\n", (d.coefficients - c).norm());
  return d.status == DecodeStatus::Unique ? 0 : 1;
}
