// Print support-pair grids: which (|supp f|, |supp fhat|) occur on a group, and the Z3 STFT triples.
// F = witnessed, I = ruled out by a bound, X = ruled out by exhaustive search, U = undecided.
#include "tfub/io.hpp"
#include "tfub/tfub.hpp"

#include <iostream>

using namespace tfub;

int main(int argc, char** argv) {
  std::string spec = argc > 1 ? argv[1] : "Z6";
  auto G = FiniteAbelianGroup::parse(spec);
  std::cout << "Fourier support pairs on " << G.spec() << "\n" << io::map_to_csv(fourier_pair_map(G)) << "\n";

  auto m = stft_triple_map(FiniteAbelianGroup::cyclic(3));
  std::cout << "STFT supports on Z3, rows (|supp f|, |supp g|), columns |supp V_g f|\n" << io::map_to_csv(m);
}
