#include "tfub/gabor.hpp"
#include "tfub/rank.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace tfub;

namespace {

const Complex I(0.0, 1.0);

SignalVector sig(const FiniteAbelianGroup& G, std::initializer_list<Complex> vals) {
  ComplexVector v(static_cast<Eigen::Index>(vals.size()));
  int i = 0;
  for (auto c : vals) v(i++) = c;
  return SignalVector(G, v);
}

// reference 4 x 16 matrices for g = (1,2,3,4); A is their adjoint
ComplexMatrix reference_z4() {
  ComplexMatrix D(4, 16);
  D << 1, 1, 1, 1, 2, 2, 2, 2, 3, 3, 3, 3, 4, 4, 4, 4,
      2, 2.0 * I, -2, -2.0 * I, 3, 3.0 * I, -3, -3.0 * I, 4, 4.0 * I, -4, -4.0 * I, 1, I, -1, -I,
      3, -3, 3, -3, 4, -4, 4, -4, 1, -1, 1, -1, 2, -2, 2, -2,
      4, -4.0 * I, -4, 4.0 * I, 1, -I, -1, I, 2, -2.0 * I, -2, 2.0 * I, 3, -3.0 * I, -3, 3.0 * I;
  return D;
}

ComplexMatrix reference_z2z2() {
  ComplexMatrix D(4, 16);
  D << 1, 1, 1, 1, 2, 2, 2, 2, 3, 3, 3, 3, 4, 4, 4, 4,
      2, -2, 2, -2, 1, -1, 1, -1, 4, -4, 4, -4, 3, -3, 3, -3,
      3, 3, -3, -3, 4, 4, -4, -4, 1, 1, -1, -1, 2, 2, -2, -2,
      4, -4, -4, 4, 3, -3, -3, 3, 2, -2, -2, 2, 1, -1, -1, 1;
  return D;
}

}  // namespace

TEST(Gabor, TranslateAndModulate) {
  auto Z4 = FiniteAbelianGroup::cyclic(4);
  auto f = sig(Z4, {1, 2, 3, 4});
  auto t = translate(f, 1);
  EXPECT_EQ(t.values(), sig(Z4, {4, 1, 2, 3}).values());
  EXPECT_EQ(translate(f, 0).values(), f.values());
  EXPECT_EQ(translate(SignalVector::delta(Z4), 3).values(), SignalVector::delta(Z4, 3).values());

  FiniteAbelianGroup G({2, 3});
  auto d = SignalVector::delta(G);
  EXPECT_EQ(translate(d, G.element(4)).values(), SignalVector::delta(G, 4).values());
  // T_x T_y = T_{x+y}
  auto r = random_window(G, 1);
  EXPECT_LT((translate(translate(r, 2), 5).values() - translate(r, G.add(2, 5)).values()).norm(), 1e-15);

  auto Z2 = FiniteAbelianGroup::cyclic(2);
  auto ab = sig(Z2, {Complex(2, 1), Complex(-3, 0.5)});
  EXPECT_EQ(modulate(ab, 1).values(), sig(Z2, {Complex(2, 1), Complex(3, -0.5)}).values());
  EXPECT_EQ(modulate(ab, 0).values(), ab.values());
}

TEST(Gabor, ModulationIntertwinesWithFourier) {
  auto Z6 = FiniteAbelianGroup::cyclic(6);
  auto f = random_window(Z6, 4);
  for (int xi = 0; xi < 6; ++xi) {
    auto lhs = fourier(modulate(f, xi));
    auto rhs = translate(fourier(f), xi);
    EXPECT_LT((lhs.values() - rhs.values()).norm(), 1e-10 * rhs.norm());
  }
}

TEST(Gabor, ShiftsAreUnitary) {
  for (auto spec : {"Z5", "Z2xZ3", "Z8"}) {
    auto G = FiniteAbelianGroup::parse(spec);
    auto g = random_window(G, 2);
    for (const auto& v : gabor_system(g)) EXPECT_NEAR(v.norm(), g.norm(), 1e-12);
  }
}

TEST(Gabor, StftGoldenValuesZ3) {
  auto Z3 = FiniteAbelianGroup::cyclic(3);
  EXPECT_EQ(support_size(stft(sig(Z3, {1, 1, 1}), sig(Z3, {1, 1, 1}))), 3);
  EXPECT_EQ(support_size(stft(sig(Z3, {1, -1, 0}), sig(Z3, {1, 1, 0}))), 8);
  EXPECT_EQ(support_size(stft(sig(Z3, {1, 2, 3}), sig(Z3, {1, 2, 3}))), 9);
  for (auto spec : {"Z3", "Z4", "Z2xZ2", "Z7"}) {
    auto G = FiniteAbelianGroup::parse(spec);
    auto d = SignalVector::delta(G);
    EXPECT_EQ(support_size(stft(d, d)), G.order());
  }
}

TEST(Gabor, StftErrors) {
  auto Z3 = FiniteAbelianGroup::cyclic(3);
  auto f = random_window(Z3, 1);
  EXPECT_THROW(stft(f, SignalVector::zeros(Z3)), std::invalid_argument);
  EXPECT_THROW(stft(f, random_window(FiniteAbelianGroup::cyclic(4), 1)), std::invalid_argument);
  EXPECT_THROW(istft(ComplexMatrix::Zero(3, 3), SignalVector::zeros(Z3)), std::invalid_argument);
}

TEST(Gabor, EnergyIdentityAndRoundTrip) {
  for (int n = 1; n <= 16; ++n) {
    auto G = FiniteAbelianGroup::cyclic(n);
    auto f = random_window(G, 100 + n);
    auto g = random_window(G, 200 + n);
    ComplexMatrix V = stft(f, g);
    double want = n * f.values().squaredNorm() * g.values().squaredNorm();
    EXPECT_LE(std::abs(V.squaredNorm() - want), 1e-9 * want) << n;
    auto back = istft(V, g);
    EXPECT_LE((back.values() - f.values()).norm(), 1e-9 * f.norm()) << n;
  }
  auto Z4 = FiniteAbelianGroup::cyclic(4);
  auto d = SignalVector::delta(Z4);
  EXPECT_LT((istft(stft(d, d), d).values() - d.values()).norm(), 1e-15);
}

TEST(Gabor, IstftIsLinear) {
  auto Z5 = FiniteAbelianGroup::cyclic(5);
  auto g = random_window(Z5, 1);
  ComplexMatrix F1 = ComplexMatrix::Random(5, 5);
  ComplexMatrix F2 = ComplexMatrix::Random(5, 5);
  Complex a(0.3, -1.2), b(2.0, 0.5);
  ComplexVector lhs = istft(a * F1 + b * F2, g).values();
  ComplexVector rhs = a * istft(F1, g).values() + b * istft(F2, g).values();
  EXPECT_LT((lhs - rhs).norm(), 1e-12 * rhs.norm());
}

TEST(Gabor, MatrixMatchesReferenceZ2xZ2) {
  FiniteAbelianGroup K({2, 2});
  auto A = gabor_matrix(K, sig(K, {1, 2, 3, 4})).matrix;
  EXPECT_LT((A - reference_z2z2().adjoint()).norm(), 1e-14);
}

TEST(Gabor, MatrixMatchesReferenceZ4UpToTimeReflection) {
  // our row (x, xi) is the reference row (-x, xi); the two conventions differ by x -> -x only
  auto Z4 = FiniteAbelianGroup::cyclic(4);
  auto A = gabor_matrix(Z4, sig(Z4, {1, 2, 3, 4})).matrix;
  ComplexMatrix D = reference_z4().adjoint();
  for (int x = 0; x < 4; ++x)
    for (int xi = 0; xi < 4; ++xi)
      EXPECT_LT((A.row(x * 4 + xi) - D.row(Z4.negate(x) * 4 + xi)).norm(), 1e-14) << x << "," << xi;
  // same rows as a set, so every minor statistic agrees
  auto h1 = minor_rank_histogram(A, {2}, {});
  auto h2 = minor_rank_histogram(D, {2}, {});
  EXPECT_EQ(h1.counts, h2.counts);
}

TEST(Gabor, MatrixAppliedIsStft) {
  auto Z6 = FiniteAbelianGroup::cyclic(6);
  auto g = random_window(Z6, 9);
  auto A = gabor_matrix(Z6, g).matrix;
  for (int trial = 0; trial < 100; ++trial) {
    auto f = random_window(Z6, 1000 + trial);
    ComplexMatrix V = stft(f, g);
    ComplexVector flat(36);
    for (int x = 0; x < 6; ++x)
      for (int xi = 0; xi < 6; ++xi) flat(x * 6 + xi) = V(x, xi);
    EXPECT_LT((A * f.values() - flat).norm(), 1e-10 * flat.norm());
  }
  ComplexMatrix AtA = A.adjoint() * A;
  double c = 6 * g.values().squaredNorm();
  EXPECT_LT((AtA - c * ComplexMatrix::Identity(6, 6)).norm(), 1e-8 * c);
}

TEST(Gabor, RowSliceIsFourierOfProduct) {
  auto Z6 = FiniteAbelianGroup::cyclic(6);
  auto f = random_window(Z6, 3);
  auto g = random_window(Z6, 4);
  ComplexMatrix V = stft(f, g);
  SignalVector gc(Z6, g.values().conjugate());
  for (int x = 0; x < 6; ++x) {
    ComplexVector prod = f.values().cwiseProduct(translate(gc, x).values());
    ComplexVector want = fourier(SignalVector(Z6, prod)).values();
    EXPECT_LT((V.row(x).transpose() - want).norm(), 1e-10 * want.norm());
  }
}

TEST(Gabor, SupportSymmetries) {
  std::mt19937_64 rng(5);
  for (int n : {4, 5, 6}) {
    auto G = FiniteAbelianGroup::cyclic(n);
    for (int trial = 0; trial < 30; ++trial) {
      ComplexVector a = ComplexVector::Zero(n), b = ComplexVector::Zero(n);
      for (int i = 0; i < n; ++i) {
        if (rng() % 2) a(i) = Complex(1.0 + rng() % 3, 0.0);
        if (rng() % 2) b(i) = Complex(1.0, static_cast<double>(rng() % 2));
      }
      if (a.norm() == 0 || b.norm() == 0) continue;
      SignalVector f(G, a), g(G, b);
      int s = support_size(stft(f, g));
      EXPECT_EQ(s, support_size(stft(fourier(f), fourier(g))));
      EXPECT_EQ(s, support_size(stft(g, f)));
    }
  }
}

TEST(Gabor, ShearingCovarianceOnZ3) {
  // multiplying f and g by the chirp c(y) = w^{y(y-1)/2 * m} shears the STFT support:
  // (x, xi) -> (x, xi + m x)
  auto Z3 = FiniteAbelianGroup::cyclic(3);
  std::mt19937_64 rng(8);
  for (int m = 1; m < 3; ++m) {
    ComplexVector chirp(3);
    for (int y = 0; y < 3; ++y) chirp(y) = unit_root(static_cast<long long>(m) * y * (y + 2) * 2, 3);
    for (int trial = 0; trial < 20; ++trial) {
      ComplexVector a(3), b(3);
      for (int i = 0; i < 3; ++i) {
        a(i) = rng() % 3 ? Complex(1.0 + rng() % 2, 0.0) : Complex(0.0);
        b(i) = rng() % 3 ? Complex(1.0, 0.5 * (rng() % 2)) : Complex(0.0);
      }
      if (a.norm() == 0 || b.norm() == 0) continue;
      SignalVector f(Z3, a), g(Z3, b);
      SignalVector ft(Z3, a.cwiseProduct(chirp)), gt(Z3, b.cwiseProduct(chirp));
      ComplexMatrix V = stft(f, g), Vt = stft(ft, gt);
      double tv = 1e-9 * std::max(1.0, V.cwiseAbs().maxCoeff());
      double tt = 1e-9 * std::max(1.0, Vt.cwiseAbs().maxCoeff());
      // chirp ratio c(y)/c(y-x) is a character in y times a constant; find the shift per row
      for (int x = 0; x < 3; ++x) {
        bool matched = false;
        for (int s = 0; s < 3 && !matched; ++s) {
          bool ok = true;
          for (int xi = 0; xi < 3; ++xi)
            ok = ok && ((std::abs(V(x, xi)) > tv) == (std::abs(Vt(x, (xi + s) % 3)) > tt));
          matched = ok;
        }
        EXPECT_TRUE(matched);
      }
      EXPECT_EQ(support_size(V), support_size(Vt));
    }
  }
}

TEST(Gabor, FrameBounds) {
  auto Z5 = FiniteAbelianGroup::cyclic(5);
  auto g = random_window(Z5, 12);
  auto fb = frame_bounds(gabor_system(g));
  double want = 5 * g.values().squaredNorm();
  EXPECT_NEAR(fb.lower, want, 1e-8 * want);
  EXPECT_NEAR(fb.upper, want, 1e-8 * want);
  EXPECT_TRUE(fb.is_tight());

  auto Z4 = FiniteAbelianGroup::cyclic(4);
  std::vector<SignalVector> onb;
  ComplexMatrix W = dft_matrix(Z4);
  for (int r = 0; r < 4; ++r) onb.emplace_back(Z4, W.row(r).transpose() / 2.0);
  auto ob = frame_bounds(onb);
  EXPECT_NEAR(ob.lower, 1.0, 1e-12);
  EXPECT_NEAR(ob.upper, 1.0, 1e-12);

  auto Z2 = FiniteAbelianGroup::cyclic(2);
  auto e = SignalVector::delta(Z2);
  auto bad = frame_bounds({e, e});
  EXPECT_EQ(bad.lower, 0.0);
  EXPECT_FALSE(bad.is_frame());
  EXPECT_THROW(frame_bounds({}), std::invalid_argument);
}

TEST(Gabor, Windows) {
  auto Z7 = FiniteAbelianGroup::cyclic(7);
  auto u = unimodular_window(Z7, 3);
  for (int i = 0; i < 7; ++i) EXPECT_NEAR(std::abs(u[i]), 1.0, 1e-12);
  EXPECT_EQ(unimodular_window(Z7, 3).values(), u.values());
  EXPECT_EQ(random_window(Z7, 4).values(), random_window(Z7, 4).values());
  EXPECT_NE(random_window(Z7, 4).values(), random_window(Z7, 5).values());
  EXPECT_EQ(delta_window(Z7).support_size(), 1);
}

TEST(Gabor, RandomWindowOnZ5HasNoZeroMinors) {
  auto Z5 = FiniteAbelianGroup::cyclic(5);
  auto A = gabor_matrix(Z5, random_window(Z5, 1)).matrix;
  for (int r = 1; r <= 5; ++r) EXPECT_TRUE(all_minors_nonzero(A, r).all_full_rank) << r;
}

TEST(Gabor, HarmonicFrames) {
  auto h4 = harmonic_frame(4, 4);
  auto b4 = frame_bounds(h4);
  EXPECT_NEAR(b4.lower, 4.0, 1e-10);
  EXPECT_NEAR(b4.upper, 4.0, 1e-10);

  auto h24 = harmonic_frame(2, 4);
  ASSERT_EQ(h24.size(), 4u);
  auto b = frame_bounds(h24);
  EXPECT_NEAR(b.lower, 4.0, 1e-10);
  EXPECT_NEAR(b.upper, 4.0, 1e-10);
  EXPECT_THROW(harmonic_frame(3, 2), std::invalid_argument);

  // every 3 of the 7 truncated characters are independent, checked by determinants
  auto h37 = harmonic_frame(3, 7);
  for_each_subset(7, 3, [&](const std::vector<int>& s) {
    Eigen::Matrix3cd M;
    for (int i = 0; i < 3; ++i) M.row(i) = h37[s[i]].values().transpose();
    EXPECT_GT(std::abs(M.determinant()), 1e-6);
    return true;
  });
}
