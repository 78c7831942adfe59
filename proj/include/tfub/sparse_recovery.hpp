#pragma once

#include "tfub/gabor.hpp"
#include "tfub/rank.hpp"

#include <Eigen/QR>

#include <optional>
#include <string>
#include <vector>

namespace tfub {

struct RobustnessCertificate {
  bool robust = false;
  std::optional<std::vector<int>> dependent_subset;  // indices into the frame
  std::uint64_t checked = 0;
};

/// True iff every dim-sized subset of the frame is linearly independent.
inline RobustnessCertificate certify_max_robust(const std::vector<SignalVector>& frame,
                                                const EnumerationOptions& opt = {}) {
  if (frame.empty()) throw std::invalid_argument("empty frame");
  int dim = frame.front().size();
  if (static_cast<int>(frame.size()) < dim) throw std::invalid_argument("frame smaller than dimension");
  ComplexMatrix M = analysis_matrix(frame);
  auto r = all_row_subsets_full_rank(M, dim, opt);
  RobustnessCertificate c;
  c.robust = r.all_full_rank;
  c.checked = r.checked;
  if (r.rows) c.dependent_subset = r.rows;
  return c;
}

struct ErasurePattern {
  std::vector<int> kept;
};

enum class RecoveryStatus { Recovered, NotAFrame };

struct ErasureRecovery {
  RecoveryStatus status = RecoveryStatus::NotAFrame;
  std::optional<SignalVector> signal;
  int kept_rank = 0;
};

/// Reconstructs f from the kept analysis coefficients <f, phi_k> via the pseudo-inverse.
inline ErasureRecovery erase_and_recover(const SignalVector& f, const std::vector<SignalVector>& frame,
                                         const ErasurePattern& pattern, double tol = kDefaultRankTol) {
  ComplexMatrix M = analysis_matrix(frame);
  ErasureRecovery out;
  if (pattern.kept.empty()) return out;
  std::vector<int> cols = first_subset(static_cast<int>(M.cols()));
  ComplexMatrix K = submatrix(M, pattern.kept, cols);
  ComplexVector coeff = K * f.values();
  Eigen::JacobiSVD<ComplexMatrix> svd(K, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  auto rep = rank_from_singular_values(std::vector<double>(s.data(), s.data() + s.size()), K.rows(), K.cols(), tol);
  out.kept_rank = rep.rank;
  if (rep.rank < M.cols()) return out;
  out.status = RecoveryStatus::Recovered;
  out.signal = SignalVector(f.group(), svd.solve(coeff), f.zero_tol());
  return out;
}

enum class DecodeStatus { Unique, Ambiguous, NoFit };

inline std::string to_string(DecodeStatus s) {
  switch (s) {
    case DecodeStatus::Unique: return "Unique";
    case DecodeStatus::Ambiguous: return "Ambiguous";
    default: return "NoFit";
  }
}

struct SparseDecodeResult {
  DecodeStatus status = DecodeStatus::NoFit;
  ComplexVector coefficients;                 // the unique (or first) consistent solution
  std::optional<ComplexVector> alternative;   // a second consistent solution when ambiguous
  std::vector<int> support;
  std::uint64_t supports_checked = 0;
  double residual = 0.0;
};

inline constexpr double kFitResidual = 1e-8;

/// Exhaustive l0 decoding: every support of size min(k, cols) is fitted by least squares on the
/// sampled rows; all consistent solutions are collected so that ambiguity is reported.
inline SparseDecodeResult l0_decode(const ComplexMatrix& D, const std::vector<int>& sample_rows,
                                    const ComplexVector& samples, int k, std::uint64_t max_supports = 5'000'000) {
  int nc = static_cast<int>(D.cols());
  if (static_cast<Eigen::Index>(sample_rows.size()) != samples.size())
    throw std::invalid_argument("sample count mismatch");
  if (k < 0) throw std::invalid_argument("negative sparsity");
  SparseDecodeResult res;
  res.coefficients = ComplexVector::Zero(nc);
  double snorm = samples.norm();
  double thr = kFitResidual * std::max(snorm, 1e-300);
  if (k == 0 || snorm == 0.0) {
    res.status = snorm <= kFitResidual ? DecodeStatus::Unique : DecodeStatus::NoFit;
    return res;
  }
  int kk = std::min(k, nc);
  if (binomial(nc, kk) > max_supports) throw std::length_error("l0_decode guard exceeded");
  std::vector<ComplexVector> found;
  auto distinct = [](const ComplexVector& a, const ComplexVector& b) {
    return (a - b).norm() > 1e-6 * std::max(a.norm(), b.norm());
  };
  auto record = [&](const ComplexVector& c) {
    for (auto& e : found)
      if (!distinct(e, c)) return;
    found.push_back(c);
  };
  ComplexMatrix S(static_cast<Eigen::Index>(sample_rows.size()), kk);
  for_each_subset(nc, kk, [&](const std::vector<int>& supp) {
    ++res.supports_checked;
    for (int j = 0; j < kk; ++j)
      for (std::size_t i = 0; i < sample_rows.size(); ++i)
        S(static_cast<Eigen::Index>(i), j) = D(sample_rows[i], supp[static_cast<std::size_t>(j)]);
    Eigen::ColPivHouseholderQR<ComplexMatrix> qr(S);
    ComplexVector x = qr.solve(samples);
    double resid = (S * x - samples).norm();
    if (resid > thr) return true;
    ComplexVector c = ComplexVector::Zero(nc);
    for (int j = 0; j < kk; ++j) c(supp[static_cast<std::size_t>(j)]) = x(j);
    record(c);
    Eigen::JacobiSVD<ComplexMatrix> svd(S, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    auto rep = rank_from_singular_values(std::vector<double>(s.data(), s.data() + s.size()), S.rows(), S.cols(),
                                         kDefaultRankTol);
    if (rep.rank < kk) {
      // a kernel direction inside the support gives a second sparse solution
      ComplexVector v = svd.matrixV().col(kk - 1);
      ComplexVector c2 = c;
      double scale = std::max(1.0, x.norm());
      for (int j = 0; j < kk; ++j) c2(supp[static_cast<std::size_t>(j)]) += scale * v(j);
      record(c2);
    }
    return true;
  });
  if (found.empty()) return res;
  res.coefficients = found.front();
  res.support.clear();
  double cmax = res.coefficients.cwiseAbs().maxCoeff();
  for (int i = 0; i < nc; ++i)
    if (std::abs(res.coefficients(i)) > kDefaultZeroTol * std::max(1.0, cmax)) res.support.push_back(i);
  ComplexVector fitted(static_cast<Eigen::Index>(sample_rows.size()));
  for (std::size_t i = 0; i < sample_rows.size(); ++i) {
    Complex acc = 0.0;
    for (int j = 0; j < nc; ++j) acc += D(sample_rows[i], j) * res.coefficients(j);
    fitted(static_cast<Eigen::Index>(i)) = acc;
  }
  res.residual = (fitted - samples).norm();
  if (found.size() == 1) {
    res.status = DecodeStatus::Unique;
  } else {
    res.status = DecodeStatus::Ambiguous;
    res.alternative = found[1];
  }
  return res;
}

/// Characters of G as columns: D(x, xi) = <xi, x>, so D c = |G| * inverse_fourier(c).
inline ComplexMatrix character_dictionary(const FiniteAbelianGroup& G) { return dft_matrix(G).transpose(); }

/// Gabor dictionary: column x*|G| + xi is pi(x, xi) g.
inline ComplexMatrix gabor_dictionary(const SignalVector& g) {
  return gabor_matrix(g.group(), g).matrix.adjoint();
}

struct StftRecovery {
  DecodeStatus status = DecodeStatus::NoFit;
  std::optional<SignalVector> signal;
  std::optional<SignalVector> alternative;
  double residual = 0.0;
};

/// f with |supp f| <= k from the STFT samples on Lambda (flat time-frequency indices).
inline StftRecovery recover_from_stft_samples(const SignalVector& g, const std::vector<int>& Lambda,
                                              const ComplexVector& samples, int k) {
  ComplexMatrix A = gabor_matrix(g.group(), g).matrix;
  auto d = l0_decode(A, Lambda, samples, k);
  StftRecovery r;
  r.status = d.status;
  r.residual = d.residual;
  if (d.status != DecodeStatus::NoFit) r.signal = SignalVector(g.group(), d.coefficients);
  if (d.alternative) r.alternative = SignalVector(g.group(), *d.alternative);
  return r;
}

struct OperatorClass {
  std::vector<TimeFrequencyIndex> Lambda;
  std::vector<Complex> coefficients;
};

struct SynthesisDecode {
  DecodeStatus status = DecodeStatus::NoFit;
  OperatorClass op;
  std::optional<ComplexVector> alternative;  // dictionary coefficients of a second explanation
  double residual = 0.0;
};

/// f = sum_{lambda in Lambda} c_lambda pi(lambda) g from r_B f, with |Lambda| <= max_terms and
/// Lambda unknown to the decoder.
inline SynthesisDecode gabor_synthesis_decode(const SignalVector& g, const std::vector<int>& B,
                                              const ComplexVector& samples, int max_terms) {
  int n = g.group().order();
  ComplexMatrix D = gabor_dictionary(g);
  auto d = l0_decode(D, B, samples, max_terms);
  SynthesisDecode out;
  out.status = d.status;
  out.residual = d.residual;
  out.alternative = d.alternative;
  for (int idx : d.support) {
    out.op.Lambda.push_back(TimeFrequencyIndex::from_flat(idx, n));
    out.op.coefficients.push_back(d.coefficients(idx));
  }
  return out;
}

enum class IdentifyStatus { Identified, NotIdentifiable, Singular };

inline std::string to_string(IdentifyStatus s) {
  switch (s) {
    case IdentifyStatus::Identified: return "Identified";
    case IdentifyStatus::NotIdentifiable: return "NotIdentifiable";
    default: return "Singular";
  }
}

struct OperatorIdentification {
  IdentifyStatus status = IdentifyStatus::NotIdentifiable;
  std::vector<Complex> coefficients;
  double residual = 0.0;
};

/// Applies H = sum c_lambda pi(lambda) to g.
inline SignalVector apply_operator(const OperatorClass& H, const SignalVector& g) {
  ComplexVector out = ComplexVector::Zero(g.size());
  for (std::size_t i = 0; i < H.Lambda.size(); ++i)
    out += H.coefficients[i] * tf_shift(g, H.Lambda[i].x, H.Lambda[i].xi).values();
  return SignalVector(g.group(), out, g.zero_tol());
}

/// Recovers c_lambda from H g when Lambda is known.
inline OperatorIdentification identify_operator(const SignalVector& g, const std::vector<TimeFrequencyIndex>& Lambda,
                                                const SignalVector& observed, double tol = kDefaultRankTol) {
  int n = g.group().order();
  OperatorIdentification out;
  if (static_cast<int>(Lambda.size()) > n) return out;
  ComplexMatrix S(n, static_cast<Eigen::Index>(Lambda.size()));
  for (std::size_t j = 0; j < Lambda.size(); ++j)
    S.col(static_cast<Eigen::Index>(j)) = tf_shift(g, Lambda[j].x, Lambda[j].xi).values();
  Eigen::JacobiSVD<ComplexMatrix> svd(S, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  auto rep = rank_from_singular_values(std::vector<double>(s.data(), s.data() + s.size()), S.rows(), S.cols(), tol);
  if (rep.rank < static_cast<int>(Lambda.size())) {
    out.status = IdentifyStatus::Singular;
    return out;
  }
  ComplexVector c = svd.solve(observed.values());
  out.residual = (S * c - observed.values()).norm();
  out.coefficients.assign(c.data(), c.data() + c.size());
  out.status = IdentifyStatus::Identified;
  return out;
}

}  // namespace tfub
