#pragma once

// Dense complex Hermitian matrix utilities shared by every optimization module:
//
//   * validated Hermitian storage (construction symmetrizes and rejects inputs
//     that are not Hermitian within tolerance),
//   * dominant eigenpair with a deterministic sign convention,
//   * rank-one residual  r(W) = tr(W) - lambda_max(W)  for PSD W,
//   * rank-one factor extraction  W ~= w w^H  with an a-priori Frobenius bound,
//   * real symmetric embedding  T(H) = [Re H, -Im H; Im H, Re H]  and its
//     structure-restoring inverse.
//
// For PSD W with eigenvalues l1 >= l2 >= ... >= ln >= 0 the residual is
// r(W) = sum_{i>=2} l_i, so r(W) = 0 iff rank(W) <= 1, and the dominant factor
// w = sqrt(l1) v1 obeys ||W - w w^H||_F = sqrt(sum_{i>=2} l_i^2) <= r(W)
// <= sqrt(2 r(W) tr(W)) whenever r(W) <= 2 tr(W).
//
// The embedding T is a *-algebra isomorphism onto the centralizer of
// J = [0, -I; I, 0]: T(H) is symmetric PSD iff H is Hermitian PSD, eigenvalues
// double up, and tr(T(H)) = 2 tr(H). The inverse averages S with J S J^T, so
// arbitrary symmetric matrices are projected back onto embedded structure.

#include <utility>

#include "radcom/types.hpp"

namespace radcom {

// Relative tolerance used to decide whether an input matrix is Hermitian.
inline constexpr double kHermitianTol = 1e-9;

// A matrix H is accepted as PSD when lambda_min(H) >= -1e-9 * (1 + lambda_max).
inline constexpr double kPsdTol = 1e-9;

// Thin validated wrapper: the stored matrix is exactly Hermitian because the
// constructor averages M with M^H after checking the deviation is tiny.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  explicit HermitianMatrix(const CMatrix& m, double tol = kHermitianTol);

  // v v^H without any validation cost.
  static HermitianMatrix outer(const CVector& v);
  static HermitianMatrix zero(int dim);
  static HermitianMatrix identity(int dim);

  int dim() const { return static_cast<int>(mat_.rows()); }
  const CMatrix& mat() const { return mat_; }
  double trace() const { return mat_.trace().real(); }
  Complex operator()(int i, int j) const { return mat_(i, j); }

 private:
  struct Trusted {};
  HermitianMatrix(CMatrix m, Trusted) : mat_(std::move(m)) {}
  CMatrix mat_;
};

// tr(A B) for Hermitian A, B is real; computed without forming the product.
double herm_inner(const HermitianMatrix& a, const HermitianMatrix& b);

HermitianMatrix herm_add(const HermitianMatrix& a, const HermitianMatrix& b);
HermitianMatrix herm_scale(const HermitianMatrix& a, double factor);

struct EigenPair {
  double value = 0.0;
  CVector vector;  // unit norm; first component above threshold is real > 0
};

// Largest eigenvalue and eigenvector. The eigenvector phase is fixed by
// rotating so that the first component with |v_i| > 1e-12 * max_i |v_i| is
// real and positive, which makes results reproducible across runs.
EigenPair eigen_max(const HermitianMatrix& h);

double min_eigenvalue(const HermitianMatrix& h);

// lambda_min >= -kPsdTol * (1 + lambda_max)?
bool is_psd(const HermitianMatrix& h);

// Zero out negative eigenvalues. Emits a warning through warn() when the
// clipped mass exceeds the PSD tolerance (that indicates a genuinely
// indefinite input rather than roundoff).
HermitianMatrix clip_psd(const HermitianMatrix& h);

// r(W) = tr(W) - lambda_max(W). Requires W PSD within tolerance; a clearly
// indefinite input is a contract violation.
double rank_one_residual(const HermitianMatrix& w);

// w = sqrt(lambda_max) v_max. Requires rank_one_residual(w) <= residual_bound,
// otherwise throws ExtractionError. Guarantees
// ||W - w w^H||_F <= sqrt(2 * residual_bound * tr(W)).
CVector extract_rank_one(const HermitianMatrix& w, double residual_bound);

// T(H) = [Re H, -Im H; Im H, Re H]  (2n x 2n real symmetric).
RMatrix real_embed(const HermitianMatrix& h);

// Inverse of real_embed extended to arbitrary symmetric S by averaging with
// J S J^T first: H = (S11 + S22)/2 + i (S21 - S21^T)/2. Exact on embedded
// inputs; a projection onto embedded structure otherwise.
HermitianMatrix hermitian_from_embed(const RMatrix& s);

}  // namespace radcom
