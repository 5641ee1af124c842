#include "radcom/hermitian.hpp"

#include <atomic>
#include <cmath>
#include <iostream>
#include <sstream>

namespace radcom {

namespace {

std::atomic<WarnHandler> g_warn_handler{nullptr};

void default_warn(const std::string& message) {
  std::cerr << "radcom: warning: " << message << "\n";
}

}  // namespace

void set_warn_handler(WarnHandler handler) { g_warn_handler.store(handler); }

void warn(const std::string& message) {
  WarnHandler h = g_warn_handler.load();
  (h ? h : default_warn)(message);
}

HermitianMatrix::HermitianMatrix(const CMatrix& m, double tol) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw ContractError("HermitianMatrix: matrix must be square and non-empty");
  }
  const double scale = 1.0 + m.cwiseAbs().maxCoeff();
  const double dev = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (!(dev <= tol * scale)) {
    std::ostringstream os;
    os << "HermitianMatrix: input deviates from Hermitian by " << dev
       << " (allowed " << tol * scale << ")";
    throw ContractError(os.str());
  }
  mat_ = 0.5 * (m + m.adjoint().eval());
}

HermitianMatrix HermitianMatrix::outer(const CVector& v) {
  if (v.size() == 0) throw ContractError("HermitianMatrix::outer: empty vector");
  CMatrix m = v * v.adjoint();
  // v v^H is Hermitian by construction up to roundoff; symmetrize exactly.
  m = 0.5 * (m + m.adjoint().eval());
  return HermitianMatrix(std::move(m), Trusted{});
}

HermitianMatrix HermitianMatrix::zero(int dim) {
  if (dim <= 0) throw ContractError("HermitianMatrix::zero: dim must be positive");
  return HermitianMatrix(CMatrix::Zero(dim, dim), Trusted{});
}

HermitianMatrix HermitianMatrix::identity(int dim) {
  if (dim <= 0) throw ContractError("HermitianMatrix::identity: dim must be positive");
  return HermitianMatrix(CMatrix::Identity(dim, dim), Trusted{});
}

double herm_inner(const HermitianMatrix& a, const HermitianMatrix& b) {
  if (a.dim() != b.dim()) throw ContractError("herm_inner: dimension mismatch");
  // tr(AB) = sum_ij A_ij conj(B_ij) for Hermitian A, B; imaginary parts cancel.
  return a.mat().cwiseProduct(b.mat().conjugate()).sum().real();
}

HermitianMatrix herm_add(const HermitianMatrix& a, const HermitianMatrix& b) {
  if (a.dim() != b.dim()) throw ContractError("herm_add: dimension mismatch");
  return HermitianMatrix(a.mat() + b.mat());
}

HermitianMatrix herm_scale(const HermitianMatrix& a, double factor) {
  return HermitianMatrix(factor * a.mat());
}

EigenPair eigen_max(const HermitianMatrix& h) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h.mat());
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("eigen_max: eigensolver failed to converge");
  }
  const int last = h.dim() - 1;  // eigenvalues come back ascending
  EigenPair out;
  out.value = es.eigenvalues()(last);
  out.vector = es.eigenvectors().col(last);
  // Deterministic phase: make the first non-negligible component real > 0.
  const double thresh = 1e-12 * out.vector.cwiseAbs().maxCoeff();
  for (int i = 0; i < out.vector.size(); ++i) {
    const double a = std::abs(out.vector(i));
    if (a > thresh) {
      out.vector *= std::conj(out.vector(i)) / a;
      break;
    }
  }
  return out;
}

double min_eigenvalue(const HermitianMatrix& h) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h.mat(), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("min_eigenvalue: eigensolver failed to converge");
  }
  return es.eigenvalues()(0);
}

bool is_psd(const HermitianMatrix& h) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h.mat(), Eigen::EigenvaluesOnly);
  const double lmax = es.eigenvalues()(h.dim() - 1);
  const double lmin = es.eigenvalues()(0);
  return lmin >= -kPsdTol * (1.0 + std::max(lmax, 0.0));
}

HermitianMatrix clip_psd(const HermitianMatrix& h) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h.mat());
  RVector vals = es.eigenvalues();
  const double lmax = std::max(vals(h.dim() - 1), 0.0);
  const double allowed = kPsdTol * (1.0 + lmax);
  double clipped = 0.0;
  for (int i = 0; i < vals.size(); ++i) {
    if (vals(i) < 0.0) {
      clipped = std::max(clipped, -vals(i));
      vals(i) = 0.0;
    }
  }
  if (clipped > allowed) {
    std::ostringstream os;
    os << "clip_psd: clipped eigenvalue " << -clipped
       << " beyond PSD tolerance " << -allowed;
    warn(os.str());
  }
  CMatrix m = es.eigenvectors() * vals.asDiagonal() *
              es.eigenvectors().adjoint();
  return HermitianMatrix(m);
}

double rank_one_residual(const HermitianMatrix& w) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(w.mat(), Eigen::EigenvaluesOnly);
  const double lmax = es.eigenvalues()(w.dim() - 1);
  const double lmin = es.eigenvalues()(0);
  if (lmin < -kPsdTol * (1.0 + std::max(lmax, 0.0))) {
    std::ostringstream os;
    os << "rank_one_residual: input is not PSD (lambda_min = " << lmin << ")";
    throw ContractError(os.str());
  }
  return w.trace() - lmax;
}

CVector extract_rank_one(const HermitianMatrix& w, double residual_bound) {
  const double r = rank_one_residual(w);
  if (!(r <= residual_bound)) {
    std::ostringstream os;
    os << "extract_rank_one: residual " << r << " exceeds bound "
       << residual_bound;
    throw ExtractionError(os.str());
  }
  EigenPair top = eigen_max(w);
  return std::sqrt(std::max(top.value, 0.0)) * top.vector;
}

RMatrix real_embed(const HermitianMatrix& h) {
  const int n = h.dim();
  RMatrix t(2 * n, 2 * n);
  const RMatrix re = h.mat().real();
  const RMatrix im = h.mat().imag();
  t.topLeftCorner(n, n) = re;
  t.topRightCorner(n, n) = -im;
  t.bottomLeftCorner(n, n) = im;
  t.bottomRightCorner(n, n) = re;
  return t;
}

HermitianMatrix hermitian_from_embed(const RMatrix& s) {
  if (s.rows() != s.cols() || s.rows() % 2 != 0 || s.rows() == 0) {
    throw ContractError("hermitian_from_embed: need a square 2n x 2n matrix");
  }
  const int n = static_cast<int>(s.rows()) / 2;
  const RMatrix sym = 0.5 * (s + s.transpose().eval());
  const RMatrix re = 0.5 * (sym.topLeftCorner(n, n) + sym.bottomRightCorner(n, n));
  // Antisymmetric part of the lower-left block; equals Im H on embedded input.
  const RMatrix im = 0.5 * (sym.bottomLeftCorner(n, n) -
                            sym.bottomLeftCorner(n, n).transpose().eval());
  CMatrix h = re.cast<Complex>() + Complex(0.0, 1.0) * im.cast<Complex>();
  return HermitianMatrix(h);
}

}  // namespace radcom
