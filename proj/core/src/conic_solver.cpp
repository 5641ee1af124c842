#include "radcom/conic_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <tuple>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

namespace radcom {

namespace {

constexpr double kSqrt2 = 1.4142135623730950488;
constexpr double kStepBack = 0.99;  // fraction of the distance to the boundary


// ---------------------------------------------------------------------------
// Packed symmetric / Hermitian coordinates ("svec"), matching ConeProgram:
// column-major lower triangle for the real case, [diagonal..., (re, im)
// pairs...] for the Hermitian case. Off-diagonal coordinates carry a factor
// sqrt(2) so packed Euclidean inner products equal trace inner products.
// ---------------------------------------------------------------------------

RMatrix unsvec_sym(const Eigen::Ref<const RVector>& v, int d) {
  RMatrix m(d, d);
  int k = 0;
  for (int j = 0; j < d; ++j) {
    m(j, j) = v(k++);
    for (int i = j + 1; i < d; ++i, ++k) {
      m(i, j) = m(j, i) = v(k) / kSqrt2;
    }
  }
  return m;
}

void svec_sym(const RMatrix& m, Eigen::Ref<RVector> v) {
  const int d = static_cast<int>(m.rows());
  int k = 0;
  for (int j = 0; j < d; ++j) {
    v(k++) = m(j, j);
    for (int i = j + 1; i < d; ++i, ++k) {
      v(k) = kSqrt2 * 0.5 * (m(i, j) + m(j, i));
    }
  }
}

CMatrix unsvec_herm(const Eigen::Ref<const RVector>& v, int d) {
  CMatrix m(d, d);
  for (int i = 0; i < d; ++i) m(i, i) = v(i);
  int k = d;
  for (int j = 0; j < d; ++j) {
    for (int i = j + 1; i < d; ++i, k += 2) {
      const Complex c(v(k) / kSqrt2, v(k + 1) / kSqrt2);
      m(i, j) = c;
      m(j, i) = std::conj(c);
    }
  }
  return m;
}

void svec_herm(const CMatrix& m, Eigen::Ref<RVector> v) {
  const int d = static_cast<int>(m.rows());
  for (int i = 0; i < d; ++i) v(i) = m(i, i).real();
  int k = d;
  for (int j = 0; j < d; ++j) {
    for (int i = j + 1; i < d; ++i, k += 2) {
      v(k) = kSqrt2 * m(i, j).real();
      v(k + 1) = kSqrt2 * m(i, j).imag();
    }
  }
}

struct ConeBlock {
  enum Type { kOrthant, kSoc, kPsdReal, kPsdHerm } type = kOrthant;
  int offset = 0;      // first row in s/z
  int dim = 0;         // number of rows
  int d = 0;           // matrix dimension for PSD blocks
  int var_offset = 0;  // PSD: first canonical variable of the block
  double kappa = 1.0;  // PSD rows equal -kappa * I after equilibration
};

// Nesterov-Todd scaling data for one cone block.
struct Scaling {
  // orthant
  RVector theta;  // z ./ s
  RVector w;      // sqrt(s ./ z)
  // second-order cone
  double eta = 1.0, eta2 = 1.0;
  RVector wbar;
  // PSD (one of the two families populated)
  RMatrix r_re, rinv_re, q_re, qinv_re;
  CMatrix r_cx, rinv_cx, q_cx, qinv_cx;
  RMatrix theta_mat;  // packed operator of U -> Qinv U Qinv
  RVector lam_diag;   // PSD scaled eigenvalues
  // all cones: scaled point lambda = W z = W^{-T} s
  RVector lambda;
};

double cone_min_eig(const ConeBlock& cb, const Eigen::Ref<const RVector>& u) {
  switch (cb.type) {
    case ConeBlock::kOrthant:
      return u.minCoeff();
    case ConeBlock::kSoc:
      return u(0) - u.tail(cb.dim - 1).norm();
    case ConeBlock::kPsdReal: {
      Eigen::SelfAdjointEigenSolver<RMatrix> es(unsvec_sym(u, cb.d),
                                                Eigen::EigenvaluesOnly);
      return es.eigenvalues()(0);
    }
    case ConeBlock::kPsdHerm: {
      Eigen::SelfAdjointEigenSolver<CMatrix> es(unsvec_herm(u, cb.d),
                                                Eigen::EigenvaluesOnly);
      return es.eigenvalues()(0);
    }
  }
  return 0.0;
}

void cone_add_identity(const ConeBlock& cb, Eigen::Ref<RVector> u, double c) {
  switch (cb.type) {
    case ConeBlock::kOrthant:
      u.array() += c;
      break;
    case ConeBlock::kSoc:
      u(0) += c;
      break;
    case ConeBlock::kPsdReal: {
      int k = 0;
      for (int j = 0; j < cb.d; ++j) {
        u(k) += c;
        k += cb.d - j;
      }
      break;
    }
    case ConeBlock::kPsdHerm:
      u.head(cb.d).array() += c;
      break;
  }
}

// Largest t >= 0 with u + t du in the cone, assuming u strictly interior.
double cone_max_step(const ConeBlock& cb, const Eigen::Ref<const RVector>& u,
                     const Eigen::Ref<const RVector>& du) {
  switch (cb.type) {
    case ConeBlock::kOrthant: {
      double t = kInf;
      for (int i = 0; i < cb.dim; ++i) {
        if (du(i) < 0.0) t = std::min(t, -u(i) / du(i));
      }
      return t;
    }
    case ConeBlock::kSoc: {
      const int q = cb.dim;
      const double a = du(0) * du(0) - du.tail(q - 1).squaredNorm();
      const double b =
          2.0 * (u(0) * du(0) - u.tail(q - 1).dot(du.tail(q - 1)));
      const double c = u(0) * u(0) - u.tail(q - 1).squaredNorm();
      double best = kInf;
      auto consider = [&best](double t) {
        if (t > 0.0 && t < best) best = t;
      };
      if (std::abs(a) < 1e-300) {
        if (b < 0.0) consider(-c / b);
        return best;
      }
      const double disc = b * b - 4.0 * a * c;
      if (disc < 0.0) return best;
      const double sq = std::sqrt(disc);
      const double qq = -0.5 * (b + (b >= 0.0 ? sq : -sq));
      consider(qq / a);
      if (qq != 0.0) consider(c / qq);
      return best;
    }
    case ConeBlock::kPsdReal: {
      const RMatrix um = unsvec_sym(u, cb.d);
      const RMatrix dm = unsvec_sym(du, cb.d);
      Eigen::LLT<RMatrix> llt(um);
      if (llt.info() != Eigen::Success) return 0.0;
      const RMatrix l = llt.matrixL();
      const RMatrix w = l.triangularView<Eigen::Lower>().solve(dm);
      const RMatrix gen =
          l.triangularView<Eigen::Lower>().solve(w.transpose()).transpose();
      Eigen::SelfAdjointEigenSolver<RMatrix> es(
          RMatrix(0.5 * (gen + gen.transpose())), Eigen::EigenvaluesOnly);
      const double lmin = es.eigenvalues()(0);
      return lmin >= 0.0 ? kInf : 1.0 / (-lmin);
    }
    case ConeBlock::kPsdHerm: {
      const CMatrix um = unsvec_herm(u, cb.d);
      const CMatrix dm = unsvec_herm(du, cb.d);
      Eigen::LLT<CMatrix> llt(um);
      if (llt.info() != Eigen::Success) return 0.0;
      const CMatrix l = llt.matrixL();
      const CMatrix w = l.triangularView<Eigen::Lower>().solve(dm);
      const CMatrix gen =
          l.triangularView<Eigen::Lower>().solve(w.adjoint()).adjoint();
      Eigen::SelfAdjointEigenSolver<CMatrix> es(
          CMatrix(0.5 * (gen + gen.adjoint())), Eigen::EigenvaluesOnly);
      const double lmin = es.eigenvalues()(0);
      return lmin >= 0.0 ? kInf : 1.0 / (-lmin);
    }
  }
  return 0.0;
}

// Packed operator of U -> M U M for symmetric/Hermitian M.
RMatrix congruence_operator_sym(const RMatrix& m) {
  const int d = static_cast<int>(m.rows());
  const int t = d * (d + 1) / 2;
  RMatrix op(t, t);
  RMatrix basis = RMatrix::Zero(d, d);
  RVector col(t);
  int k = 0;
  for (int j = 0; j < d; ++j) {
    for (int i = j; i < d; ++i, ++k) {
      const double v = i == j ? 1.0 : 1.0 / kSqrt2;
      basis(i, j) = v;
      basis(j, i) = v;
      const RMatrix prod = m * basis * m;
      svec_sym(prod, col);
      op.col(k) = col;
      basis(i, j) = 0.0;
      basis(j, i) = 0.0;
    }
  }
  return op;
}

RMatrix congruence_operator_herm(const CMatrix& m) {
  const int d = static_cast<int>(m.rows());
  const int t = d * d;
  RMatrix op(t, t);
  CMatrix basis = CMatrix::Zero(d, d);
  RVector col(t);
  auto emit = [&](int k) {
    const CMatrix prod = m * basis * m.adjoint();
    svec_herm(prod, col);
    op.col(k) = col;
  };
  for (int i = 0; i < d; ++i) {
    basis(i, i) = 1.0;
    emit(i);
    basis(i, i) = 0.0;
  }
  int k = d;
  for (int j = 0; j < d; ++j) {
    for (int i = j + 1; i < d; ++i, k += 2) {
      basis(i, j) = 1.0 / kSqrt2;
      basis(j, i) = 1.0 / kSqrt2;
      emit(k);
      basis(i, j) = Complex(0.0, 1.0 / kSqrt2);
      basis(j, i) = Complex(0.0, -1.0 / kSqrt2);
      emit(k + 1);
      basis(i, j) = 0.0;
      basis(j, i) = 0.0;
    }
  }
  return op;
}

bool compute_scaling(const ConeBlock& cb, const Eigen::Ref<const RVector>& s,
                     const Eigen::Ref<const RVector>& z, Scaling& sc) {
  switch (cb.type) {
    case ConeBlock::kOrthant: {
      if (s.minCoeff() <= 0.0 || z.minCoeff() <= 0.0) return false;
      sc.theta = z.cwiseQuotient(s);
      sc.w = s.cwiseQuotient(z).cwiseSqrt();
      sc.lambda = s.cwiseProduct(z).cwiseSqrt();
      return true;
    }
    case ConeBlock::kSoc: {
      const int q = cb.dim;
      const double sj = s(0) * s(0) - s.tail(q - 1).squaredNorm();
      const double zj = z(0) * z(0) - z.tail(q - 1).squaredNorm();
      if (sj <= 0.0 || zj <= 0.0 || s(0) <= 0.0 || z(0) <= 0.0) return false;
      const RVector sbar = s / std::sqrt(sj);
      const RVector zbar = z / std::sqrt(zj);
      const double gamma = std::sqrt(0.5 * (1.0 + sbar.dot(zbar)));
      RVector wbar(q);
      wbar(0) = (sbar(0) + zbar(0)) / (2.0 * gamma);
      wbar.tail(q - 1) = (sbar.tail(q - 1) - zbar.tail(q - 1)) / (2.0 * gamma);
      sc.wbar = wbar;
      sc.eta2 = std::sqrt(sj / zj);
      sc.eta = std::sqrt(sc.eta2);
      // lambda = eta * Wbar z with Wbar the hyperbolic Householder map.
      const double wz = wbar(0) * z(0) + wbar.tail(q - 1).dot(z.tail(q - 1));
      RVector lam(q);
      lam(0) = sc.eta * wz;
      lam.tail(q - 1) =
          sc.eta * (z.tail(q - 1) +
                    (wz + z(0)) / (1.0 + wbar(0)) * wbar.tail(q - 1));
      sc.lambda = lam;
      return true;
    }
    case ConeBlock::kPsdReal: {
      const RMatrix sm = unsvec_sym(s, cb.d);
      const RMatrix zm = unsvec_sym(z, cb.d);
      Eigen::LLT<RMatrix> ls(sm), lz(zm);
      if (ls.info() != Eigen::Success || lz.info() != Eigen::Success) {
        return false;
      }
      const RMatrix lsm = ls.matrixL();
      const RMatrix lzm = lz.matrixL();
      Eigen::JacobiSVD<RMatrix> svd(RMatrix(lzm.transpose() * lsm),
                                    Eigen::ComputeFullU | Eigen::ComputeFullV);
      const RVector sig = svd.singularValues();
      if (sig(sig.size() - 1) <= 0.0) return false;
      const RVector sq = sig.cwiseSqrt();
      sc.r_re = lsm * svd.matrixV() * sq.cwiseInverse().asDiagonal();
      sc.rinv_re = sq.asDiagonal() * svd.matrixV().transpose() *
                   lsm.triangularView<Eigen::Lower>().solve(
                       RMatrix::Identity(cb.d, cb.d));
      sc.q_re = sc.r_re * sc.r_re.transpose();
      sc.qinv_re = sc.rinv_re.transpose() * sc.rinv_re;
      sc.theta_mat = congruence_operator_sym(sc.qinv_re);
      sc.lam_diag = sig;
      sc.lambda.setZero(cb.dim);
      int k = 0;
      for (int j = 0; j < cb.d; ++j) {
        sc.lambda(k) = sig(j);
        k += cb.d - j;
      }
      return true;
    }
    case ConeBlock::kPsdHerm: {
      const CMatrix sm = unsvec_herm(s, cb.d);
      const CMatrix zm = unsvec_herm(z, cb.d);
      Eigen::LLT<CMatrix> ls(sm), lz(zm);
      if (ls.info() != Eigen::Success || lz.info() != Eigen::Success) {
        return false;
      }
      const CMatrix lsm = ls.matrixL();
      const CMatrix lzm = lz.matrixL();
      Eigen::JacobiSVD<CMatrix> svd(CMatrix(lzm.adjoint() * lsm),
                                    Eigen::ComputeFullU | Eigen::ComputeFullV);
      const RVector sig = svd.singularValues();
      if (sig(sig.size() - 1) <= 0.0) return false;
      const RVector sq = sig.cwiseSqrt();
      sc.r_cx = lsm * svd.matrixV() * sq.cwiseInverse().asDiagonal();
      sc.rinv_cx = CMatrix(sq.cast<Complex>().asDiagonal()) *
                   svd.matrixV().adjoint() *
                   lsm.triangularView<Eigen::Lower>().solve(
                       CMatrix::Identity(cb.d, cb.d));
      sc.q_cx = sc.r_cx * sc.r_cx.adjoint();
      sc.qinv_cx = sc.rinv_cx.adjoint() * sc.rinv_cx;
      sc.theta_mat = congruence_operator_herm(sc.qinv_cx);
      sc.lam_diag = sig;
      sc.lambda.setZero(cb.dim);
      sc.lambda.head(cb.d) = sig;
      return true;
    }
  }
  return false;
}

Scaling identity_scaling(const ConeBlock& cb) {
  Scaling sc;
  switch (cb.type) {
    case ConeBlock::kOrthant:
      sc.theta = RVector::Ones(cb.dim);
      sc.w = RVector::Ones(cb.dim);
      sc.lambda = RVector::Ones(cb.dim);
      break;
    case ConeBlock::kSoc:
      sc.eta = sc.eta2 = 1.0;
      sc.wbar = RVector::Zero(cb.dim);
      sc.wbar(0) = 1.0;
      sc.lambda = sc.wbar;
      break;
    case ConeBlock::kPsdReal:
      sc.q_re = sc.qinv_re = RMatrix::Identity(cb.d, cb.d);
      sc.r_re = sc.rinv_re = sc.q_re;
      sc.theta_mat = RMatrix::Identity(cb.dim, cb.dim);
      sc.lam_diag = RVector::Ones(cb.d);
      break;
    case ConeBlock::kPsdHerm:
      sc.q_cx = sc.qinv_cx = CMatrix::Identity(cb.d, cb.d);
      sc.r_cx = sc.rinv_cx = sc.q_cx;
      sc.theta_mat = RMatrix::Identity(cb.dim, cb.dim);
      sc.lam_diag = RVector::Ones(cb.d);
      break;
  }
  return sc;
}

// Hyperbolic Householder map Wbar u (symmetric, Wbar J Wbar = J).
void soc_wbar_apply(const RVector& wbar, const Eigen::Ref<const RVector>& u,
                    Eigen::Ref<RVector> out) {
  const int q = static_cast<int>(wbar.size());
  const double t0 = wbar.dot(u);
  out(0) = t0;
  out.tail(q - 1) =
      u.tail(q - 1) + (t0 + u(0)) / (1.0 + wbar(0)) * wbar.tail(q - 1);
}

void soc_wbar_inv_apply(const RVector& wbar, const Eigen::Ref<const RVector>& u,
                        Eigen::Ref<RVector> out) {
  const int q = static_cast<int>(wbar.size());
  RVector ju(q);
  ju(0) = u(0);
  ju.tail(q - 1) = -u.tail(q - 1);
  soc_wbar_apply(wbar, ju, out);
  out.tail(q - 1) = -out.tail(q - 1);
}

// Theta = (W^T W)^{-1} applied to one cone segment.
void apply_theta(const ConeBlock& cb, const Scaling& sc,
                 const Eigen::Ref<const RVector>& u, Eigen::Ref<RVector> out) {
  switch (cb.type) {
    case ConeBlock::kOrthant:
      out = sc.theta.cwiseProduct(u);
      break;
    case ConeBlock::kSoc: {
      const int q = cb.dim;
      // Theta = (1/eta^2) (2 a a^T - J), a = J wbar.
      const double au =
          sc.wbar(0) * u(0) - sc.wbar.tail(q - 1).dot(u.tail(q - 1));
      out(0) = (2.0 * au * sc.wbar(0) - u(0)) / sc.eta2;
      out.tail(q - 1) =
          (-2.0 * au * sc.wbar.tail(q - 1) + u.tail(q - 1)) / sc.eta2;
      break;
    }
    case ConeBlock::kPsdReal: {
      const RMatrix um = unsvec_sym(u, cb.d);
      svec_sym(RMatrix(sc.qinv_re * um * sc.qinv_re), out);
      break;
    }
    case ConeBlock::kPsdHerm: {
      const CMatrix um = unsvec_herm(u, cb.d);
      svec_herm(CMatrix(sc.qinv_cx * um * sc.qinv_cx), out);
      break;
    }
  }
}

// W^T W applied to one cone segment (used by iterative refinement).
void apply_wtw(const ConeBlock& cb, const Scaling& sc,
               const Eigen::Ref<const RVector>& u, Eigen::Ref<RVector> out) {
  switch (cb.type) {
    case ConeBlock::kOrthant:
      out = u.cwiseQuotient(sc.theta);
      break;
    case ConeBlock::kSoc: {
      const int q = cb.dim;
      // W^T W = eta^2 (2 wbar wbar^T - J).
      const double wu = sc.wbar.dot(u);
      out(0) = sc.eta2 * (2.0 * wu * sc.wbar(0) - u(0));
      out.tail(q - 1) =
          sc.eta2 * (2.0 * wu * sc.wbar.tail(q - 1) + u.tail(q - 1));
      break;
    }
    case ConeBlock::kPsdReal: {
      const RMatrix um = unsvec_sym(u, cb.d);
      svec_sym(RMatrix(sc.q_re * um * sc.q_re), out);
      break;
    }
    case ConeBlock::kPsdHerm: {
      const CMatrix um = unsvec_herm(u, cb.d);
      svec_herm(CMatrix(sc.q_cx * um * sc.q_cx), out);
      break;
    }
  }
}

// Right-hand side of the eliminated cone row for the Mehrotra corrector:
//   bz = -rz + W^T( lambda \ (lambda o lambda + (W^{-T} dsa) o (W dza)
//                   - sigma mu e) ).
void corrector_rhs(const ConeBlock& cb, const Scaling& sc,
                   const Eigen::Ref<const RVector>& rz,
                   const Eigen::Ref<const RVector>& dsa,
                   const Eigen::Ref<const RVector>& dza, double sigma_mu,
                   Eigen::Ref<RVector> out) {
  switch (cb.type) {
    case ConeBlock::kOrthant: {
      // (W^{-T} ds) o (W dz) = ds .* dz for the diagonal scaling.
      const RVector dsig = sc.lambda.cwiseProduct(sc.lambda) +
                           dsa.cwiseProduct(dza) -
                           sigma_mu * RVector::Ones(cb.dim);
      out = -rz + sc.w.cwiseProduct(dsig.cwiseQuotient(sc.lambda));
      break;
    }
    case ConeBlock::kSoc: {
      const int q = cb.dim;
      RVector u(q), v(q);
      soc_wbar_inv_apply(sc.wbar, dsa, u);
      u /= sc.eta;
      soc_wbar_apply(sc.wbar, dza, v);
      v *= sc.eta;
      RVector dsig(q);
      dsig(0) = sc.lambda.squaredNorm() + u.dot(v) - sigma_mu;
      dsig.tail(q - 1) = 2.0 * sc.lambda(0) * sc.lambda.tail(q - 1) +
                         u(0) * v.tail(q - 1) + v(0) * u.tail(q - 1);
      // Jordan division lambda \ dsig in the second-order algebra.
      RVector qd(q);
      const double a = sc.lambda(0);
      const double det = a * a - sc.lambda.tail(q - 1).squaredNorm();
      qd(0) =
          (a * dsig(0) - sc.lambda.tail(q - 1).dot(dsig.tail(q - 1))) / det;
      qd.tail(q - 1) = (dsig.tail(q - 1) - qd(0) * sc.lambda.tail(q - 1)) / a;
      RVector wq(q);
      soc_wbar_apply(sc.wbar, qd, wq);
      out = -rz + sc.eta * wq;
      break;
    }
    case ConeBlock::kPsdReal: {
      const RMatrix dsm = unsvec_sym(dsa, cb.d);
      const RMatrix dzm = unsvec_sym(dza, cb.d);
      const RMatrix u = sc.rinv_re * dsm * sc.rinv_re.transpose();
      const RMatrix v = sc.r_re.transpose() * dzm * sc.r_re;
      RMatrix dsig = 0.5 * (u * v + v * u);
      for (int i = 0; i < cb.d; ++i) {
        dsig(i, i) += sc.lam_diag(i) * sc.lam_diag(i) - sigma_mu;
      }
      RMatrix qd(cb.d, cb.d);
      for (int i = 0; i < cb.d; ++i) {
        for (int j = 0; j < cb.d; ++j) {
          qd(i, j) = 2.0 * dsig(i, j) / (sc.lam_diag(i) + sc.lam_diag(j));
        }
      }
      RVector wq(cb.dim);
      svec_sym(RMatrix(sc.r_re * qd * sc.r_re.transpose()), wq);
      out = -rz + wq;
      break;
    }
    case ConeBlock::kPsdHerm: {
      const CMatrix dsm = unsvec_herm(dsa, cb.d);
      const CMatrix dzm = unsvec_herm(dza, cb.d);
      const CMatrix u = sc.rinv_cx * dsm * sc.rinv_cx.adjoint();
      const CMatrix v = sc.r_cx.adjoint() * dzm * sc.r_cx;
      CMatrix dsig = 0.5 * (u * v + v * u);
      for (int i = 0; i < cb.d; ++i) {
        dsig(i, i) += sc.lam_diag(i) * sc.lam_diag(i) - sigma_mu;
      }
      CMatrix qd(cb.d, cb.d);
      for (int i = 0; i < cb.d; ++i) {
        for (int j = 0; j < cb.d; ++j) {
          qd(i, j) = 2.0 * dsig(i, j) / (sc.lam_diag(i) + sc.lam_diag(j));
        }
      }
      RVector wq(cb.dim);
      svec_herm(CMatrix(sc.r_cx * qd * sc.r_cx.adjoint()), wq);
      out = -rz + wq;
      break;
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Canonical form
//
//   minimize c^T x   s.t.   A x = b,   G x + s = h,   s in K,
//
// K = [orthant rows | SOC cones | PSD blocks]. Declared a friend of
// ConeProgram so it can flatten the builder's private constraint lists.
// ---------------------------------------------------------------------------

struct Canonical {
  int n = 0;  // variables
  int p = 0;  // equality rows
  int m = 0;  // cone rows
  int l = 0;  // orthant rows
  double degree = 0.0;
  RMatrix A, G;
  RVector b, h, c;
  double c0 = 0.0;
  std::vector<ConeBlock> cones;

  std::vector<int> var_map;       // program coordinate -> canonical index
  std::vector<double> fixed_val;  // value when var_map entry is -1
  RVector col_scale;
  double cost_scale = 1.0;
  std::vector<std::pair<int, int>> col_groups;  // (start, len) canonical cols

  explicit Canonical(const ConeProgram& prog);
  void equilibrate();

 private:
  void expr_to_row(const AffineExpr& e, Eigen::Ref<RVector> row,
                   double& constant) const;
};

void Canonical::expr_to_row(const AffineExpr& e, Eigen::Ref<RVector> row,
                            double& constant) const {
  row.setZero();
  constant = e.constant;
  for (const LinTerm& t : e.terms) {
    const int mapped = var_map[t.var];
    if (mapped >= 0) {
      row(mapped) += t.coeff;
    } else {
      constant += t.coeff * fixed_val[t.var];
    }
  }
}

Canonical::Canonical(const ConeProgram& prog) {
  const int total = prog.num_vars_;
  var_map.assign(total, -1);
  fixed_val.assign(total, 0.0);

  // Presolve: scalar variables with equal bounds become constants.
  std::vector<char> fixed(total, 0);
  for (size_t i = 0; i < prog.scalar_lb_.size(); ++i) {
    if (prog.scalar_lb_[i] == prog.scalar_ub_[i]) {
      fixed[prog.scalar_index_[i]] = 1;
      fixed_val[prog.scalar_index_[i]] = prog.scalar_lb_[i];
    }
  }
  int next = 0;
  for (int v = 0; v < total; ++v) {
    if (!fixed[v]) var_map[v] = next++;
  }
  n = next;

  l = static_cast<int>(prog.ineqs_.size());
  for (size_t i = 0; i < prog.scalar_lb_.size(); ++i) {
    if (fixed[prog.scalar_index_[i]]) continue;
    if (prog.scalar_lb_[i] > -kInf) ++l;
    if (prog.scalar_ub_[i] < kInf) ++l;
  }
  m = l;
  for (const auto& s : prog.socs_) m += 1 + static_cast<int>(s.v.size());
  for (const auto& r : prog.rsocs_) m += 2 + static_cast<int>(r.w.size());
  for (const auto& bl : prog.blocks_) m += bl.size;

  p = static_cast<int>(prog.eqs_.size());
  A = RMatrix::Zero(p, n);
  b = RVector::Zero(p);
  G = RMatrix::Zero(m, n);
  h = RVector::Zero(m);

  RVector row(n);
  double cst = 0.0;

  expr_to_row(prog.objective_, row, cst);
  c = row;
  c0 = cst;

  for (int i = 0; i < p; ++i) {
    expr_to_row(prog.eqs_[i], row, cst);
    A.row(i) = row;
    b(i) = -cst;
  }

  int r = 0;
  // e(x) <= 0  ->  s = -e(x):  G = +coeffs, h = -const.
  for (const AffineExpr& e : prog.ineqs_) {
    expr_to_row(e, row, cst);
    G.row(r) = row;
    h(r) = -cst;
    ++r;
  }
  for (size_t i = 0; i < prog.scalar_lb_.size(); ++i) {
    const int v = prog.scalar_index_[i];
    if (fixed[v]) continue;
    const int mv = var_map[v];
    if (prog.scalar_lb_[i] > -kInf) {  // s = x - lb >= 0
      G(r, mv) = -1.0;
      h(r) = -prog.scalar_lb_[i];
      ++r;
    }
    if (prog.scalar_ub_[i] < kInf) {  // s = ub - x >= 0
      G(r, mv) = 1.0;
      h(r) = prog.scalar_ub_[i];
      ++r;
    }
  }
  if (l > 0) {
    ConeBlock cb;
    cb.type = ConeBlock::kOrthant;
    cb.offset = 0;
    cb.dim = l;
    cones.push_back(cb);
    degree += l;
  }

  auto emit_cone_row = [&](const AffineExpr& e) {
    expr_to_row(e, row, cst);
    G.row(r) = -row;  // s = e(x):  G = -coeffs, h = +const
    h(r) = cst;
    ++r;
  };

  for (const auto& s : prog.socs_) {
    ConeBlock cb;
    cb.type = ConeBlock::kSoc;
    cb.offset = r;
    cb.dim = 1 + static_cast<int>(s.v.size());
    emit_cone_row(s.t);
    for (const AffineExpr& e : s.v) emit_cone_row(e);
    cones.push_back(cb);
    degree += 1.0;
  }
  for (const auto& rs : prog.rsocs_) {
    // u t >= ||w||^2, u, t >= 0  <=>  ||(u - t, 2w)|| <= u + t.
    ConeBlock cb;
    cb.type = ConeBlock::kSoc;
    cb.offset = r;
    cb.dim = 2 + static_cast<int>(rs.w.size());
    emit_cone_row(rs.u + rs.t);
    emit_cone_row(rs.u - rs.t);
    for (const AffineExpr& e : rs.w) emit_cone_row(2.0 * e);
    cones.push_back(cb);
    degree += 1.0;
  }
  for (const auto& bl : prog.blocks_) {
    ConeBlock cb;
    cb.type = bl.hermitian ? ConeBlock::kPsdHerm : ConeBlock::kPsdReal;
    cb.offset = r;
    cb.dim = bl.size;
    cb.d = bl.dim;
    cb.var_offset = var_map[bl.offset];
    for (int kc = 0; kc < bl.size; ++kc) {
      G(r, var_map[bl.offset + kc]) = -1.0;
      ++r;
    }
    cones.push_back(cb);
    degree += bl.dim;
  }

  col_scale = RVector::Ones(n);
  for (const auto& bl : prog.blocks_) {
    col_groups.emplace_back(var_map[bl.offset], bl.size);
  }
  for (size_t i = 0; i < prog.scalar_lb_.size(); ++i) {
    const int v = prog.scalar_index_[i];
    if (!fixed[v]) col_groups.emplace_back(var_map[v], 1);
  }
}

void Canonical::equilibrate() {
  const int sweeps = 6;
  for (int it = 0; it < sweeps; ++it) {
    for (int i = 0; i < p; ++i) {
      const double mx = A.row(i).cwiseAbs().maxCoeff();
      if (mx > 0) {
        const double f = 1.0 / std::sqrt(mx);
        A.row(i) *= f;
        b(i) *= f;
      }
    }
    for (const ConeBlock& cb : cones) {
      if (cb.type == ConeBlock::kOrthant) {
        for (int i = cb.offset; i < cb.offset + cb.dim; ++i) {
          const double mx = G.row(i).cwiseAbs().maxCoeff();
          if (mx > 0) {
            const double f = 1.0 / std::sqrt(mx);
            G.row(i) *= f;
            h(i) *= f;
          }
        }
      } else {
        // One factor per cone keeps the cone description intact.
        const double mx = G.middleRows(cb.offset, cb.dim).cwiseAbs().maxCoeff();
        if (mx > 0) {
          const double f = 1.0 / std::sqrt(mx);
          G.middleRows(cb.offset, cb.dim) *= f;
          h.segment(cb.offset, cb.dim) *= f;
        }
      }
    }
    for (const auto& [start, len] : col_groups) {
      double mx = m > 0 ? G.middleCols(start, len).cwiseAbs().maxCoeff() : 0.0;
      if (p > 0) {
        mx = std::max(mx, A.middleCols(start, len).cwiseAbs().maxCoeff());
      }
      if (mx > 0) {
        const double f = 1.0 / std::sqrt(mx);
        G.middleCols(start, len) *= f;
        if (p > 0) A.middleCols(start, len) *= f;
        c.segment(start, len) *= f;
        col_scale.segment(start, len) *= f;
      }
    }
  }
  cost_scale = std::max(1.0, n > 0 ? c.cwiseAbs().maxCoeff() : 0.0);
  c /= cost_scale;
  // PSD rows are -kappa * I after scaling; record kappa for KKT assembly.
  for (ConeBlock& cb : cones) {
    if (cb.type == ConeBlock::kPsdReal || cb.type == ConeBlock::kPsdHerm) {
      cb.kappa = -G(cb.offset, cb.var_offset);
    }
  }
}

// ---------------------------------------------------------------------------
// Interior-point iteration
// ---------------------------------------------------------------------------

class ConicSolver {
 public:
  ConicSolver(const ConeProgram& prog, const SolverOptions& opt)
      : prog_(prog), opt_(opt), can_(prog) {}

  SolverSolution run();

 private:
  void build_assembly_caches();
  bool factor(const std::vector<Scaling>& scale);
  void solve_kkt(const RVector& bx, const RVector& by, const RVector& bz,
                 const std::vector<Scaling>& scale, RVector& dx, RVector& dy,
                 RVector& dz) const;
  void kkt_once(const RVector& r1, const RVector& by, RVector& dx,
                RVector& dy) const;
  void theta_all(const std::vector<Scaling>& scale, const RVector& u,
                 RVector& out) const;
  void wtw_all(const std::vector<Scaling>& scale, const RVector& u,
               RVector& out) const;
  double max_step_all(const RVector& u, const RVector& du) const;

  SolverSolution finish(SolverStatus status, const RVector& x_can,
                        std::string message) const;
  SolverSolution trivial_or_degenerate();

  const ConeProgram& prog_;
  SolverOptions opt_;
  Canonical can_;
  bool trace_ = false;  // RADCOM_SOLVER_TRACE=1: iteration log on stderr

  // structured-assembly caches (built on the equilibrated data)
  RMatrix at_;  // A^T
  std::vector<std::tuple<int, int, double>> orth_single_;  // row, var, coeff
  std::vector<int> orth_general_rows_;
  RMatrix bg_;  // dense general orthant rows
  struct BigSoc {
    int cone = 0;
    RMatrix m0;  // Gv^T Gv - gt gt^T
  };
  struct SmallSoc {
    int cone = 0;
    std::vector<std::vector<std::pair<int, double>>> rows;
  };
  std::vector<BigSoc> big_socs_;
  std::vector<SmallSoc> small_socs_;

  // factorization state
  RMatrix hmat_;
  Eigen::LLT<RMatrix> llt_h_;
  RMatrix hinv_at_;
  Eigen::LLT<RMatrix> llt_s_;
};

void ConicSolver::build_assembly_caches() {
  const int n = can_.n;
  at_ = can_.A.transpose();
  for (size_t ci = 0; ci < can_.cones.size(); ++ci) {
    const ConeBlock& cb = can_.cones[ci];
    switch (cb.type) {
      case ConeBlock::kOrthant: {
        for (int i = cb.offset; i < cb.offset + cb.dim; ++i) {
          int nnz = 0, var = -1;
          for (int j = 0; j < n; ++j) {
            if (can_.G(i, j) != 0.0) {
              ++nnz;
              var = j;
              if (nnz > 1) break;
            }
          }
          if (nnz == 1) {
            orth_single_.emplace_back(i, var, can_.G(i, var));
          } else if (nnz > 1) {
            orth_general_rows_.push_back(i);
          }
        }
        if (!orth_general_rows_.empty()) {
          bg_.resize(static_cast<int>(orth_general_rows_.size()), n);
          for (size_t k = 0; k < orth_general_rows_.size(); ++k) {
            bg_.row(static_cast<int>(k)) = can_.G.row(orth_general_rows_[k]);
          }
        }
        break;
      }
      case ConeBlock::kSoc: {
        if (cb.dim >= 12) {
          BigSoc bs;
          bs.cone = static_cast<int>(ci);
          const RVector gt = can_.G.row(cb.offset).transpose();
          const auto gv = can_.G.middleRows(cb.offset + 1, cb.dim - 1);
          bs.m0 = gv.transpose() * gv - gt * gt.transpose();
          big_socs_.push_back(std::move(bs));
        } else {
          SmallSoc ss;
          ss.cone = static_cast<int>(ci);
          ss.rows.resize(cb.dim);
          for (int i = 0; i < cb.dim; ++i) {
            for (int j = 0; j < n; ++j) {
              const double gij = can_.G(cb.offset + i, j);
              if (gij != 0.0) ss.rows[i].emplace_back(j, gij);
            }
          }
          small_socs_.push_back(std::move(ss));
        }
        break;
      }
      default:
        break;  // PSD blocks contribute through theta_mat directly
    }
  }
}

bool ConicSolver::factor(const std::vector<Scaling>& scale) {
  const int n = can_.n;
  hmat_.setZero(n, n);

  for (size_t k = 0; k < can_.cones.size(); ++k) {
    const ConeBlock& cb = can_.cones[k];
    if (cb.type == ConeBlock::kPsdReal || cb.type == ConeBlock::kPsdHerm) {
      const double k2 = cb.kappa * cb.kappa;
      hmat_.block(cb.var_offset, cb.var_offset, cb.dim, cb.dim)
          .triangularView<Eigen::Lower>() += k2 * scale[k].theta_mat;
    }
  }

  if (!can_.cones.empty() && can_.cones[0].type == ConeBlock::kOrthant) {
    const Scaling& sc = scale[0];
    for (const auto& [row, var, coeff] : orth_single_) {
      hmat_(var, var) += sc.theta(row) * coeff * coeff;
    }
    if (!orth_general_rows_.empty()) {
      RVector sq(static_cast<int>(orth_general_rows_.size()));
      for (size_t k = 0; k < orth_general_rows_.size(); ++k) {
        sq(static_cast<int>(k)) = std::sqrt(sc.theta(orth_general_rows_[k]));
      }
      const RMatrix tmp = sq.asDiagonal() * bg_;
      hmat_.selfadjointView<Eigen::Lower>().rankUpdate(tmp.transpose(), 1.0);
    }
  }

  for (const BigSoc& bs : big_socs_) {
    const ConeBlock& cb = can_.cones[bs.cone];
    const Scaling& sc = scale[bs.cone];
    // Contribution (1/eta^2) (2 g g^T - gt gt^T + Gv^T Gv), g = G^T (J wbar).
    RVector a(cb.dim);
    a(0) = sc.wbar(0);
    a.tail(cb.dim - 1) = -sc.wbar.tail(cb.dim - 1);
    const RVector g = can_.G.middleRows(cb.offset, cb.dim).transpose() * a;
    hmat_.triangularView<Eigen::Lower>() += (1.0 / sc.eta2) * bs.m0;
    hmat_.selfadjointView<Eigen::Lower>().rankUpdate(g, 2.0 / sc.eta2);
  }

  for (const SmallSoc& ss : small_socs_) {
    const ConeBlock& cb = can_.cones[ss.cone];
    const Scaling& sc = scale[ss.cone];
    const double inv_eta2 = 1.0 / sc.eta2;
    std::vector<std::pair<int, double>> gnz;
    auto add_nz = [&gnz](int var, double val) {
      for (auto& [v, x] : gnz) {
        if (v == var) {
          x += val;
          return;
        }
      }
      gnz.emplace_back(var, val);
    };
    for (int i = 0; i < cb.dim; ++i) {
      const double ai = i == 0 ? sc.wbar(0) : -sc.wbar(i);
      for (const auto& [v, x] : ss.rows[i]) add_nz(v, ai * x);
    }
    auto outer_add = [this](const std::vector<std::pair<int, double>>& u,
                            double f) {
      for (const auto& [vi, xi] : u) {
        for (const auto& [vj, xj] : u) {
          if (vi >= vj) hmat_(vi, vj) += f * xi * xj;
        }
      }
    };
    outer_add(gnz, 2.0 * inv_eta2);
    outer_add(ss.rows[0], -inv_eta2);
    for (int i = 1; i < cb.dim; ++i) outer_add(ss.rows[i], inv_eta2);
  }

  double base = 1.0;
  for (int i = 0; i < n; ++i) base = std::max(base, hmat_(i, i));
  double delta = 1e-12 * base;
  hmat_.diagonal().array() += delta;
  bool done = false;
  for (int attempt = 0; attempt < 5 && !done; ++attempt) {
    llt_h_.compute(hmat_);
    if (llt_h_.info() == Eigen::Success) {
      done = true;
    } else {
      hmat_.diagonal().array() += delta * 99.0;
      delta *= 100.0;
    }
  }
  if (!done) return false;

  if (can_.p > 0) {
    hinv_at_ = llt_h_.solve(at_);
    RMatrix s = can_.A * hinv_at_;
    double sbase = 1.0;
    for (int i = 0; i < can_.p; ++i) sbase = std::max(sbase, s(i, i));
    double sdelta = 1e-13 * sbase;
    s.diagonal().array() += sdelta;
    done = false;
    for (int attempt = 0; attempt < 5 && !done; ++attempt) {
      llt_s_.compute(s);
      if (llt_s_.info() == Eigen::Success) {
        done = true;
      } else {
        s.diagonal().array() += sdelta * 99.0;
        sdelta *= 100.0;
      }
    }
    if (!done) return false;
  }
  return true;
}

void ConicSolver::theta_all(const std::vector<Scaling>& scale, const RVector& u,
                            RVector& out) const {
  out.resize(can_.m);
  for (size_t k = 0; k < can_.cones.size(); ++k) {
    const ConeBlock& cb = can_.cones[k];
    apply_theta(cb, scale[k], u.segment(cb.offset, cb.dim),
                out.segment(cb.offset, cb.dim));
  }
}

void ConicSolver::wtw_all(const std::vector<Scaling>& scale, const RVector& u,
                          RVector& out) const {
  out.resize(can_.m);
  for (size_t k = 0; k < can_.cones.size(); ++k) {
    const ConeBlock& cb = can_.cones[k];
    apply_wtw(cb, scale[k], u.segment(cb.offset, cb.dim),
              out.segment(cb.offset, cb.dim));
  }
}

double ConicSolver::max_step_all(const RVector& u, const RVector& du) const {
  double t = kInf;
  for (const ConeBlock& cb : can_.cones) {
    t = std::min(t, cone_max_step(cb, u.segment(cb.offset, cb.dim),
                                  du.segment(cb.offset, cb.dim)));
  }
  return t;
}

void ConicSolver::kkt_once(const RVector& r1, const RVector& by, RVector& dx,
                           RVector& dy) const {
  if (can_.p > 0) {
    const RVector t1 = llt_h_.solve(r1);
    dy = llt_s_.solve(can_.A * t1 - by);
    dx = llt_h_.solve(r1 - at_ * dy);
  } else {
    dy.resize(0);
    dx = llt_h_.solve(r1);
  }
}

void ConicSolver::solve_kkt(const RVector& bx, const RVector& by,
                            const RVector& bz,
                            const std::vector<Scaling>& scale, RVector& dx,
                            RVector& dy, RVector& dz) const {
  // Eliminate dz = Theta (G dx - bz) from
  //   A^T dy + G^T dz = bx,  A dx = by,  G dx - W^T W dz = bz.
  RVector tb(can_.m), tmp(can_.m);
  theta_all(scale, bz, tb);
  const RVector r1 = bx + can_.G.transpose() * tb;
  kkt_once(r1, by, dx, dy);
  tmp = can_.G * dx - bz;
  theta_all(scale, tmp, dz);

  for (int round = 0; round < 2; ++round) {
    RVector ex = bx - (can_.G.transpose() * dz);
    if (can_.p > 0) ex -= at_ * dy;
    const RVector ey = can_.p > 0 ? RVector(by - can_.A * dx) : RVector();
    wtw_all(scale, dz, tmp);
    const RVector ez = bz - (can_.G * dx - tmp);
    const double errn = std::max(
        {ex.size() > 0 ? ex.cwiseAbs().maxCoeff() : 0.0,
         ey.size() > 0 ? ey.cwiseAbs().maxCoeff() : 0.0,
         ez.size() > 0 ? ez.cwiseAbs().maxCoeff() : 0.0});
    const double refn =
        1.0 + std::max({bx.size() > 0 ? bx.cwiseAbs().maxCoeff() : 0.0,
                        by.size() > 0 ? by.cwiseAbs().maxCoeff() : 0.0,
                        bz.size() > 0 ? bz.cwiseAbs().maxCoeff() : 0.0});
    if (errn <= 1e-12 * refn) break;
    theta_all(scale, ez, tb);
    const RVector cr1 = ex + can_.G.transpose() * tb;
    RVector cx, cy;
    kkt_once(cr1, ey, cx, cy);
    tmp = can_.G * cx - ez;
    RVector cz;
    theta_all(scale, tmp, cz);
    dx += cx;
    if (can_.p > 0) dy += cy;
    dz += cz;
  }
}

SolverSolution ConicSolver::finish(SolverStatus status, const RVector& x_can,
                                   std::string message) const {
  SolverSolution sol;
  sol.status = status;
  sol.message = std::move(message);
  if (x_can.size() == can_.n && status != SolverStatus::kInfeasible) {
    sol.x.resize(prog_.num_vars_);
    for (int v = 0; v < prog_.num_vars_; ++v) {
      const int mv = can_.var_map[v];
      sol.x(v) = mv >= 0 ? can_.col_scale(mv) * x_can(mv) : can_.fixed_val[v];
    }
    sol.objective = prog_.objective_.value(sol.x);
  } else {
    sol.objective = status == SolverStatus::kInfeasible ? kInf : 0.0;
  }
  return sol;
}

SolverSolution ConicSolver::trivial_or_degenerate() {
  if (can_.n == 0) {
    bool feasible = can_.p == 0 || can_.b.cwiseAbs().maxCoeff() <= 1e-9;
    const double href =
        1.0 + (can_.m > 0 ? can_.h.cwiseAbs().maxCoeff() : 0.0);
    for (const ConeBlock& cb : can_.cones) {
      if (cone_min_eig(cb, can_.h.segment(cb.offset, cb.dim)) <
          -1e-9 * href) {
        feasible = false;
      }
    }
    return finish(
        feasible ? SolverStatus::kOptimal : SolverStatus::kInfeasible,
        RVector::Zero(0),
        feasible ? "all variables fixed by bounds" : "fixed point infeasible");
  }
  // m == 0: linear objective over an affine set.
  const int n = can_.n, p = can_.p;
  RMatrix kkt = RMatrix::Zero(n + p, n + p);
  kkt.topRightCorner(n, p) = can_.A.transpose();
  kkt.bottomLeftCorner(p, n) = can_.A;
  RVector rhs(n + p);
  rhs.head(n) = -can_.c;
  rhs.tail(p) = can_.b;
  Eigen::CompleteOrthogonalDecomposition<RMatrix> cod(kkt);
  const RVector sol_xy = cod.solve(rhs);
  const double rn = (kkt * sol_xy - rhs).cwiseAbs().maxCoeff();
  const double scale_ref = 1.0 + rhs.cwiseAbs().maxCoeff();
  if (rn <= 1e-8 * scale_ref) {
    return finish(SolverStatus::kOptimal, sol_xy.head(n),
                  "stationary point of the equality-constrained problem");
  }
  const double eq_res =
      p > 0 ? (can_.A * sol_xy.head(n) - can_.b).cwiseAbs().maxCoeff() : 0.0;
  if (eq_res > 1e-8 * scale_ref) {
    return finish(SolverStatus::kInfeasible, RVector(),
                  "inconsistent equality constraints");
  }
  return finish(SolverStatus::kNumericalFailure, RVector(),
                "objective unbounded on the equality set");
}

SolverSolution ConicSolver::run() {
  if (!(opt_.tol >= 1e-10 && opt_.tol <= 1e-4)) {
    throw ContractError("solver tolerance must lie in [1e-10, 1e-4]");
  }
  if (opt_.max_iters < 1) {
    throw ContractError("solver max_iters must be at least 1");
  }
  trace_ = std::getenv("RADCOM_SOLVER_TRACE") != nullptr;

  can_.equilibrate();
  if (can_.n == 0 || can_.m == 0) return trivial_or_degenerate();
  build_assembly_caches();

  const int p = can_.p, m = can_.m;
  const double nu = can_.degree;

  std::vector<Scaling> scale;
  scale.reserve(can_.cones.size());
  for (const ConeBlock& cb : can_.cones) scale.push_back(identity_scaling(cb));

  if (!factor(scale)) {
    return finish(SolverStatus::kNumericalFailure, RVector(),
                  "initial KKT factorization failed");
  }

  RVector x, y, s(m), z(m), dx, dy, dz;
  {
    // Primal start: least-squares point of A x = b, G x + s = h.
    RVector zt;
    solve_kkt(RVector::Zero(can_.n), can_.b, can_.h, scale, x, y, zt);
    s = -zt;
    double alpha = -kInf;
    for (const ConeBlock& cb : can_.cones) {
      alpha = std::max(alpha, -cone_min_eig(cb, s.segment(cb.offset, cb.dim)));
    }
    if (alpha >= 0.0) {
      for (const ConeBlock& cb : can_.cones) {
        cone_add_identity(cb, s.segment(cb.offset, cb.dim), 1.0 + alpha);
      }
    }
    // Dual start: least-squares stationary point of the dual residual.
    RVector xd;
    solve_kkt(-can_.c, RVector::Zero(p), RVector::Zero(m), scale, xd, y, z);
    alpha = -kInf;
    for (const ConeBlock& cb : can_.cones) {
      alpha = std::max(alpha, -cone_min_eig(cb, z.segment(cb.offset, cb.dim)));
    }
    if (alpha >= 0.0) {
      for (const ConeBlock& cb : can_.cones) {
        cone_add_identity(cb, z.segment(cb.offset, cb.dim), 1.0 + alpha);
      }
    }
  }

  const double resx0 = std::max(1.0, can_.c.norm());
  const double resy0 = std::max(1.0, can_.b.norm());
  const double resz0 = std::max(1.0, can_.h.norm());
  const double tol_inf = std::max(10.0 * opt_.tol, 1e-8);

  int stall = 0;
  RVector rx, ry, rz;

  double best_metric = kInf;
  RVector best_x;
  double best_pres = kInf, best_dres = kInf, best_gap = kInf,
         best_relgap = kInf;

  for (int iter = 0;; ++iter) {
    rx = can_.c + can_.G.transpose() * z;
    if (p > 0) rx += at_ * y;
    if (p > 0) ry = can_.A * x - can_.b;
    rz = can_.G * x + s - can_.h;

    const double gap = s.dot(z);
    const double pcost = can_.c.dot(x);
    const double pres =
        std::max(p > 0 ? ry.norm() / resy0 : 0.0, rz.norm() / resz0);
    const double dres = rx.norm() / resx0;
    const double relgap = gap / std::max(1.0, std::abs(pcost));

    auto fill_metrics = [&](SolverSolution& sol) {
      sol.primal_residual = pres;
      sol.dual_residual = dres;
      sol.duality_gap = gap;
      sol.relative_gap = relgap;
      sol.iterations = iter;
    };

    const double metric = std::max({pres, dres, relgap});
    if (metric < best_metric) {
      best_metric = metric;
      best_x = x;
      best_pres = pres;
      best_dres = dres;
      best_gap = gap;
      best_relgap = relgap;
    }

    if (pres <= opt_.tol && dres <= opt_.tol && relgap <= opt_.tol) {
      SolverSolution sol = finish(SolverStatus::kOptimal, x, "converged");
      fill_metrics(sol);
      return sol;
    }

    auto stop_at_best = [&](const std::string& why) {
      SolverSolution sol = finish(SolverStatus::kMaxIterations, best_x, why);
      fill_metrics(sol);
      sol.primal_residual = best_pres;
      sol.dual_residual = best_dres;
      sol.duality_gap = best_gap;
      sol.relative_gap = best_relgap;
      return sol;
    };

    // Numerical floor: once an iterate has reached usable accuracy, a sharp
    // residual regression means mu has dropped below what the factorization
    // resolves and the directions have collapsed; further steps only corrupt
    // the iterate, so stop on the best one.
    if (best_metric <= kUsableResidual && metric >= 100.0 * best_metric &&
        metric > 10.0 * opt_.tol) {
      return stop_at_best("numerical floor reached");
    }

    const double hzby = can_.h.dot(z) + (p > 0 ? can_.b.dot(y) : 0.0);
    if (iter > 0 && hzby < 0.0) {
      RVector dual_comb = can_.G.transpose() * z;
      if (p > 0) dual_comb += at_ * y;
      if (dual_comb.norm() / resx0 / (-hzby) <= tol_inf) {
        SolverSolution sol = finish(SolverStatus::kInfeasible, RVector(),
                                    "primal infeasibility certificate found");
        fill_metrics(sol);
        return sol;
      }
    }
    if (iter > 0 && pcost < 0.0) {
      const RVector gs = can_.G * x + s;
      const double cert = std::max(p > 0 ? (can_.A * x).norm() / resy0 : 0.0,
                                   gs.norm() / resz0) /
                          (-pcost);
      if (cert <= tol_inf) {
        SolverSolution sol = finish(
            SolverStatus::kNumericalFailure, RVector(),
            "dual infeasibility certificate found (objective unbounded)");
        fill_metrics(sol);
        return sol;
      }
    }

    if (iter >= opt_.max_iters || stall >= 3) {
      // Return the best iterate seen, not the last one: a stall usually means
      // the search directions broke down after the iterate had already reached
      // the numerical floor, and the caller decides via usable() whether that
      // accuracy suffices.
      const bool best_wins = best_metric < metric;
      SolverSolution sol =
          finish(SolverStatus::kMaxIterations, best_wins ? best_x : x,
                 stall >= 3 ? "progress stalled" : "iteration limit reached");
      fill_metrics(sol);
      if (best_wins) {
        sol.primal_residual = best_pres;
        sol.dual_residual = best_dres;
        sol.duality_gap = best_gap;
        sol.relative_gap = best_relgap;
      }
      return sol;
    }

    bool ok = true;
    for (size_t k = 0; k < can_.cones.size() && ok; ++k) {
      const ConeBlock& cb = can_.cones[k];
      ok = compute_scaling(cb, s.segment(cb.offset, cb.dim),
                           z.segment(cb.offset, cb.dim), scale[k]);
    }
    if (!ok) {
      if (best_metric <= kUsableResidual) {
        return stop_at_best("stopped at the numerical floor (scaling broke)");
      }
      SolverSolution sol =
          finish(SolverStatus::kNumericalFailure, x, "iterate left the cone");
      fill_metrics(sol);
      return sol;
    }
    if (!factor(scale)) {
      if (best_metric <= kUsableResidual) {
        return stop_at_best("stopped at the numerical floor (factorization)");
      }
      SolverSolution sol = finish(SolverStatus::kNumericalFailure, x,
                                  "KKT factorization failed");
      fill_metrics(sol);
      return sol;
    }

    const double mu = gap / nu;

    // Affine (predictor) direction; W^T lambda = s collapses the rhs.
    const RVector bx = -rx;
    const RVector by = p > 0 ? RVector(-ry) : RVector();
    const RVector bz_aff = -rz + s;
    RVector dxa, dya, dza;
    solve_kkt(bx, by, bz_aff, scale, dxa, dya, dza);
    const RVector dsa = -rz - can_.G * dxa;

    const double t_aff = std::min(max_step_all(s, dsa), max_step_all(z, dza));
    const double alpha_aff = std::min(1.0, t_aff);
    const double sigma =
        std::min(1.0, std::max(0.0, std::pow(1.0 - alpha_aff, 3)));

    // Combined (corrector) direction.
    RVector bz(m);
    for (size_t k = 0; k < can_.cones.size(); ++k) {
      const ConeBlock& cb = can_.cones[k];
      corrector_rhs(cb, scale[k], rz.segment(cb.offset, cb.dim),
                    dsa.segment(cb.offset, cb.dim),
                    dza.segment(cb.offset, cb.dim), sigma * mu,
                    bz.segment(cb.offset, cb.dim));
    }
    solve_kkt(bx, by, bz, scale, dx, dy, dz);
    const RVector ds = -rz - can_.G * dx;

    if (!dx.allFinite() || !dz.allFinite() || !ds.allFinite() ||
        (p > 0 && !dy.allFinite())) {
      SolverSolution sol = finish(SolverStatus::kNumericalFailure, x,
                                  "non-finite search direction");
      fill_metrics(sol);
      return sol;
    }

    const double t_max = std::min(max_step_all(s, ds), max_step_all(z, dz));
    const double alpha = std::min(1.0, kStepBack * t_max);
    stall = alpha < 1e-8 ? stall + 1 : 0;
    if (trace_) {
      std::fprintf(stderr,
                   "iter %3d  pres %9.2e dres %9.2e relgap %9.2e mu %9.2e  "
                   "aff %8.2e sigma %8.2e alpha %8.2e\n",
                   iter, pres, dres, relgap, mu, alpha_aff, sigma, alpha);
    }

    x += alpha * dx;
    if (p > 0) y += alpha * dy;
    s += alpha * ds;
    z += alpha * dz;
  }
}

const char* to_string(SolverStatus status) {
  switch (status) {
    case SolverStatus::kOptimal:
      return "optimal";
    case SolverStatus::kInfeasible:
      return "infeasible";
    case SolverStatus::kMaxIterations:
      return "max_iterations";
    case SolverStatus::kNumericalFailure:
      return "numerical_failure";
  }
  return "unknown";
}

SolverSolution solve(const ConeProgram& program, const SolverOptions& options) {
  ConicSolver solver(program, options);
  return solver.run();
}

}  // namespace radcom
