#include "radcom/cone_program.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace radcom {

namespace {
constexpr double kSqrt2 = 1.4142135623730950488;
}

AffineExpr AffineExpr::variable(int var, double coeff) {
  AffineExpr e;
  e.add(var, coeff);
  return e;
}

AffineExpr& AffineExpr::add(int var, double coeff) {
  if (coeff != 0.0) terms.push_back({var, coeff});
  return *this;
}

AffineExpr& AffineExpr::operator+=(const AffineExpr& other) {
  terms.insert(terms.end(), other.terms.begin(), other.terms.end());
  constant += other.constant;
  return *this;
}

AffineExpr& AffineExpr::operator-=(const AffineExpr& other) {
  for (const LinTerm& t : other.terms) terms.push_back({t.var, -t.coeff});
  constant -= other.constant;
  return *this;
}

AffineExpr& AffineExpr::operator*=(double factor) {
  for (LinTerm& t : terms) t.coeff *= factor;
  constant *= factor;
  return *this;
}

double AffineExpr::value(const RVector& x) const {
  double v = constant;
  for (const LinTerm& t : terms) v += t.coeff * x(t.var);
  return v;
}

AffineExpr operator+(AffineExpr a, const AffineExpr& b) { return a += b; }
AffineExpr operator-(AffineExpr a, const AffineExpr& b) { return a -= b; }
AffineExpr operator*(double factor, AffineExpr a) { return a *= factor; }
AffineExpr operator-(AffineExpr a) { return a *= -1.0; }

int ConeProgram::add_scalar(double lb, double ub) {
  if (std::isnan(lb) || std::isnan(ub) || lb > ub) {
    throw ContractError("add_scalar: bounds must satisfy lb <= ub");
  }
  scalar_index_.push_back(num_vars_);
  scalar_lb_.push_back(lb);
  scalar_ub_.push_back(ub);
  return num_vars_++;
}

int ConeProgram::add_sym_block(int dim) {
  if (dim < 1) throw ContractError("add_sym_block: dim must be >= 1");
  Block b;
  b.hermitian = false;
  b.dim = dim;
  b.offset = num_vars_;
  b.size = dim * (dim + 1) / 2;
  num_vars_ += b.size;
  blocks_.push_back(b);
  return static_cast<int>(blocks_.size()) - 1;
}

int ConeProgram::add_herm_block(int dim) {
  if (dim < 1) throw ContractError("add_herm_block: dim must be >= 1");
  Block b;
  b.hermitian = true;
  b.dim = dim;
  b.offset = num_vars_;
  b.size = dim * dim;
  num_vars_ += b.size;
  blocks_.push_back(b);
  return static_cast<int>(blocks_.size()) - 1;
}

void ConeProgram::check_block(int block) const {
  if (block < 0 || block >= num_blocks()) {
    throw ContractError("ConeProgram: block id out of range");
  }
}

void ConeProgram::check_expr(const AffineExpr& e, const char* where) const {
  for (const LinTerm& t : e.terms) {
    if (t.var < 0 || t.var >= num_vars_) {
      std::ostringstream os;
      os << where << ": variable index " << t.var << " out of range";
      throw ContractError(os.str());
    }
    if (!std::isfinite(t.coeff)) {
      throw ContractError(std::string(where) + ": non-finite coefficient");
    }
  }
  if (!std::isfinite(e.constant)) {
    throw ContractError(std::string(where) + ": non-finite constant");
  }
}

int ConeProgram::sym_index(int block, int i, int j) const {
  check_block(block);
  const Block& b = blocks_[block];
  if (b.hermitian) {
    throw ContractError("sym_index: block is Hermitian, not real symmetric");
  }
  if (i < j) std::swap(i, j);
  if (j < 0 || i >= b.dim) throw ContractError("sym_index: entry out of range");
  return b.offset + j * b.dim - j * (j - 1) / 2 + (i - j);
}

AffineExpr ConeProgram::trace_expr(int block) const {
  check_block(block);
  const Block& b = blocks_[block];
  AffineExpr e;
  if (b.hermitian) {
    for (int i = 0; i < b.dim; ++i) e.add(b.offset + i, 1.0);
  } else {
    for (int i = 0; i < b.dim; ++i) e.add(sym_index(block, i, i), 1.0);
  }
  return e;
}

AffineExpr ConeProgram::inner_expr(int block, const RMatrix& c) const {
  check_block(block);
  const Block& b = blocks_[block];
  if (b.hermitian) {
    throw ContractError("inner_expr: real matrix against Hermitian block");
  }
  if (c.rows() != b.dim || c.cols() != b.dim) {
    throw ContractError("inner_expr: coefficient matrix dimension mismatch");
  }
  const double dev = (c - c.transpose()).cwiseAbs().maxCoeff();
  if (dev > kHermitianTol * (1.0 + c.cwiseAbs().maxCoeff())) {
    throw ContractError("inner_expr: coefficient matrix must be symmetric");
  }
  AffineExpr e;
  for (int j = 0; j < b.dim; ++j) {
    e.add(sym_index(block, j, j), c(j, j));
    for (int i = j + 1; i < b.dim; ++i) {
      // Packed coordinate is sqrt(2) X_ij, so <C, X> needs sqrt(2) C_ij.
      e.add(sym_index(block, i, j), kSqrt2 * 0.5 * (c(i, j) + c(j, i)));
    }
  }
  return e;
}

AffineExpr ConeProgram::inner_expr(int block, const HermitianMatrix& c) const {
  check_block(block);
  const Block& b = blocks_[block];
  if (!b.hermitian) {
    throw ContractError("inner_expr: Hermitian matrix against real block");
  }
  if (c.dim() != b.dim) {
    throw ContractError("inner_expr: coefficient matrix dimension mismatch");
  }
  AffineExpr e;
  for (int i = 0; i < b.dim; ++i) e.add(b.offset + i, c(i, i).real());
  int pair = 0;
  for (int j = 0; j < b.dim; ++j) {
    for (int i = j + 1; i < b.dim; ++i, ++pair) {
      const int re = b.offset + b.dim + 2 * pair;
      e.add(re, kSqrt2 * c(i, j).real());
      e.add(re + 1, kSqrt2 * c(i, j).imag());
    }
  }
  return e;
}

void ConeProgram::minimize(AffineExpr objective) {
  check_expr(objective, "minimize");
  objective_ = std::move(objective);
}

void ConeProgram::add_eq(AffineExpr lhs, double rhs) {
  lhs.constant -= rhs;
  check_expr(lhs, "add_eq");
  eqs_.push_back(std::move(lhs));
}

void ConeProgram::add_le(AffineExpr lhs, double rhs) {
  lhs.constant -= rhs;
  check_expr(lhs, "add_le");
  ineqs_.push_back(std::move(lhs));
}

void ConeProgram::add_ge(AffineExpr lhs, double rhs) {
  AffineExpr e = -std::move(lhs);
  e.constant += rhs;
  check_expr(e, "add_ge");
  ineqs_.push_back(std::move(e));
}

void ConeProgram::add_soc(AffineExpr t, std::vector<AffineExpr> v) {
  check_expr(t, "add_soc");
  if (v.empty()) throw ContractError("add_soc: empty vector part");
  for (const AffineExpr& e : v) check_expr(e, "add_soc");
  socs_.push_back({std::move(t), std::move(v)});
}

void ConeProgram::add_rsoc(AffineExpr u, AffineExpr t, std::vector<AffineExpr> w) {
  check_expr(u, "add_rsoc");
  check_expr(t, "add_rsoc");
  if (w.empty()) throw ContractError("add_rsoc: empty vector part");
  for (const AffineExpr& e : w) check_expr(e, "add_rsoc");
  rsocs_.push_back({std::move(u), std::move(t), std::move(w)});
}

RMatrix ConeProgram::sym_value(int block, const RVector& x) const {
  check_block(block);
  const Block& b = blocks_[block];
  if (b.hermitian) throw ContractError("sym_value: block is Hermitian");
  if (x.size() != num_vars_) throw ContractError("sym_value: bad vector size");
  RMatrix m(b.dim, b.dim);
  for (int j = 0; j < b.dim; ++j) {
    m(j, j) = x(sym_index(block, j, j));
    for (int i = j + 1; i < b.dim; ++i) {
      m(i, j) = m(j, i) = x(sym_index(block, i, j)) / kSqrt2;
    }
  }
  return m;
}

HermitianMatrix ConeProgram::herm_value(int block, const RVector& x) const {
  check_block(block);
  const Block& b = blocks_[block];
  if (!b.hermitian) throw ContractError("herm_value: block is real symmetric");
  if (x.size() != num_vars_) throw ContractError("herm_value: bad vector size");
  CMatrix m(b.dim, b.dim);
  for (int i = 0; i < b.dim; ++i) m(i, i) = x(b.offset + i);
  int pair = 0;
  for (int j = 0; j < b.dim; ++j) {
    for (int i = j + 1; i < b.dim; ++i, ++pair) {
      const int re = b.offset + b.dim + 2 * pair;
      const Complex v(x(re) / kSqrt2, x(re + 1) / kSqrt2);
      m(i, j) = v;
      m(j, i) = std::conj(v);
    }
  }
  return HermitianMatrix(m);
}

double ConeProgram::scalar_value(int var, const RVector& x) const {
  if (var < 0 || var >= num_vars_) throw ContractError("scalar_value: bad index");
  return x(var);
}

double ValidationReport::worst() const {
  return std::max({eq, ineq, soc, rsoc, psd, bounds});
}

namespace {

// Scale-invariant violation of "e(x) (op) 0": absolute violation divided by
// one plus the size of the participating quantities.
double expr_scale(const AffineExpr& e, const RVector& x) {
  double s = 1.0 + std::abs(e.constant);
  for (const LinTerm& t : e.terms) s += std::abs(t.coeff * x(t.var));
  return s;
}

}  // namespace

ValidationReport validate_solution(const ConeProgram& p, const RVector& x) {
  if (x.size() != p.num_vars_) {
    throw ContractError("validate_solution: point has wrong dimension");
  }
  ValidationReport rep;
  for (const AffineExpr& e : p.eqs_) {
    rep.eq = std::max(rep.eq, std::abs(e.value(x)) / expr_scale(e, x));
  }
  for (const AffineExpr& e : p.ineqs_) {
    rep.ineq = std::max(rep.ineq, e.value(x) / expr_scale(e, x));
  }
  for (const ConeProgram::Soc& c : p.socs_) {
    double nv = 0.0;
    for (const AffineExpr& e : c.v) {
      const double val = e.value(x);
      nv += val * val;
    }
    nv = std::sqrt(nv);
    const double t = c.t.value(x);
    rep.soc = std::max(rep.soc, (nv - t) / (1.0 + std::abs(t)));
  }
  for (const ConeProgram::Rsoc& c : p.rsocs_) {
    const double u = c.u.value(x);
    const double t = c.t.value(x);
    double nw = 0.0;
    for (const AffineExpr& e : c.w) {
      const double val = e.value(x);
      nw += val * val;
    }
    const double viol = std::max({nw - u * t, -u, -t});
    rep.rsoc = std::max(rep.rsoc, viol / (1.0 + std::abs(u * t)));
  }
  for (int bi = 0; bi < p.num_blocks(); ++bi) {
    double lmin, lmax;
    if (p.blocks_[bi].hermitian) {
      const HermitianMatrix h = p.herm_value(bi, x);
      Eigen::SelfAdjointEigenSolver<CMatrix> es(h.mat(), Eigen::EigenvaluesOnly);
      lmin = es.eigenvalues()(0);
      lmax = es.eigenvalues()(h.dim() - 1);
    } else {
      const RMatrix s = p.sym_value(bi, x);
      Eigen::SelfAdjointEigenSolver<RMatrix> es(s, Eigen::EigenvaluesOnly);
      lmin = es.eigenvalues()(0);
      lmax = es.eigenvalues()(s.rows() - 1);
    }
    rep.psd = std::max(rep.psd, -lmin / (1.0 + std::max(lmax, 0.0)));
  }
  for (size_t i = 0; i < p.scalar_lb_.size(); ++i) {
    const double v = x(p.scalar_index_[i]);
    if (p.scalar_lb_[i] > -kInf) {
      rep.bounds = std::max(
          rep.bounds, (p.scalar_lb_[i] - v) / (1.0 + std::abs(p.scalar_lb_[i])));
    }
    if (p.scalar_ub_[i] < kInf) {
      rep.bounds = std::max(
          rep.bounds, (v - p.scalar_ub_[i]) / (1.0 + std::abs(p.scalar_ub_[i])));
    }
  }
  rep.eq = std::max(rep.eq, 0.0);
  rep.ineq = std::max(rep.ineq, 0.0);
  rep.soc = std::max(rep.soc, 0.0);
  rep.rsoc = std::max(rep.rsoc, 0.0);
  rep.psd = std::max(rep.psd, 0.0);
  rep.bounds = std::max(rep.bounds, 0.0);
  return rep;
}

namespace {

nlohmann::json expr_json(const AffineExpr& e) {
  nlohmann::json j;
  j["constant"] = e.constant;
  nlohmann::json terms = nlohmann::json::array();
  for (const LinTerm& t : e.terms) {
    terms.push_back({{"var", t.var}, {"coeff", t.coeff}});
  }
  j["terms"] = std::move(terms);
  return j;
}

}  // namespace

void ConeProgram::dump_json(std::ostream& os) const {
  nlohmann::json j;
  j["num_vars"] = num_vars_;
  nlohmann::json scalars = nlohmann::json::array();
  for (size_t i = 0; i < scalar_lb_.size(); ++i) {
    nlohmann::json entry;
    entry["var"] = scalar_index_[i];
    entry["lb"] = nullptr;
    entry["ub"] = nullptr;
    if (scalar_lb_[i] > -kInf) entry["lb"] = scalar_lb_[i];
    if (scalar_ub_[i] < kInf) entry["ub"] = scalar_ub_[i];
    scalars.push_back(std::move(entry));
  }
  j["scalars"] = std::move(scalars);
  nlohmann::json blocks = nlohmann::json::array();
  for (const Block& b : blocks_) {
    blocks.push_back({{"kind", b.hermitian ? "hermitian" : "symmetric"},
                      {"dim", b.dim},
                      {"offset", b.offset},
                      {"size", b.size}});
  }
  j["blocks"] = std::move(blocks);
  j["objective"] = expr_json(objective_);
  nlohmann::json eqs = nlohmann::json::array();
  for (const AffineExpr& e : eqs_) eqs.push_back(expr_json(e));
  j["eq_zero"] = std::move(eqs);
  nlohmann::json les = nlohmann::json::array();
  for (const AffineExpr& e : ineqs_) les.push_back(expr_json(e));
  j["le_zero"] = std::move(les);
  nlohmann::json socs = nlohmann::json::array();
  for (const Soc& c : socs_) {
    nlohmann::json v = nlohmann::json::array();
    for (const AffineExpr& e : c.v) v.push_back(expr_json(e));
    socs.push_back({{"t", expr_json(c.t)}, {"v", std::move(v)}});
  }
  j["soc"] = std::move(socs);
  nlohmann::json rsocs = nlohmann::json::array();
  for (const Rsoc& c : rsocs_) {
    nlohmann::json w = nlohmann::json::array();
    for (const AffineExpr& e : c.w) w.push_back(expr_json(e));
    rsocs.push_back(
        {{"u", expr_json(c.u)}, {"t", expr_json(c.t)}, {"w", std::move(w)}});
  }
  j["rsoc"] = std::move(rsocs);
  os << j.dump(2) << "\n";
}

}  // namespace radcom
