#pragma once

// Container/builder for dense conic programs of the form
//
//   minimize    c^T x
//   subject to  linear equalities and inequalities,
//               second-order cones            ||v(x)|| <= t(x),
//               rotated second-order cones    u(x) t(x) >= ||w(x)||^2,
//                                             u(x), t(x) >= 0,
//               matrix blocks X >= 0 (real symmetric or complex Hermitian),
//
// where x stacks scalar variables and the packed coordinates of the matrix
// blocks. Every constraint argument is an affine expression of x.
//
// Matrix blocks use an isometric packing ("svec"): diagonal entries appear
// as-is, off-diagonal entries are scaled by sqrt(2) (real and imaginary parts
// separately for Hermitian blocks), so Euclidean inner products of packed
// vectors equal trace inner products of the matrices.

#include <iosfwd>
#include <vector>

#include "radcom/hermitian.hpp"
#include "radcom/types.hpp"

namespace radcom {

struct LinTerm {
  int var = 0;
  double coeff = 0.0;
};

struct AffineExpr {
  std::vector<LinTerm> terms;
  double constant = 0.0;

  AffineExpr() = default;
  /*implicit*/ AffineExpr(double c) : constant(c) {}
  static AffineExpr variable(int var, double coeff = 1.0);

  AffineExpr& add(int var, double coeff);
  AffineExpr& operator+=(const AffineExpr& other);
  AffineExpr& operator-=(const AffineExpr& other);
  AffineExpr& operator*=(double factor);
  double value(const RVector& x) const;
};

AffineExpr operator+(AffineExpr a, const AffineExpr& b);
AffineExpr operator-(AffineExpr a, const AffineExpr& b);
AffineExpr operator*(double factor, AffineExpr a);
AffineExpr operator-(AffineExpr a);

class ConeProgram;
struct ValidationReport;
ValidationReport validate_solution(const ConeProgram& program,
                                   const RVector& x);

class ConeProgram {
 public:
  // ----- variables -------------------------------------------------------
  int add_scalar(double lb = -kInf, double ub = kInf);
  int add_sym_block(int dim);   // real symmetric PSD block, returns block id
  int add_herm_block(int dim);  // complex Hermitian PSD block, returns block id

  // Packed-coordinate index of a real symmetric block entry (i >= j).
  int sym_index(int block, int i, int j) const;

  // ----- affine expression helpers over matrix blocks --------------------
  AffineExpr trace_expr(int block) const;  // tr X (real for both kinds)
  // <C, X> = tr(C X) for real symmetric C against a real symmetric block.
  AffineExpr inner_expr(int block, const RMatrix& c) const;
  // <C, X> = tr(C X) for Hermitian C against a Hermitian block.
  AffineExpr inner_expr(int block, const HermitianMatrix& c) const;

  // ----- objective and constraints ---------------------------------------
  void minimize(AffineExpr objective);
  void add_eq(AffineExpr lhs, double rhs = 0.0);  // lhs == rhs
  void add_le(AffineExpr lhs, double rhs = 0.0);  // lhs <= rhs
  void add_ge(AffineExpr lhs, double rhs = 0.0);  // lhs >= rhs
  void add_soc(AffineExpr t, std::vector<AffineExpr> v);
  void add_rsoc(AffineExpr u, AffineExpr t, std::vector<AffineExpr> w);

  // ----- solution access --------------------------------------------------
  RMatrix sym_value(int block, const RVector& x) const;
  HermitianMatrix herm_value(int block, const RVector& x) const;
  double scalar_value(int var, const RVector& x) const;

  // ----- introspection ----------------------------------------------------
  int num_vars() const { return num_vars_; }
  int num_scalars() const { return static_cast<int>(scalar_lb_.size()); }
  int num_blocks() const { return static_cast<int>(blocks_.size()); }
  int num_eqs() const { return static_cast<int>(eqs_.size()); }
  int num_ineqs() const { return static_cast<int>(ineqs_.size()); }
  int num_socs() const { return static_cast<int>(socs_.size()); }
  int num_rsocs() const { return static_cast<int>(rsocs_.size()); }

  // Self-describing JSON dump for bug reports and offline inspection.
  void dump_json(std::ostream& os) const;

 private:
  friend struct Canonical;
  friend class ConicSolver;
  friend struct ValidationReport;
  friend ValidationReport validate_solution(const ConeProgram&, const RVector&);

  struct Block {
    bool hermitian = false;
    int dim = 0;
    int offset = 0;  // first packed coordinate
    int size = 0;    // number of packed coordinates
  };
  struct Soc {
    AffineExpr t;
    std::vector<AffineExpr> v;
  };
  struct Rsoc {
    AffineExpr u;
    AffineExpr t;
    std::vector<AffineExpr> w;
  };

  void check_block(int block) const;
  void check_expr(const AffineExpr& e, const char* where) const;

  int num_vars_ = 0;
  std::vector<int> scalar_index_;  // variable index of each scalar
  std::vector<double> scalar_lb_, scalar_ub_;
  std::vector<Block> blocks_;
  AffineExpr objective_;
  std::vector<AffineExpr> eqs_;    // expr == 0
  std::vector<AffineExpr> ineqs_;  // expr <= 0
  std::vector<Soc> socs_;
  std::vector<Rsoc> rsocs_;
};

// Worst violation per constraint class, each normalized by the natural scale
// of its constraint (so values compare directly against solver tolerances).
// Computed purely from the program data and the given point; independent of
// any solver internals.
struct ValidationReport {
  double eq = 0.0;
  double ineq = 0.0;
  double soc = 0.0;
  double rsoc = 0.0;
  double psd = 0.0;
  double bounds = 0.0;

  double worst() const;
  bool ok(double tol) const { return worst() <= tol; }
};

ValidationReport validate_solution(const ConeProgram& p, const RVector& x);

}  // namespace radcom
