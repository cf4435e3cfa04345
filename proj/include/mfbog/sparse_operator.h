#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "mfbog/fock.h"

namespace mfbog {

enum class Symmetry { general, hermitian, anti_hermitian };

/// Real sparse operator on a SectorBasis. Construction with a hermitian or
/// anti-hermitian tag verifies the tag to 1e-12 (relative to the largest entry).
class SparseOperator {
 public:
  SparseOperator(BasisPtr basis, Eigen::SparseMatrix<double> matrix, Symmetry symmetry);

  const SectorBasis& basis() const { return *basis_; }
  const BasisPtr& basis_ptr() const { return basis_; }
  const Eigen::SparseMatrix<double>& matrix() const { return matrix_; }
  Eigen::MatrixXd dense() const { return Eigen::MatrixXd(matrix_); }
  Symmetry symmetry() const { return symmetry_; }
  Eigen::Index dimension() const { return matrix_.rows(); }

  /// max |A - A^T| (hermitian tag) or max |A + A^T| (anti-hermitian tag).
  double symmetry_defect() const;

 private:
  BasisPtr basis_;
  Eigen::SparseMatrix<double> matrix_;
  Symmetry symmetry_;
};

double max_abs_entry(const Eigen::SparseMatrix<double>& m);

/// max |A - A^T| or, with `anti` set, max |A + A^T|.
double symmetry_defect(const Eigen::SparseMatrix<double>& m, bool anti);

/// One term coefficient * left(N_+) * monomial * right(N_+).
struct RecipeTerm {
  double coefficient = 0.0;
  Monomial monomial;
  NumberFunction left;
  NumberFunction right;
};

/// Symbolic sum of ladder monomials, each conserving total momentum.
class OperatorRecipe {
 public:
  OperatorRecipe(ModeSet modes, std::string name);

  const std::string& name() const { return name_; }
  const ModeSet& modes() const { return modes_; }
  const std::vector<RecipeTerm>& terms() const { return terms_; }

  /// Throws std::logic_error for a monomial that changes total momentum.
  void add(double coefficient, Monomial monomial, NumberFunction left = {},
           NumberFunction right = {});
  /// Adds the term and its adjoint.
  void add_with_adjoint(double coefficient, const Monomial& monomial,
                        const NumberFunction& left = {}, const NumberFunction& right = {});
  /// Adds the term minus its adjoint.
  void add_minus_adjoint(double coefficient, const Monomial& monomial,
                         const NumberFunction& left = {}, const NumberFunction& right = {});
  void append(const OperatorRecipe& other);

  /// P * Op * P on the basis. Modes absent from the basis (the zero mode of
  /// an excitation basis) are rejected.
  SparseOperator assemble(const BasisPtr& basis, Symmetry symmetry) const;

 private:
  ModeSet modes_;
  std::string name_;
  std::vector<RecipeTerm> terms_;
};

Monomial adjoint(const Monomial& monomial);

}  // namespace mfbog
