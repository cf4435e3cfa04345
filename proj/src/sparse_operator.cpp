#include "mfbog/sparse_operator.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mfbog {

double max_abs_entry(const Eigen::SparseMatrix<double>& m) {
  double best = 0.0;
  for (Eigen::Index k = 0; k < m.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it) {
      best = std::max(best, std::abs(it.value()));
    }
  }
  return best;
}

double symmetry_defect(const Eigen::SparseMatrix<double>& m, bool anti) {
  Eigen::SparseMatrix<double> transposed = m.transpose();
  Eigen::SparseMatrix<double> diff = anti ? Eigen::SparseMatrix<double>(m + transposed)
                                          : Eigen::SparseMatrix<double>(m - transposed);
  return max_abs_entry(diff);
}

SparseOperator::SparseOperator(BasisPtr basis, Eigen::SparseMatrix<double> matrix,
                               Symmetry symmetry)
    : basis_(std::move(basis)), matrix_(std::move(matrix)), symmetry_(symmetry) {
  const auto n = static_cast<Eigen::Index>(basis_->size());
  if (matrix_.rows() != n || matrix_.cols() != n) {
    throw std::invalid_argument("operator dimension does not match its basis");
  }
  matrix_.makeCompressed();
  if (symmetry_ != Symmetry::general) {
    const double scale = std::max(1.0, max_abs_entry(matrix_));
    if (symmetry_defect() > 1e-12 * scale) {
      throw std::logic_error(symmetry_ == Symmetry::hermitian
                                 ? "operator tagged hermitian is not symmetric"
                                 : "operator tagged anti-hermitian is not antisymmetric");
    }
  }
}

double SparseOperator::symmetry_defect() const {
  switch (symmetry_) {
    case Symmetry::hermitian:
      return mfbog::symmetry_defect(matrix_, false);
    case Symmetry::anti_hermitian:
      return mfbog::symmetry_defect(matrix_, true);
    case Symmetry::general:
      break;
  }
  return 0.0;
}

Monomial adjoint(const Monomial& monomial) {
  Monomial out(monomial.rbegin(), monomial.rend());
  for (Ladder& f : out) f.creation = !f.creation;
  return out;
}

OperatorRecipe::OperatorRecipe(ModeSet modes, std::string name)
    : modes_(std::move(modes)), name_(std::move(name)) {}

void OperatorRecipe::add(double coefficient, Monomial monomial, NumberFunction left,
                         NumberFunction right) {
  for (const Ladder& f : monomial) {
    if (f.mode >= modes_.size()) {
      throw std::invalid_argument(name_ + ": ladder mode outside the mode set");
    }
  }
  const Label transfer = monomial_momentum(modes_, monomial);
  if (std::any_of(transfer.begin(), transfer.end(), [](int k) { return k != 0; })) {
    throw std::logic_error(name_ + ": monomial does not conserve momentum");
  }
  if (coefficient == 0.0) return;
  terms_.push_back({coefficient, std::move(monomial), std::move(left), std::move(right)});
}

void OperatorRecipe::add_with_adjoint(double coefficient, const Monomial& monomial,
                                      const NumberFunction& left,
                                      const NumberFunction& right) {
  add(coefficient, monomial, left, right);
  add(coefficient, adjoint(monomial), right, left);
}

void OperatorRecipe::add_minus_adjoint(double coefficient, const Monomial& monomial,
                                       const NumberFunction& left,
                                       const NumberFunction& right) {
  add(coefficient, monomial, left, right);
  add(-coefficient, adjoint(monomial), right, left);
}

void OperatorRecipe::append(const OperatorRecipe& other) {
  if (!modes_.same_lattice(other.modes_)) {
    throw std::invalid_argument("cannot append recipes over different mode sets");
  }
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
}

SparseOperator OperatorRecipe::assemble(const BasisPtr& basis, Symmetry symmetry) const {
  if (!basis->modes().same_lattice(modes_)) {
    throw std::invalid_argument(name_ + ": basis uses a different mode set");
  }
  std::vector<Eigen::Triplet<double>> entries;
  for (const RecipeTerm& term : terms_) {
    auto part = matrix_element_monomial(*basis, term.monomial, term.coefficient, term.left,
                                        term.right);
    entries.insert(entries.end(), part.begin(), part.end());
  }
  const auto n = static_cast<Eigen::Index>(basis->size());
  Eigen::SparseMatrix<double> matrix(n, n);
  matrix.setFromTriplets(entries.begin(), entries.end());
  matrix.prune(0.0);
  return SparseOperator(basis, std::move(matrix), symmetry);
}

}  // namespace mfbog
