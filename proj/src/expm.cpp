#include "mfbog/expm.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "mfbog/sparse_operator.h"

namespace mfbog {

namespace {

// Higham (2005), degree 13.
constexpr double kTheta13 = 5.371920351148152;
constexpr double kPade13[14] = {64764752532480000.0,
                                32382376266240000.0,
                                7771770303897600.0,
                                1187353796428800.0,
                                129060195264000.0,
                                10559470521600.0,
                                670442572800.0,
                                33522128640.0,
                                1323241920.0,
                                40840800.0,
                                960960.0,
                                16380.0,
                                182.0,
                                1.0};

}  // namespace

Eigen::MatrixXd expm_dense(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("expm of a non-square matrix");
  const Eigen::Index n = a.rows();
  if (n == 0) return a;
  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  if (!std::isfinite(norm1)) throw std::invalid_argument("expm of a non-finite matrix");
  if (norm1 == 0.0) return Eigen::MatrixXd::Identity(n, n);

  int s = 0;
  if (norm1 > kTheta13) s = static_cast<int>(std::ceil(std::log2(norm1 / kTheta13)));
  const Eigen::MatrixXd x = a / std::ldexp(1.0, s);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd x2 = x * x;
  const Eigen::MatrixXd x4 = x2 * x2;
  const Eigen::MatrixXd x6 = x4 * x2;
  const double* b = kPade13;

  Eigen::MatrixXd inner = b[13] * x6 + b[11] * x4 + b[9] * x2;
  Eigen::MatrixXd u = x * (x6 * inner + b[7] * x6 + b[5] * x4 + b[3] * x2 + b[1] * id);
  inner = b[12] * x6 + b[10] * x4 + b[8] * x2;
  Eigen::MatrixXd v = x6 * inner + b[6] * x6 + b[4] * x4 + b[2] * x2 + b[0] * id;

  Eigen::MatrixXd r = (v - u).partialPivLu().solve(v + u);
  for (int i = 0; i < s; ++i) r = r * r;
  return r;
}

Eigen::VectorXd expm_krylov_action(const Eigen::SparseMatrix<double>& g,
                                   const Eigen::VectorXd& v, double t, double tol,
                                   int krylov_dim) {
  if (g.rows() != g.cols() || g.cols() != v.size()) {
    throw std::invalid_argument("krylov action: dimension mismatch");
  }
  const Eigen::Index n = v.size();
  const int m_max = static_cast<int>(std::min<Eigen::Index>(krylov_dim, n));
  if (t == 0.0) return v;
  // exp(t G) = exp(|t| (sign G)); march over [0, |t|]
  const double sign = t < 0.0 ? -1.0 : 1.0;
  t = std::abs(t);
  Eigen::VectorXd w = v;
  double done = 0.0;
  double tau = t;
  int steps = 0;
  while (done < t) {
    const double beta = w.norm();
    if (beta == 0.0) break;

    Eigen::MatrixXd basis(n, m_max + 1);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m_max + 1, m_max);
    basis.col(0) = w / beta;
    int m = m_max;
    bool breakdown = false;
    for (int j = 0; j < m_max; ++j) {
      Eigen::VectorXd z = sign * (g * basis.col(j));
      for (int pass = 0; pass < 2; ++pass) {
        for (int i = 0; i <= j; ++i) {
          const double c = basis.col(i).dot(z);
          h(i, j) += c;
          z -= c * basis.col(i);
        }
      }
      const double next = z.norm();
      h(j + 1, j) = next;
      if (next <= 1e-14 * beta) {
        m = j + 1;
        breakdown = true;
        break;
      }
      basis.col(j + 1) = z / next;
    }

    const double remaining = t - done;
    tau = std::min(tau, remaining);
    Eigen::VectorXd coeffs;
    for (;;) {
      const Eigen::MatrixXd e = expm_dense(tau * h.topLeftCorner(m, m));
      const double err = breakdown ? 0.0 : beta * h(m, m - 1) * tau * std::abs(e(m - 1, 0));
      if (err <= tol * tau / t || breakdown) {
        coeffs = e.col(0);
        break;
      }
      tau *= 0.5;
      if (tau < 1e-12 * t || ++steps > 100000) {
        throw SolverError("krylov exponential: step size underflow", err);
      }
    }
    w = beta * (basis.leftCols(m) * coeffs);
    done += tau;
    tau = std::min(2.0 * tau, t - done);
    if (tau <= 0.0) break;
  }
  return w;
}

Unitary::Unitary(const Eigen::SparseMatrix<double>& generator, double tol, ExpmMethod method,
                 std::uint64_t seed)
    : dimension_(generator.rows()), tol_(tol) {
  if (generator.rows() != generator.cols()) {
    throw std::invalid_argument("generator must be square");
  }
  const double scale = std::max(1.0, max_abs_entry(generator));
  if (symmetry_defect(generator, true) > 1e-10 * scale) {
    throw std::invalid_argument("generator is not anti-hermitian");
  }
  if (method == ExpmMethod::automatic) {
    method = dimension_ >= kKrylovThreshold ? ExpmMethod::krylov : ExpmMethod::dense;
  }
  dense_ = method == ExpmMethod::dense;
  if (dense_) {
    matrix_ = expm_dense(Eigen::MatrixXd(generator));
    const Eigen::MatrixXd defect =
        matrix_.transpose() * matrix_ - Eigen::MatrixXd::Identity(dimension_, dimension_);
    unitarity_residual_ = dimension_ == 0 ? 0.0 : defect.cwiseAbs().maxCoeff();
  } else {
    generator_ = generator;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    for (int probe = 0; probe < 3; ++probe) {
      Eigen::VectorXd x(dimension_);
      for (Eigen::Index i = 0; i < dimension_; ++i) x[i] = normal(rng);
      x.normalize();
      const Eigen::VectorXd y = apply(x);
      const double norm_defect = std::abs(y.norm() - 1.0);
      const double round_trip = (apply_adjoint(y) - x).cwiseAbs().maxCoeff();
      unitarity_residual_ = std::max({unitarity_residual_, norm_defect, round_trip});
    }
  }
  if (unitarity_residual_ > 10.0 * tol) {
    throw SolverError("matrix exponential is not unitary to tolerance", unitarity_residual_);
  }
}

Unitary Unitary::identity(Eigen::Index dimension) {
  Unitary u;
  u.dimension_ = dimension;
  u.dense_ = true;
  u.matrix_ = Eigen::MatrixXd::Identity(dimension, dimension);
  return u;
}

const Eigen::MatrixXd& Unitary::matrix() const {
  if (!dense_) throw std::logic_error("action-only unitary has no dense matrix");
  return matrix_;
}

Eigen::VectorXd Unitary::apply(const Eigen::VectorXd& v) const {
  if (v.size() != dimension_) throw std::invalid_argument("unitary: dimension mismatch");
  if (dense_) return matrix_ * v;
  return expm_krylov_action(generator_, v, 1.0, tol_);
}

Eigen::VectorXd Unitary::apply_adjoint(const Eigen::VectorXd& v) const {
  if (v.size() != dimension_) throw std::invalid_argument("unitary: dimension mismatch");
  if (dense_) return matrix_.transpose() * v;
  return expm_krylov_action(generator_, v, -1.0, tol_);
}

Eigen::MatrixXd Unitary::apply(const Eigen::MatrixXd& m) const {
  if (m.rows() != dimension_) throw std::invalid_argument("unitary: dimension mismatch");
  if (dense_) return matrix_ * m;
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (Eigen::Index j = 0; j < m.cols(); ++j) out.col(j) = apply(Eigen::VectorXd(m.col(j)));
  return out;
}

Eigen::MatrixXd Unitary::apply_adjoint(const Eigen::MatrixXd& m) const {
  if (m.rows() != dimension_) throw std::invalid_argument("unitary: dimension mismatch");
  if (dense_) return matrix_.transpose() * m;
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    out.col(j) = apply_adjoint(Eigen::VectorXd(m.col(j)));
  }
  return out;
}

}  // namespace mfbog
