#include "med/hermitian.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace med {

double max_abs(const ComplexMatrix& a) {
  if (a.size() == 0) return 0.0;
  return a.cwiseAbs().maxCoeff();
}

double hermiticity_defect(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) return INFINITY;
  return max_abs(a - a.adjoint());
}

HermitianMatrix::HermitianMatrix(const ComplexMatrix& a) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    std::ostringstream os;
    os << "HermitianMatrix: expected a non-empty square matrix, got " << a.rows() << "x"
       << a.cols();
    throw PreconditionError(os.str());
  }
  const double defect = hermiticity_defect(a);
  const double allowed = kReconstructionTol * std::max(1.0, max_abs(a));
  if (!(defect <= allowed)) {
    std::ostringstream os;
    os << "HermitianMatrix: hermiticity defect " << defect << " exceeds " << allowed;
    throw PreconditionError(os.str());
  }
  m_ = (a + a.adjoint()) * 0.5;
}

HermitianMatrix HermitianMatrix::symmetrized(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) throw PreconditionError("HermitianMatrix: matrix is not square");
  return HermitianMatrix(ComplexMatrix((a + a.adjoint()) * 0.5), true);
}

HermitianMatrix HermitianMatrix::identity(int dim) {
  return HermitianMatrix(ComplexMatrix::Identity(dim, dim), true);
}

HermitianMatrix HermitianMatrix::zero(int dim) {
  return HermitianMatrix(ComplexMatrix::Zero(dim, dim), true);
}

HermitianMatrix HermitianMatrix::diagonal(const RealVector& diag) {
  return HermitianMatrix(ComplexMatrix(diag.cast<Complex>().asDiagonal()), true);
}

HermitianMatrix HermitianMatrix::projector(const ComplexVector& v) {
  return symmetrized(v * v.adjoint());
}

HermitianMatrix HermitianMatrix::operator+(const HermitianMatrix& o) const {
  return HermitianMatrix(ComplexMatrix(m_ + o.m_), true);
}

HermitianMatrix HermitianMatrix::operator-(const HermitianMatrix& o) const {
  return HermitianMatrix(ComplexMatrix(m_ - o.m_), true);
}

HermitianMatrix HermitianMatrix::operator*(double s) const {
  return HermitianMatrix(ComplexMatrix(m_ * s), true);
}

HermitianMatrix HermitianMatrix::conjugated(const ComplexMatrix& u) const {
  return symmetrized(u * m_ * u.adjoint());
}

SpectralDecomposition eigh(const HermitianMatrix& h) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h.matrix());
  if (solver.info() != Eigen::Success) {
    std::ostringstream os;
    os << "eigh: no convergence for " << h.dim() << "x" << h.dim()
       << " matrix with max-norm " << max_abs(h.matrix());
    throw ConvergenceError(os.str());
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

PsdReport is_psd(const HermitianMatrix& h, double tol) {
  if (tol < 0) throw PreconditionError("is_psd: tolerance must be nonnegative");
  const double lo = Eigen::SelfAdjointEigenSolver<ComplexMatrix>(h.matrix(), Eigen::EigenvaluesOnly)
                        .eigenvalues()
                        .minCoeff();
  return {lo >= -tol, lo};
}

HermitianMatrix sqrt_psd(const HermitianMatrix& h) {
  const auto spec = eigh(h);
  const double lo = spec.eigenvalues.minCoeff();
  if (lo < -1e-10) {
    std::ostringstream os;
    os << "sqrt_psd: matrix is not PSD (min eigenvalue " << lo << ")";
    throw PreconditionError(os.str());
  }
  return spec.apply([](double x) { return x > 0 ? std::sqrt(x) : 0.0; });
}

HermitianMatrix pinv_psd(const HermitianMatrix& h, double rank_tol) {
  const auto spec = eigh(h);
  const double top = spec.eigenvalues.maxCoeff();
  if (top <= 0) return HermitianMatrix::zero(h.dim());
  const double cut = rank_tol * top;
  return spec.apply([cut](double x) { return x > cut ? 1.0 / x : 0.0; });
}

double trace_norm(const HermitianMatrix& h) {
  return Eigen::SelfAdjointEigenSolver<ComplexMatrix>(h.matrix(), Eigen::EigenvaluesOnly)
      .eigenvalues()
      .cwiseAbs()
      .sum();
}

double trace_product(const HermitianMatrix& a, const HermitianMatrix& b) {
  // Tr(AB) = sum_ij A_ij B_ji = sum_ij A_ij conj(B_ij) for Hermitian B.
  return (a.matrix().array() * b.matrix().conjugate().array()).sum().real();
}

}  // namespace med
