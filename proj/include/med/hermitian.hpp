#pragma once

// Dense complex Hermitian kernel: spectral decomposition and the PSD
// primitives (square root, pseudo-inverse, trace norm) used everywhere else.

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace med {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Default tolerances shared by the kernel.
inline constexpr double kPsdSlack = 1e-9;
inline constexpr double kReconstructionTol = 1e-8;
inline constexpr double kRankCutoff = 1e-10;

/// Raised when a numerical precondition (PSD, dimension, hermiticity) fails.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when the eigensolver fails to converge.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Largest absolute entry, ||A||_max.
double max_abs(const ComplexMatrix& a);

/// ||A - A^dagger||_max.
double hermiticity_defect(const ComplexMatrix& a);

/// A square complex matrix with entry(i,j) == conj(entry(j,i)).
///
/// Construction from an arbitrary matrix rejects inputs whose hermiticity
/// defect exceeds `kReconstructionTol * max(1, ||A||_max)` and otherwise
/// stores the symmetrized part (A + A^dagger)/2, so the stored entries are
/// exactly Hermitian.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  explicit HermitianMatrix(const ComplexMatrix& a);

  /// Stores (A + A^dagger)/2 without checking the defect.
  static HermitianMatrix symmetrized(const ComplexMatrix& a);
  static HermitianMatrix identity(int dim);
  static HermitianMatrix zero(int dim);
  static HermitianMatrix diagonal(const RealVector& diag);
  /// |v><v|
  static HermitianMatrix projector(const ComplexVector& v);

  int dim() const { return static_cast<int>(m_.rows()); }
  const ComplexMatrix& matrix() const { return m_; }
  Complex operator()(int i, int j) const { return m_(i, j); }
  double trace() const { return m_.trace().real(); }

  HermitianMatrix operator+(const HermitianMatrix& o) const;
  HermitianMatrix operator-(const HermitianMatrix& o) const;
  HermitianMatrix operator*(double s) const;
  friend HermitianMatrix operator*(double s, const HermitianMatrix& h) { return h * s; }

  /// U H U^dagger, re-symmetrized.
  HermitianMatrix conjugated(const ComplexMatrix& u) const;

 private:
  explicit HermitianMatrix(ComplexMatrix a, bool /*trusted*/) : m_(std::move(a)) {}
  ComplexMatrix m_;
};

/// Eigenpairs of a Hermitian matrix; eigenvalues ascending, column k of
/// `eigenvectors` paired with eigenvalue k.
struct SpectralDecomposition {
  RealVector eigenvalues;
  ComplexMatrix eigenvectors;

  /// V diag(f(lambda)) V^dagger for a real spectral function f.
  template <typename F>
  HermitianMatrix apply(F&& f) const {
    RealVector mapped = eigenvalues.unaryExpr(f);
    return HermitianMatrix::symmetrized(eigenvectors * mapped.asDiagonal() *
                                        eigenvectors.adjoint());
  }

  HermitianMatrix reconstruct() const {
    return apply([](double x) { return x; });
  }
};

SpectralDecomposition eigh(const HermitianMatrix& h);

struct PsdReport {
  bool psd = false;
  double min_eigenvalue = 0.0;
  explicit operator bool() const { return psd; }
};

/// True iff the minimum eigenvalue is >= -tol; always reports that eigenvalue.
PsdReport is_psd(const HermitianMatrix& h, double tol = kPsdSlack);

/// Principal square root of a PSD matrix. Eigenvalues in [-1e-10, 0) are
/// clamped to zero; anything more negative is a PreconditionError.
HermitianMatrix sqrt_psd(const HermitianMatrix& h);

/// Pseudo-inverse on the support: eigenvalues <= rank_tol * lambda_max map
/// to zero, the rest to their reciprocal.
HermitianMatrix pinv_psd(const HermitianMatrix& h, double rank_tol = kRankCutoff);

/// Sum of absolute eigenvalues.
double trace_norm(const HermitianMatrix& h);

/// Re Tr(A B) for Hermitian A, B.
double trace_product(const HermitianMatrix& a, const HermitianMatrix& b);

}  // namespace med
