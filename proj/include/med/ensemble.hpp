#pragma once

// Ensemble construction: explicit state lists, similarity orbits of a
// unitary generating set, spin-j rotation orbits and common-latitude qubits.

#include "med/hermitian.hpp"

#include <optional>
#include <vector>

namespace med {

/// PSD, unit-trace Hermitian operator.
class DensityMatrix {
 public:
  /// Validates PSD and |Tr - 1| within `tol`; throws PreconditionError.
  explicit DensityMatrix(HermitianMatrix m, double tol = kPsdSlack);

  static DensityMatrix maximally_mixed(int dim);
  static DensityMatrix pure(const ComplexVector& psi);
  /// Qubit state (I + b.sigma)/2.
  static DensityMatrix bloch(double bx, double by, double bz);

  int dim() const { return m_.dim(); }
  const HermitianMatrix& hermitian() const { return m_; }
  const ComplexMatrix& matrix() const { return m_.matrix(); }

 private:
  HermitianMatrix m_;
};

/// Ordered unitaries U_1 = I, U_2, ..., U_N acting on C^d.
class UnitarySet {
 public:
  explicit UnitarySet(std::vector<ComplexMatrix> unitaries);

  int dim() const { return dim_; }
  int size() const { return static_cast<int>(u_.size()); }
  const ComplexMatrix& operator[](int i) const { return u_[static_cast<size_t>(i)]; }
  const std::vector<ComplexMatrix>& unitaries() const { return u_; }

  /// W U_i W^dagger for every i.
  UnitarySet conjugated(const ComplexMatrix& w) const;

 private:
  int dim_ = 0;
  std::vector<ComplexMatrix> u_;
};

/// Spin-j latitude orbit description. `two_j` encodes j as an integer.
struct SpinLatitudeParams {
  int two_j = 1;
  double a = 0.0;
  double theta = 0.0;
  double phi = 0.0;
  int n = 2;

  int dim() const { return two_j + 1; }
  double j() const { return 0.5 * two_j; }
  /// Upper bound 1/(2j) on the purity parameter.
  double a_max() const { return 1.0 / two_j; }
  void validate() const;
};

/// Priors p_i paired with states rho_i, optionally with the generators that
/// produced them (rho_i = U_i rho_1 U_i^dagger).
class Ensemble {
 public:
  Ensemble(std::vector<double> priors, std::vector<DensityMatrix> states,
           std::optional<UnitarySet> generators = std::nullopt);

  int dim() const { return states_.front().dim(); }
  int size() const { return static_cast<int>(states_.size()); }
  double prior(int i) const { return priors_[static_cast<size_t>(i)]; }
  const DensityMatrix& state(int i) const { return states_[static_cast<size_t>(i)]; }
  const std::vector<double>& priors() const { return priors_; }
  const std::vector<DensityMatrix>& states() const { return states_; }
  const std::optional<UnitarySet>& generators() const { return generators_; }

  bool equal_priors(double tol = 1e-12) const;

  /// Set when the ensemble is a latitude orbit (spin_orbit or bloch_latitude);
  /// lets the closed-form dispatcher pick the spin-latitude construction.
  const std::optional<SpinLatitudeParams>& latitude() const { return latitude_; }
  Ensemble with_latitude(SpinLatitudeParams p) const;

  /// Conjugates every state (and generator) by a fixed unitary.
  Ensemble conjugated(const ComplexMatrix& w) const;

 private:
  std::vector<double> priors_;
  std::vector<DensityMatrix> states_;
  std::optional<UnitarySet> generators_;
  std::optional<SpinLatitudeParams> latitude_;
};

struct SpinOperators {
  HermitianMatrix jx, jy, jz;
};

/// Angular momentum matrices in the |j, m> basis ordered m = j, j-1, ..., -j.
SpinOperators spin_operators(int two_j);

/// exp(i t H) by spectral calculus.
ComplexMatrix unitary_exponential(const HermitianMatrix& h, double t);

std::vector<double> equal_priors(int n);

Ensemble similarity_ensemble(const DensityMatrix& seed, const UnitarySet& unitaries,
                             std::vector<double> priors);

/// rho_1 = (I + 2a n.J)/d rotated by U_k = exp(2 pi i (k-1) Jz / N), equal priors.
Ensemble cyclic_spin_ensemble(const SpinLatitudeParams& params);

/// Qubits with Bloch vectors a(sin t cos phi_j, sin t sin phi_j, cos t) and
/// generators diag(e^{-i phi_j/2}, e^{i phi_j/2}); equal priors.
Ensemble bloch_latitude_ensemble(double a, double theta, const std::vector<double>& phis);

/// Dimension of {X : X U_i = U_i X for all i}; 1 iff irreducible.
int commutant_dimension(const UnitarySet& unitaries);

/// Largest distance from a pairwise product U_a U_b to the nearest member of
/// the set, allowing a global phase. Zero (up to rounding) for a closed set.
double group_closure_defect(const UnitarySet& unitaries);

}  // namespace med
