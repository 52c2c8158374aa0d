#pragma once

#include "med/closed_form.hpp"
#include "med/oracle.hpp"

#include <numbers>
#include <random>

namespace medtest {

using namespace med;

inline constexpr double kPi = std::numbers::pi;

inline ComplexMatrix pauli_x() {
  ComplexMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

inline ComplexMatrix pauli_y() {
  ComplexMatrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}

inline ComplexMatrix pauli_z() {
  ComplexMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

inline ComplexVector basis(int d, int k) {
  ComplexVector v = ComplexVector::Zero(d);
  v(k) = 1.0;
  return v;
}

inline HermitianMatrix random_hermitian(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  ComplexMatrix g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = Complex(n(rng), n(rng));
  return HermitianMatrix::symmetrized(g + g.adjoint());
}

inline HermitianMatrix random_psd(int d, std::mt19937_64& rng, double floor = 0.0) {
  std::normal_distribution<double> n(0.0, 1.0);
  ComplexMatrix g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = Complex(n(rng), n(rng));
  return HermitianMatrix::symmetrized(g * g.adjoint()) + HermitianMatrix::identity(d) * floor;
}

inline Ensemble orthogonal_pair() {
  return Ensemble({0.5, 0.5}, {DensityMatrix::pure(basis(2, 0)), DensityMatrix::pure(basis(2, 1))});
}

inline Povm projective_pair() {
  return Povm{{HermitianMatrix::projector(basis(2, 0)), HermitianMatrix::projector(basis(2, 1))}};
}

inline Ensemble trine() {
  return bloch_latitude_ensemble(1.0, kPi / 2, {0.0, 2 * kPi / 3, 4 * kPi / 3});
}

/// Equatorial mixed qubits with Bloch length a at equally spaced azimuths.
inline Ensemble equatorial(double a, int n) {
  std::vector<double> phis;
  for (int k = 0; k < n; ++k) phis.push_back(2 * kPi * k / n);
  return bloch_latitude_ensemble(a, kPi / 2, phis);
}

/// Same states as `equatorial` but without the latitude tag, so only the
/// irreducible (or group) construction applies.
inline Ensemble untagged(const Ensemble& e) {
  return Ensemble(e.priors(), e.states(), e.generators());
}

/// Equatorial qubits with Bloch vectors a(cos phi_k, sin phi_k, 0), phi_k = 2 pi k/n,
/// generated from the first by reflections cos(phi_k/2) X + sin(phi_k/2) Y.
/// For n >= 3 the set is irreducible.
inline Ensemble equatorial_reflections(double a, int n) {
  std::vector<ComplexMatrix> us{ComplexMatrix::Identity(2, 2)};
  for (int k = 1; k < n; ++k) {
    const double half = kPi * k / n;
    us.push_back(std::cos(half) * pauli_x() + std::sin(half) * pauli_y());
  }
  return similarity_ensemble(DensityMatrix::bloch(a, 0, 0), UnitarySet(us), equal_priors(n));
}

/// Orbit of rho under {I, X, X^2 Z} (Weyl shift X, clock Z on C^3) written in
/// the eigenbasis of rho, top eigenvector first. The set is irreducible and
/// carries the top eigenvector onto an orthonormal basis.
inline Ensemble weyl_orbit(const DensityMatrix& rho) {
  const int d = rho.dim();
  const auto spec = eigh(rho.hermitian());
  ComplexMatrix w(d, d);
  for (int k = 0; k < d; ++k) w.col(k) = spec.eigenvectors.col(d - 1 - k);
  ComplexMatrix x = ComplexMatrix::Zero(d, d);
  ComplexMatrix z = ComplexMatrix::Zero(d, d);
  for (int k = 0; k < d; ++k) {
    x((k + 1) % d, k) = 1.0;
    z(k, k) = std::polar(1.0, 2 * kPi * k / d);
  }
  std::vector<ComplexMatrix> us{ComplexMatrix::Identity(d, d), w * x * w.adjoint(), w * (x * x * z) * w.adjoint()};
  return similarity_ensemble(rho, UnitarySet(us), equal_priors(3));
}

inline Ensemble random_ensemble(int d, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> priors;
  double total = 0.0;
  for (int i = 0; i < n; ++i) total += priors.emplace_back(u(rng));
  for (auto& p : priors) p /= total;
  // Renormalize the last prior so the sum is 1 to rounding.
  double rest = 1.0;
  for (int i = 0; i + 1 < n; ++i) rest -= priors[static_cast<size_t>(i)];
  priors.back() = rest;
  std::vector<DensityMatrix> states;
  for (int i = 0; i < n; ++i) states.push_back(random_density_matrix(d, seed * 1000 + static_cast<std::uint64_t>(i) + 1));
  return Ensemble(priors, states);
}

}  // namespace medtest
