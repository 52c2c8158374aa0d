#include "helpers.hpp"

#include <doctest.h>

using namespace medtest;

namespace {

ComplexMatrix commutator(const HermitianMatrix& a, const HermitianMatrix& b) {
  return a.matrix() * b.matrix() - b.matrix() * a.matrix();
}

RealVector spectrum(const DensityMatrix& r) { return eigh(r.hermitian()).eigenvalues; }

}  // namespace

TEST_CASE("spin operators") {
  const auto half = spin_operators(1);
  CHECK(max_abs(half.jx.matrix() - 0.5 * pauli_x()) < 1e-14);
  CHECK(max_abs(half.jy.matrix() - 0.5 * pauli_y()) < 1e-14);
  CHECK(max_abs(half.jz.matrix() - 0.5 * pauli_z()) < 1e-14);

  const auto one = spin_operators(2);
  CHECK(max_abs(one.jz.matrix() - HermitianMatrix::diagonal(Eigen::Vector3d(1, 0, -1)).matrix()) < 1e-14);

  for (int two_j = 1; two_j <= 5; ++two_j) {
    const auto s = spin_operators(two_j);
    CHECK(max_abs(commutator(s.jx, s.jy) - Complex(0, 1) * s.jz.matrix()) <= 1e-12);
  }
}

TEST_CASE("similarity ensembles") {
  const ComplexMatrix h = (pauli_x() + pauli_z()) / std::sqrt(2.0);
  const UnitarySet us({ComplexMatrix::Identity(2, 2), pauli_x(), h});

  const auto mixed = similarity_ensemble(DensityMatrix::maximally_mixed(2), us, equal_priors(3));
  for (const auto& s : mixed.states()) CHECK(max_abs(s.matrix() - 0.5 * ComplexMatrix::Identity(2, 2)) < 1e-14);

  const auto flip = similarity_ensemble(DensityMatrix::pure(basis(2, 0)), UnitarySet({ComplexMatrix::Identity(2, 2), pauli_x()}),
                                        equal_priors(2));
  CHECK(max_abs(flip.state(1).matrix() - HermitianMatrix::projector(basis(2, 1)).matrix()) < 1e-14);

  const auto diag = similarity_ensemble(DensityMatrix(HermitianMatrix::diagonal(Eigen::Vector2d(0.7, 0.3))),
                                        UnitarySet({ComplexMatrix::Identity(2, 2), h}), equal_priors(2));
  const auto ev = spectrum(diag.state(1));
  CHECK(ev(0) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(ev(1) == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("cyclic spin ensembles") {
  SUBCASE("theta = 0 gives identical states") {
    const auto e = cyclic_spin_ensemble({1, 0.4, 0.0, 0.3, 5});
    for (int i = 1; i < e.size(); ++i) CHECK(max_abs(e.state(i).matrix() - e.state(0).matrix()) < 1e-12);
  }
  SUBCASE("j = 1/2, N = 2 Bloch vectors") {
    const auto e = cyclic_spin_ensemble({1, 0.5, kPi / 2, 0.0, 2});
    CHECK(max_abs(e.state(0).matrix() - DensityMatrix::bloch(0.5, 0, 0).matrix()) < 1e-12);
    CHECK(max_abs(e.state(1).matrix() - DensityMatrix::bloch(-0.5, 0, 0).matrix()) < 1e-12);
  }
  SUBCASE("j = 1 spectrum") {
    const auto e = cyclic_spin_ensemble({2, 0.3, 1.1, 0.2, 3});
    const auto ev = spectrum(e.state(0));
    CHECK(ev(0) == doctest::Approx(0.4 / 3).epsilon(1e-12));
    CHECK(ev(1) == doctest::Approx(1.0 / 3).epsilon(1e-12));
    CHECK(ev(2) == doctest::Approx(1.6 / 3).epsilon(1e-12));
  }
  SUBCASE("N versus 2N") {
    for (int two_j = 1; two_j <= 3; ++two_j) {
      const auto small = cyclic_spin_ensemble({two_j, 0.2, 0.9, 0.4, 3});
      const auto big = cyclic_spin_ensemble({two_j, 0.2, 0.9, 0.4, 6});
      for (int i = 0; i < 3; ++i) CHECK(max_abs(small.state(i).matrix() - big.state(2 * i).matrix()) <= 1e-10);
    }
  }
  SUBCASE("parameter validation") {
    CHECK_THROWS_AS(cyclic_spin_ensemble({2, 0.6, 1.0, 0.0, 3}), PreconditionError);
    CHECK_THROWS_AS(cyclic_spin_ensemble({1, 0.5, 1.0, 0.0, 1}), PreconditionError);
    CHECK_THROWS_AS(cyclic_spin_ensemble({0, 0.0, 1.0, 0.0, 3}), PreconditionError);
    CHECK_THROWS_AS(cyclic_spin_ensemble({1, -0.1, 1.0, 0.0, 3}), PreconditionError);
  }
}

TEST_CASE("bloch latitude ensembles") {
  const auto tri = trine();
  for (const auto& s : tri.states()) CHECK(spectrum(s)(1) == doctest::Approx(1.0).epsilon(1e-12));

  const auto flat = bloch_latitude_ensemble(0.0, 1.0, {0.0, 1.0, 2.0});
  for (const auto& s : flat.states()) CHECK(max_abs(s.matrix() - 0.5 * ComplexMatrix::Identity(2, 2)) < 1e-14);

  const auto e = bloch_latitude_ensemble(0.6, kPi / 4, {0.0, 2 * kPi / 3, 4 * kPi / 3});
  for (const auto& s : e.states()) {
    CHECK(s.hermitian().trace() == doctest::Approx(1.0).epsilon(1e-12));
    const auto ev = spectrum(s);
    CHECK(ev(0) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(ev(1) == doctest::Approx(0.8).epsilon(1e-12));
  }
  CHECK_THROWS_AS(bloch_latitude_ensemble(0.6, 1.0, {0.0, 0.0}), PreconditionError);
}

TEST_CASE("orbits preserve spectra") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto rho = random_density_matrix(3, seed);
    std::vector<ComplexMatrix> us{ComplexMatrix::Identity(3, 3)};
    for (int k = 0; k < 3; ++k) us.push_back(random_unitary(3, seed * 10 + static_cast<std::uint64_t>(k)));
    const auto e = similarity_ensemble(rho, UnitarySet(us), equal_priors(4));
    for (const auto& s : e.states()) CHECK((spectrum(s) - spectrum(rho)).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("commutant dimension") {
  const ComplexMatrix id = ComplexMatrix::Identity(2, 2);
  CHECK(commutant_dimension(UnitarySet({id, pauli_x(), pauli_z()})) == 1);
  ComplexMatrix phase = ComplexMatrix::Identity(2, 2);
  phase(1, 1) = std::polar(1.0, 0.7);
  CHECK(commutant_dimension(UnitarySet({id, phase})) == 2);
  CHECK(commutant_dimension(UnitarySet({ComplexMatrix::Identity(3, 3)})) == 9);

  SUBCASE("invariant under global conjugation") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto w = random_unitary(3, seed);
      const auto sets = {
          UnitarySet({ComplexMatrix::Identity(3, 3), random_unitary(3, seed + 50)}),
          cyclic_spin_ensemble({2, 0.2, 1.0, 0.0, 3}).generators().value(),
          UnitarySet({ComplexMatrix::Identity(3, 3)}),
      };
      for (const auto& s : sets) CHECK(commutant_dimension(s) == commutant_dimension(s.conjugated(w)));
    }
  }
}

TEST_CASE("ensemble validation") {
  const auto r = DensityMatrix::maximally_mixed(2);
  CHECK_THROWS_AS(Ensemble({0.5, 0.4}, {r, r}), PreconditionError);
  CHECK_THROWS_AS(Ensemble({1.2, -0.2}, {r, r}), PreconditionError);
  try {
    Ensemble({0.5, 0.4}, {r, r});
  } catch (const PreconditionError& e) {
    CHECK(std::string(e.what()).find("priors") != std::string::npos);
  }
  CHECK_THROWS_AS(DensityMatrix(HermitianMatrix::identity(2)), PreconditionError);
  CHECK_THROWS_AS(UnitarySet({pauli_x()}), PreconditionError);
  CHECK_THROWS_AS(UnitarySet({ComplexMatrix::Identity(2, 2), 2.0 * pauli_x()}), PreconditionError);

  // Generators that do not reproduce the states.
  const auto a = DensityMatrix::pure(basis(2, 0));
  CHECK_THROWS_AS(Ensemble({0.5, 0.5}, {a, a}, UnitarySet({ComplexMatrix::Identity(2, 2), pauli_x()})),
                  PreconditionError);
}
