#pragma once

// Closed-form optimal measurements for equiprobable similarity-transformed
// ensembles rho_i = U_i rho_1 U_i^dagger.
//
// Every construction follows the same recipe: pick a seed measurement
// operator Pi'_1 (trace d) orthogonal to the seed conjugate state tau_1,
// carry it around the orbit, find convex weights lambda_i with
// sum_i lambda_i U_i Pi'_1 U_i^dagger = I, and re-certify the assembled POVM.
// A construction that fails either step is reported inapplicable.

#include "med/certify.hpp"

#include <optional>
#include <string>
#include <vector>

namespace med {

enum class Applicability { exact, inapplicable, degenerate_uniform };

std::string to_string(Applicability a);

struct ClosedFormSolution {
  double p_opt = 0.0;
  std::optional<HermitianMatrix> pi_prime_1;
  std::optional<HermitianMatrix> tau_1;
  std::vector<double> lambdas;
  /// Present whenever the orbit could be completed; certified iff exact.
  std::optional<Povm> povm;
  std::optional<Certificate> certificate;
  Applicability applicability = Applicability::inapplicable;
  /// Which construction produced this ("irreducible", "spin_latitude", "group_covariant").
  std::string method;
  /// Why the solution is inapplicable (empty otherwise).
  std::string reason;

  bool optimal() const { return applicability != Applicability::inapplicable; }
};

struct FeasibilityResult {
  bool feasible = false;
  std::vector<double> lambdas;
  double residual = 0.0;
};

/// Convex weights with sum_i lambda_i Pi'_i = I, lambda >= 0, sum lambda = 1,
/// by nonnegative least squares over the real coordinates of the Hermitian
/// matrices. Among exact solutions the minimum-norm one is returned.
FeasibilityResult nnls_feasibility(const std::vector<HermitianMatrix>& pi_primes);

/// Raised when the assembled POVM misses completeness by more than 1e-8.
class AssemblyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Pi_i = lambda_i U_i Pi'_1 U_i^dagger
Povm assemble_povm(const HermitianMatrix& pi_prime_1, const UnitarySet& generators,
                   const std::vector<double>& lambdas);

struct IrreducibleOptions {
  /// Weights over the top eigenspace of rho_1 (in ascending eigenvector
  /// order); must be nonnegative and sum to d. Defaults to d/m each.
  std::optional<std::vector<double>> alpha;
  double tol = kCertifyTol;
};

/// p_opt = (d/N) a_max for an irreducible generating set and equal priors.
ClosedFormSolution solve_irreducible(const Ensemble& ensemble, const IrreducibleOptions& options = {});

/// p_opt = (1/N)[1 + a (d-1) sin theta] on the cyclic spin-j orbit.
ClosedFormSolution solve_spin_latitude(const SpinLatitudeParams& params, double tol = kCertifyTol);

/// Spin-latitude construction on an ensemble that carries latitude
/// parameters, using the ensemble's own generators (so non-uniform phis work).
ClosedFormSolution solve_latitude_orbit(const Ensemble& ensemble, double tol = kCertifyTol);

/// Uniform weights 1/|G| for an ensemble labelled by a group (closed under
/// products up to a phase).
ClosedFormSolution solve_group_covariant(const Ensemble& ensemble, double tol = kCertifyTol);

/// Tries latitude, group-covariant and irreducible constructions in that
/// order of specificity and returns the first optimal one.
ClosedFormSolution solve_closed_form(const Ensemble& ensemble, double tol = kCertifyTol);

}  // namespace med
