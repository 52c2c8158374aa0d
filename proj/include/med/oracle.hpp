#pragma once

// Numerical solvers used to cross-check the closed forms: the
// completeness-preserving fixed-point iteration, the square-root measurement,
// the two-state Helstrom value, and seeded random POVMs.

#include "med/certify.hpp"

#include <cstdint>
#include <vector>

namespace med {

struct FixedPointOptions {
  int max_iter = 20000;
  double step_tol = 1e-10;
  std::uint64_t seed = 0;
  /// Seeded restarts attempted when the first run does not converge.
  int restarts = 2;
  /// Keep the per-iteration success probability in OracleResult::history.
  bool record_history = false;
};

struct OracleResult {
  Povm povm;
  double p = 0.0;
  int iterations = 0;
  bool converged = false;
  double final_step_norm = 0.0;
  /// Number of sweeps where the success probability dropped by more than 1e-10.
  int monotonicity_violations = 0;
  double worst_decrease = 0.0;
  std::vector<double> history;
};

/// Iterates Pi_j <- T+ (p_j rho_j Pi_j rho_j p_j) T+ with
/// T = sqrt(sum_k p_k^2 rho_k Pi_k rho_k), starting at Pi_j = I/N.
OracleResult fixed_point_solve(const Ensemble& ensemble, const FixedPointOptions& options = {});

/// Square-root measurement rho_bar^{-1/2} p_i rho_i rho_bar^{-1/2}, completed
/// uniformly on the kernel of rho_bar.
Povm srm(const Ensemble& ensemble);

/// (1 + ||p1 rho1 - p2 rho2||_1)/2
double helstrom_two_state(double p1, const DensityMatrix& rho1, double p2, const DensityMatrix& rho2);

/// S^{-1/2} A_i S^{-1/2} with A_i = G^dagger G for complex Gaussian G.
/// Deterministic per seed.
Povm random_povm(int dim, int count, std::uint64_t seed);

/// Ginibre-distributed random density matrix, deterministic per seed.
DensityMatrix random_density_matrix(int dim, std::uint64_t seed);

/// Haar-ish random unitary (QR of a complex Gaussian), deterministic per seed.
ComplexMatrix random_unitary(int dim, std::uint64_t seed);

}  // namespace med
