#pragma once

// Optimality machinery for minimum-error discrimination: success
// probability, the Lagrange operator M = sum_i p_i rho_i Pi_i, the PSD
// conditions M - p_j rho_j >= 0, complementarity, and Helstrom families.

#include "med/ensemble.hpp"

#include <optional>
#include <vector>

namespace med {

/// Default certification tolerance.
inline constexpr double kCertifyTol = 1e-7;

/// Measurement elements. Validity is checked on demand, not at
/// construction, so that invalid candidates can still be certified (and fail).
struct Povm {
  std::vector<HermitianMatrix> elements;

  int dim() const { return elements.empty() ? 0 : elements.front().dim(); }
  int size() const { return static_cast<int>(elements.size()); }
  const HermitianMatrix& operator[](int i) const { return elements[static_cast<size_t>(i)]; }

  /// ||sum Pi_i - I||_max
  double completeness_defect() const;
  /// Smallest eigenvalue over all elements.
  double min_eigenvalue() const;
  bool is_valid(double psd_tol = kPsdSlack, double completeness_tol = 1e-8) const;

  static Povm uniform(int dim, int count);
  Povm conjugated(const ComplexMatrix& w) const;
};

struct LagrangeOperator {
  ComplexMatrix matrix;
  double hermiticity_defect = 0.0;

  /// (M + M^dagger)/2
  HermitianMatrix symmetrized() const { return HermitianMatrix::symmetrized(matrix); }
  Complex trace() const { return matrix.trace(); }
};

/// Helstrom ratio p and the conjugate states. An index j with p == p_j
/// (within tolerance) is degenerate: its conjugate is undefined and omitted.
struct HelstromFamily {
  double ratio = 0.0;
  std::vector<std::optional<DensityMatrix>> conjugates;
  /// Minimum eigenvalue of each returned conjugate (0 for degenerate indices).
  std::vector<double> min_eigenvalues;
  /// Whether each returned conjugate has a (numerically) zero eigenvalue.
  std::vector<bool> rank_deficient;

  int size() const { return static_cast<int>(conjugates.size()); }
  bool degenerate(int j) const { return !conjugates[static_cast<size_t>(j)].has_value(); }
};

enum class Verdict { pass, fail };

struct Certificate {
  double success_probability = 0.0;
  double hermiticity_defect = 0.0;
  /// min eigenvalue of M_sym - p_j rho_j per j
  std::vector<double> psd_margins;
  /// Tr(tau_j Pi_j) per j when a family is attached; 0 at degenerate indices.
  std::optional<std::vector<double>> complementarity;
  double completeness_defect = 0.0;
  double povm_min_eigenvalue = 0.0;
  /// Tr(M), which equals the optimal probability at an optimum.
  double implied_probability = 0.0;
  Verdict verdict = Verdict::fail;
  double tol = kCertifyTol;

  bool passed() const { return verdict == Verdict::pass; }
  double min_margin() const;
};

/// Raised by extract_helstrom_family when the input is not (close enough to) optimal.
class ExtractionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// sum_i p_i Tr(rho_i Pi_i)
double success_probability(const Ensemble& ensemble, const Povm& povm);

LagrangeOperator lagrange_operator(const Ensemble& ensemble, const Povm& povm);

/// Checks, in order, POVM validity, hermiticity of M and the PSD margins.
/// Only a dimension or count mismatch throws.
Certificate certify_optimal(const Ensemble& ensemble, const Povm& povm, double tol = kCertifyTol);

/// tau_j = (M_sym - p_j rho_j)/(p - p_j) for every non-degenerate j.
HelstromFamily extract_helstrom_family(const Ensemble& ensemble, const Povm& povm,
                                       double tol = kCertifyTol);

struct FamilyCheck {
  bool ok = false;
  double max_defect = 0.0;
  explicit operator bool() const { return ok; }
};

/// max_{i,j} ||M_i - M_j||_max with M_j = p_j rho_j + (p - p_j) tau_j.
FamilyCheck verify_helstrom_family(const Ensemble& ensemble, const HelstromFamily& family,
                                   double tol = 1e-8);

/// Tr(tau_j Pi_j) for each j (0 at degenerate indices).
std::vector<double> complementarity(const HelstromFamily& family, const Povm& povm);

/// Largest entry of tau_j Pi_j over non-degenerate j (the operator form of
/// complementarity).
double complementarity_operator_defect(const HelstromFamily& family, const Povm& povm);

/// success_probability(ensemble, povm) <= family.ratio + 1e-9
bool ratio_upper_bound_check(const Ensemble& ensemble, const HelstromFamily& family, const Povm& povm);

/// max_i ||M U_i - U_i M||_max over the ensemble's generators (0 if none).
double commutation_defect(const Ensemble& ensemble, const Povm& povm);

}  // namespace med
