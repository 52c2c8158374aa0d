#include "med/closed_form.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

namespace med {

namespace {

using RealMatrix = Eigen::MatrixXd;

constexpr double kClosureTol = 1e-8;
constexpr double kEigenspaceTol = 1e-10;

// Real coordinates of a Hermitian matrix: d diagonal entries followed by the
// real and imaginary parts of the strict upper triangle.
RealVector real_coordinates(const HermitianMatrix& h) {
  const int d = h.dim();
  RealVector out(d * d);
  int k = 0;
  for (int i = 0; i < d; ++i) out(k++) = h(i, i).real();
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      out(k++) = h(i, j).real();
      out(k++) = h(i, j).imag();
    }
  }
  return out;
}

RealVector min_norm_solve(const RealMatrix& a, const RealVector& b) {
  return Eigen::CompleteOrthogonalDecomposition<RealMatrix>(a).solve(b);
}

// Lawson-Hanson active set method for min ||Ax - b|| subject to x >= 0.
RealVector nnls(const RealMatrix& a, const RealVector& b) {
  const Eigen::Index n = a.cols();
  RealVector x = RealVector::Zero(n);
  std::vector<bool> passive(static_cast<size_t>(n), false);
  const double tol = 1e-12 * std::max(1.0, a.cwiseAbs().maxCoeff()) * std::max<Eigen::Index>(n, a.rows());

  auto solve_passive = [&](RealVector& s) {
    std::vector<Eigen::Index> cols;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (passive[static_cast<size_t>(j)]) cols.push_back(j);
    }
    RealMatrix sub(a.rows(), static_cast<Eigen::Index>(cols.size()));
    for (size_t k = 0; k < cols.size(); ++k) sub.col(static_cast<Eigen::Index>(k)) = a.col(cols[k]);
    const RealVector z = min_norm_solve(sub, b);
    s.setZero(n);
    for (size_t k = 0; k < cols.size(); ++k) s(cols[k]) = z(static_cast<Eigen::Index>(k));
  };

  for (int outer = 0; outer < 3 * n + 10; ++outer) {
    const RealVector w = a.transpose() * (b - a * x);
    Eigen::Index t = -1;
    double best = tol;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!passive[static_cast<size_t>(j)] && w(j) > best) {
        best = w(j);
        t = j;
      }
    }
    if (t < 0) break;
    passive[static_cast<size_t>(t)] = true;

    RealVector s;
    for (int inner = 0; inner < 3 * n + 10; ++inner) {
      solve_passive(s);
      bool all_positive = true;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[static_cast<size_t>(j)] && s(j) <= 0) all_positive = false;
      }
      if (all_positive) break;
      double alpha = 1.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[static_cast<size_t>(j)] && s(j) <= 0) alpha = std::min(alpha, x(j) / (x(j) - s(j)));
      }
      x += alpha * (s - x);
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[static_cast<size_t>(j)] && x(j) <= tol) {
          passive[static_cast<size_t>(j)] = false;
          x(j) = 0.0;
        }
      }
    }
    x = s.cwiseMax(0.0);
  }
  return x;
}

// Projector onto eigenvectors whose eigenvalue is within kEigenspaceTol of
// `target`, weighted by alpha (default: uniform, trace d).
HermitianMatrix weighted_eigenspace(const SpectralDecomposition& spec, double target, int d,
                                    const std::optional<std::vector<double>>& alpha) {
  std::vector<Eigen::Index> cols;
  for (Eigen::Index k = 0; k < spec.eigenvalues.size(); ++k) {
    if (std::abs(spec.eigenvalues(k) - target) <= kEigenspaceTol) cols.push_back(k);
  }
  const auto m = static_cast<int>(cols.size());
  std::vector<double> weights(static_cast<size_t>(m), static_cast<double>(d) / m);
  if (alpha) {
    if (static_cast<int>(alpha->size()) != m) {
      throw PreconditionError("alpha: expected " + std::to_string(m) + " weights for the top eigenspace");
    }
    const double total = std::accumulate(alpha->begin(), alpha->end(), 0.0);
    if (std::abs(total - d) > 1e-10 || std::any_of(alpha->begin(), alpha->end(), [](double x) { return x < 0; })) {
      throw PreconditionError("alpha: weights must be nonnegative and sum to d");
    }
    weights = *alpha;
  }
  HermitianMatrix out = HermitianMatrix::zero(d);
  for (int k = 0; k < m; ++k) {
    out = out + HermitianMatrix::projector(spec.eigenvectors.col(cols[static_cast<size_t>(k)])) *
                    weights[static_cast<size_t>(k)];
  }
  return out;
}

ClosedFormSolution uniform_solution(const Ensemble& e, std::string method, double tol) {
  ClosedFormSolution s;
  s.method = std::move(method);
  s.applicability = Applicability::degenerate_uniform;
  s.p_opt = 1.0 / e.size();
  s.lambdas = equal_priors(e.size());
  s.povm = Povm::uniform(e.dim(), e.size());
  s.certificate = certify_optimal(e, *s.povm, tol);
  if (!s.certificate->passed()) {
    s.applicability = Applicability::inapplicable;
    s.reason = "uniform POVM failed certification";
  }
  return s;
}

// Carries Pi'_1 around the orbit, solves for the weights, assembles and
// certifies. `s` already holds p_opt, pi_prime_1 and tau_1.
void complete_orbit(const Ensemble& e, ClosedFormSolution& s, double tol,
                    const std::optional<std::vector<double>>& fixed_lambdas = std::nullopt) {
  const auto& gens = *e.generators();
  std::vector<HermitianMatrix> orbit;
  for (const auto& u : gens.unitaries()) orbit.push_back(s.pi_prime_1->conjugated(u));

  if (fixed_lambdas) {
    s.lambdas = *fixed_lambdas;
  } else {
    const auto feas = nnls_feasibility(orbit);
    if (!feas.feasible) {
      std::ostringstream os;
      os << "identity is not in the convex hull of the rotated measurement operators (residual "
         << feas.residual << ")";
      s.applicability = Applicability::inapplicable;
      s.reason = os.str();
      s.lambdas = feas.lambdas;
      return;
    }
    s.lambdas = feas.lambdas;
  }
  try {
    s.povm = assemble_povm(*s.pi_prime_1, gens, s.lambdas);
  } catch (const AssemblyError& err) {
    s.applicability = Applicability::inapplicable;
    s.reason = err.what();
    return;
  }
  s.certificate = certify_optimal(e, *s.povm, tol);
  if (!s.certificate->passed()) {
    std::ostringstream os;
    os << "assembled POVM failed certification (min margin " << s.certificate->min_margin() << ")";
    s.applicability = Applicability::inapplicable;
    s.reason = os.str();
    return;
  }
  s.applicability = Applicability::exact;
}

void require_equiprobable_orbit(const Ensemble& e, const char* who) {
  if (!e.generators()) throw PreconditionError(std::string(who) + ": ensemble has no generators");
  if (!e.equal_priors()) throw PreconditionError(std::string(who) + ": priors must all equal 1/N");
}

// Seed conjugate state and measurement operator from the spectrum of rho_1:
// tau_1 = sum_i (a_max - a_i)/(d a_max - 1) |psi_i><psi_i|.
void seed_from_spectrum(const Ensemble& e, ClosedFormSolution& s,
                        const std::optional<std::vector<double>>& alpha) {
  const int d = e.dim();
  const auto spec = eigh(e.state(0).hermitian());
  const double a_max = spec.eigenvalues.maxCoeff();
  s.p_opt = static_cast<double>(d) / e.size() * a_max;
  const double denom = d * a_max - 1.0;
  s.tau_1 = spec.apply([a_max, denom](double a) { return (a_max - a) / denom; });
  s.pi_prime_1 = weighted_eigenspace(spec, a_max, d, alpha);
}

bool maximally_mixed_seed(const Ensemble& e) {
  const double a_max = eigh(e.state(0).hermitian()).eigenvalues.maxCoeff();
  return e.dim() * a_max - 1.0 <= 1e-10;
}

}  // namespace

std::string to_string(Applicability a) {
  switch (a) {
    case Applicability::exact:
      return "exact";
    case Applicability::degenerate_uniform:
      return "degenerate_uniform";
    case Applicability::inapplicable:
      break;
  }
  return "inapplicable";
}

FeasibilityResult nnls_feasibility(const std::vector<HermitianMatrix>& pi_primes) {
  if (pi_primes.empty()) return {};
  const int d = pi_primes.front().dim();
  const auto n = static_cast<Eigen::Index>(pi_primes.size());
  const Eigen::Index rows = static_cast<Eigen::Index>(d) * d + 1;
  RealMatrix a(rows, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (pi_primes[static_cast<size_t>(i)].dim() != d) throw PreconditionError("nnls_feasibility: dimension mismatch");
    a.col(i) << real_coordinates(pi_primes[static_cast<size_t>(i)]), 1.0;
  }
  RealVector b(rows);
  b << real_coordinates(HermitianMatrix::identity(d)), 1.0;

  // A small ridge term selects the minimum-norm point of the solution set;
  // the support it finds is then re-solved exactly.
  const double ridge = 1e-6 * std::max(1.0, a.norm());
  RealMatrix aug(rows + n, n);
  aug << a, ridge * RealMatrix::Identity(n, n);
  RealVector baug(rows + n);
  baug << b, RealVector::Zero(n);
  RealVector x = nnls(aug, baug);

  std::vector<Eigen::Index> support;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (x(i) > 0) support.push_back(i);
  }
  if (!support.empty()) {
    RealMatrix sub(rows, static_cast<Eigen::Index>(support.size()));
    for (size_t k = 0; k < support.size(); ++k) sub.col(static_cast<Eigen::Index>(k)) = a.col(support[k]);
    const RealVector z = min_norm_solve(sub, b);
    if (z.minCoeff() >= 0 && (sub * z - b).norm() <= (a * x - b).norm()) {
      x.setZero();
      for (size_t k = 0; k < support.size(); ++k) x(support[k]) = z(static_cast<Eigen::Index>(k));
    }
  }
  const double residual_ridge = (a * x - b).norm();
  const double threshold = 1e-8 * std::sqrt(static_cast<double>(rows));
  if (residual_ridge > threshold) {
    // Fall back to the plain active-set solution in case the ridge masked an exact one.
    const RealVector plain = nnls(a, b);
    if ((a * plain - b).norm() < residual_ridge) x = plain;
  }

  FeasibilityResult out;
  out.residual = (a * x - b).norm();
  out.feasible = out.residual <= threshold;
  out.lambdas.assign(x.data(), x.data() + n);
  return out;
}

Povm assemble_povm(const HermitianMatrix& pi_prime_1, const UnitarySet& generators,
                   const std::vector<double>& lambdas) {
  if (static_cast<int>(lambdas.size()) != generators.size()) {
    throw PreconditionError("assemble_povm: expected one weight per generator");
  }
  Povm povm;
  for (int i = 0; i < generators.size(); ++i) {
    povm.elements.push_back(pi_prime_1.conjugated(generators[i]) * lambdas[static_cast<size_t>(i)]);
  }
  const double defect = povm.completeness_defect();
  if (defect > 1e-8) {
    std::ostringstream os;
    os << "assemble_povm: completeness defect " << defect << " exceeds 1e-8";
    throw AssemblyError(os.str());
  }
  return povm;
}

ClosedFormSolution solve_irreducible(const Ensemble& ensemble, const IrreducibleOptions& options) {
  require_equiprobable_orbit(ensemble, "solve_irreducible");
  const int commutant = commutant_dimension(*ensemble.generators());
  if (commutant != 1) {
    throw PreconditionError("solve_irreducible: generating set is reducible (commutant dimension " +
                            std::to_string(commutant) + ")");
  }
  if (maximally_mixed_seed(ensemble)) return uniform_solution(ensemble, "irreducible", options.tol);

  ClosedFormSolution s;
  s.method = "irreducible";
  seed_from_spectrum(ensemble, s, options.alpha);
  complete_orbit(ensemble, s, options.tol);
  return s;
}

ClosedFormSolution solve_latitude_orbit(const Ensemble& ensemble, double tol) {
  require_equiprobable_orbit(ensemble, "solve_latitude_orbit");
  if (!ensemble.latitude()) throw PreconditionError("solve_latitude_orbit: ensemble has no latitude parameters");
  const auto& params = *ensemble.latitude();
  params.validate();
  const int d = params.dim();
  const int n = ensemble.size();
  if (params.a * std::abs(std::sin(params.theta)) <= 1e-12) {
    auto s = uniform_solution(ensemble, "spin_latitude", tol);
    return s;
  }

  ClosedFormSolution s;
  s.method = "spin_latitude";
  s.p_opt = (1.0 + params.a * (d - 1) * std::sin(params.theta)) / n;

  // tau_1 = (I + 2b n'.J)/d with b = 1/(2j), n' on the equator at phi + pi.
  const auto ops = spin_operators(params.two_j);
  const double b = 1.0 / params.two_j;
  const double phi_c = params.phi + std::numbers::pi;
  const HermitianMatrix n_dot_j = ops.jx * std::cos(phi_c) + ops.jy * std::sin(phi_c);
  const HermitianMatrix tau = (HermitianMatrix::identity(d) + n_dot_j * (2 * b)) * (1.0 / d);
  s.tau_1 = tau;
  s.pi_prime_1 = weighted_eigenspace(eigh(tau), 0.0, d, std::nullopt);
  complete_orbit(ensemble, s, tol);
  return s;
}

ClosedFormSolution solve_spin_latitude(const SpinLatitudeParams& params, double tol) {
  return solve_latitude_orbit(cyclic_spin_ensemble(params), tol);
}

ClosedFormSolution solve_group_covariant(const Ensemble& ensemble, double tol) {
  require_equiprobable_orbit(ensemble, "solve_group_covariant");
  const double closure = group_closure_defect(*ensemble.generators());
  if (closure > kClosureTol) {
    std::ostringstream os;
    os << "solve_group_covariant: unitaries are not closed under products (defect " << closure << ")";
    throw PreconditionError(os.str());
  }
  if (maximally_mixed_seed(ensemble)) return uniform_solution(ensemble, "group_covariant", tol);

  ClosedFormSolution s;
  s.method = "group_covariant";
  seed_from_spectrum(ensemble, s, std::nullopt);

  // sum_g Pi'_g / |G| must be the identity; Schur guarantees it for an
  // irreducible group, otherwise it is checked here.
  const auto& gens = *ensemble.generators();
  ComplexMatrix avg = ComplexMatrix::Zero(ensemble.dim(), ensemble.dim());
  for (const auto& u : gens.unitaries()) avg += s.pi_prime_1->conjugated(u).matrix();
  avg /= static_cast<double>(gens.size());
  const double defect = max_abs(avg - ComplexMatrix::Identity(ensemble.dim(), ensemble.dim()));
  if (defect > 1e-8) {
    std::ostringstream os;
    os << "group average of the measurement operators is not the identity (defect " << defect << ")";
    s.applicability = Applicability::inapplicable;
    s.reason = os.str();
    return s;
  }
  complete_orbit(ensemble, s, tol, equal_priors(ensemble.size()));
  return s;
}

ClosedFormSolution solve_closed_form(const Ensemble& ensemble, double tol) {
  ClosedFormSolution none;
  none.applicability = Applicability::inapplicable;
  if (!ensemble.generators()) {
    none.reason = "ensemble has no generating unitaries";
    return none;
  }
  if (!ensemble.equal_priors()) {
    none.reason = "closed forms require equal priors";
    return none;
  }
  std::optional<ClosedFormSolution> last;
  if (ensemble.latitude()) {
    auto s = solve_latitude_orbit(ensemble, tol);
    if (s.optimal()) return s;
    last = std::move(s);
  }
  const bool closed = group_closure_defect(*ensemble.generators()) <= kClosureTol;
  if (closed) {
    auto s = solve_group_covariant(ensemble, tol);
    if (s.optimal()) return s;
    if (!last) last = std::move(s);
  }
  if (commutant_dimension(*ensemble.generators()) == 1) {
    auto s = solve_irreducible(ensemble, {std::nullopt, tol});
    if (s.optimal()) return s;
    if (!last) last = std::move(s);
  }
  if (last) return *last;
  none.reason = "reducible generating set with no applicable construction";
  return none;
}

}  // namespace med
