#include "med/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace med {

namespace {

ComplexMatrix gaussian_matrix(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexMatrix g(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(r, c) = Complex(re, im);
    }
  }
  return g;
}

// Normalizes a positive family {A_i} to a POVM via S^{-1/2} A_i S^{-1/2}.
std::optional<Povm> normalize_family(const std::vector<HermitianMatrix>& parts) {
  const int d = parts.front().dim();
  HermitianMatrix sum = HermitianMatrix::zero(d);
  for (const auto& a : parts) sum = sum + a;
  const auto spec = eigh(sum);
  if (spec.eigenvalues.minCoeff() <= 1e-12 * spec.eigenvalues.maxCoeff()) return std::nullopt;
  const HermitianMatrix inv_sqrt = spec.apply([](double x) { return 1.0 / std::sqrt(x); });
  Povm out;
  for (const auto& a : parts) out.elements.push_back(a.conjugated(inv_sqrt.matrix()));
  return out;
}

double probability(const Ensemble& ensemble, const std::vector<HermitianMatrix>& elements) {
  double p = 0.0;
  for (int j = 0; j < ensemble.size(); ++j) {
    p += ensemble.prior(j) * trace_product(ensemble.state(j).hermitian(), elements[static_cast<size_t>(j)]);
  }
  return p;
}

// Adds (I - sum Pi)/N to every element when the completeness defect exceeds 1e-12.
void restore_completeness(std::vector<HermitianMatrix>& elements) {
  const int d = elements.front().dim();
  ComplexMatrix defect = ComplexMatrix::Identity(d, d);
  for (const auto& e : elements) defect -= e.matrix();
  if (max_abs(defect) <= 1e-12) return;
  const HermitianMatrix share = HermitianMatrix::symmetrized(defect / static_cast<double>(elements.size()));
  for (auto& e : elements) e = e + share;
}

OracleResult iterate(const Ensemble& ensemble, std::vector<HermitianMatrix> pi, const FixedPointOptions& opt) {
  const int n = ensemble.size();
  const int d = ensemble.dim();
  // p_j rho_j, reused every sweep.
  std::vector<ComplexMatrix> weighted;
  for (int j = 0; j < n; ++j) weighted.push_back(ensemble.prior(j) * ensemble.state(j).matrix());

  OracleResult res;
  double last_p = probability(ensemble, pi);
  if (opt.record_history) res.history.push_back(last_p);

  std::vector<HermitianMatrix> next(static_cast<size_t>(n));
  for (int it = 1; it <= opt.max_iter; ++it) {
    std::vector<HermitianMatrix> x;
    x.reserve(static_cast<size_t>(n));
    HermitianMatrix total = HermitianMatrix::zero(d);
    for (int j = 0; j < n; ++j) {
      const auto& w = weighted[static_cast<size_t>(j)];
      x.push_back(HermitianMatrix::symmetrized(w * pi[static_cast<size_t>(j)].matrix() * w));
      total = total + x.back();
    }
    const HermitianMatrix t_inv = pinv_psd(sqrt_psd(total), 1e-12);
    for (int j = 0; j < n; ++j) next[static_cast<size_t>(j)] = x[static_cast<size_t>(j)].conjugated(t_inv.matrix());
    restore_completeness(next);

    double step = 0.0;
    for (int j = 0; j < n; ++j) {
      step = std::max(step, max_abs(next[static_cast<size_t>(j)].matrix() - pi[static_cast<size_t>(j)].matrix()));
    }
    std::swap(pi, next);

    const double p = probability(ensemble, pi);
    if (p < last_p - 1e-10) {
      ++res.monotonicity_violations;
      res.worst_decrease = std::max(res.worst_decrease, last_p - p);
    }
    last_p = p;
    if (opt.record_history) res.history.push_back(p);

    res.iterations = it;
    res.final_step_norm = step;
    if (step <= opt.step_tol) {
      res.converged = true;
      break;
    }
  }
  res.povm = Povm{std::move(pi)};
  res.p = success_probability(ensemble, res.povm);
  return res;
}

}  // namespace

OracleResult fixed_point_solve(const Ensemble& ensemble, const FixedPointOptions& options) {
  if (options.max_iter < 1) throw PreconditionError("fixed_point_solve: max_iter must be at least 1");
  const int n = ensemble.size();
  const int d = ensemble.dim();
  auto best = iterate(ensemble, Povm::uniform(d, n).elements, options);
  if (best.converged) return best;

  for (int r = 0; r < options.restarts; ++r) {
    // Half-way mix of the uniform POVM and a seeded random POVM stays in the interior.
    const Povm noise = random_povm(d, n, options.seed * 7919 + static_cast<std::uint64_t>(r) + 1);
    std::vector<HermitianMatrix> start;
    for (int j = 0; j < n; ++j) start.push_back(HermitianMatrix::identity(d) * (0.5 / n) + noise[j] * 0.5);
    auto run = iterate(ensemble, std::move(start), options);
    run.iterations += best.iterations;
    if (run.converged || run.p > best.p) best = std::move(run);
    if (best.converged) break;
  }
  return best;
}

Povm srm(const Ensemble& ensemble) {
  const int d = ensemble.dim();
  HermitianMatrix avg = HermitianMatrix::zero(d);
  for (int i = 0; i < ensemble.size(); ++i) avg = avg + ensemble.state(i).hermitian() * ensemble.prior(i);
  const HermitianMatrix r = pinv_psd(sqrt_psd(avg), 1e-12);
  std::vector<HermitianMatrix> elements;
  for (int i = 0; i < ensemble.size(); ++i) {
    elements.push_back((ensemble.state(i).hermitian() * ensemble.prior(i)).conjugated(r.matrix()));
  }
  restore_completeness(elements);
  return Povm{std::move(elements)};
}

double helstrom_two_state(double p1, const DensityMatrix& rho1, double p2, const DensityMatrix& rho2) {
  if (p1 < 0 || p2 < 0 || std::abs(p1 + p2 - 1.0) > 1e-12) {
    std::ostringstream os;
    os << "helstrom_two_state: priors must be nonnegative and sum to 1, got " << p1 << " + " << p2;
    throw PreconditionError(os.str());
  }
  if (rho1.dim() != rho2.dim()) throw PreconditionError("helstrom_two_state: dimension mismatch");
  return 0.5 * (1.0 + trace_norm(rho1.hermitian() * p1 - rho2.hermitian() * p2));
}

Povm random_povm(int dim, int count, std::uint64_t seed) {
  if (count < 1) throw PreconditionError("random_povm: count must be at least 1");
  std::mt19937_64 rng(seed);
  for (int attempt = 0; attempt < 3; ++attempt) {
    std::vector<HermitianMatrix> parts;
    for (int i = 0; i < count; ++i) {
      const ComplexMatrix g = gaussian_matrix(dim, dim, rng);
      parts.push_back(HermitianMatrix::symmetrized(g.adjoint() * g));
    }
    if (auto povm = normalize_family(parts)) {
      if (count == 1) povm->elements.front() = HermitianMatrix::identity(dim);
      return *povm;
    }
  }
  throw ConvergenceError("random_povm: sum of draws stayed singular after 3 attempts");
}

DensityMatrix random_density_matrix(int dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const ComplexMatrix g = gaussian_matrix(dim, dim, rng);
  const HermitianMatrix h = HermitianMatrix::symmetrized(g * g.adjoint());
  return DensityMatrix(h * (1.0 / h.trace()));
}

ComplexMatrix random_unitary(int dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const ComplexMatrix g = gaussian_matrix(dim, dim, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(dim, dim);
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < dim; ++k) {
    const Complex rk = r(k, k);
    if (std::abs(rk) > 0) q.col(k) *= rk / std::abs(rk);
  }
  return q;
}

}  // namespace med
