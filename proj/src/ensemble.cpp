#include "med/ensemble.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace med {

namespace {

std::string describe(const char* what, double value) {
  std::ostringstream os;
  os << what << " " << value;
  return os.str();
}

}  // namespace

DensityMatrix::DensityMatrix(HermitianMatrix m, double tol) : m_(std::move(m)) {
  const auto psd = is_psd(m_, tol);
  if (!psd) throw PreconditionError(describe("state is not PSD: min eigenvalue", psd.min_eigenvalue));
  const double tr = m_.trace();
  if (std::abs(tr - 1.0) > tol) throw PreconditionError(describe("state trace is not 1:", tr));
}

DensityMatrix DensityMatrix::maximally_mixed(int dim) {
  return DensityMatrix(HermitianMatrix::identity(dim) * (1.0 / dim));
}

DensityMatrix DensityMatrix::pure(const ComplexVector& psi) {
  const double n = psi.norm();
  if (n == 0) throw PreconditionError("pure state from a zero vector");
  return DensityMatrix(HermitianMatrix::projector(psi / n));
}

DensityMatrix DensityMatrix::bloch(double bx, double by, double bz) {
  ComplexMatrix m(2, 2);
  m << Complex(1 + bz, 0), Complex(bx, -by), Complex(bx, by), Complex(1 - bz, 0);
  return DensityMatrix(HermitianMatrix::symmetrized(m * 0.5));
}

UnitarySet::UnitarySet(std::vector<ComplexMatrix> unitaries) : u_(std::move(unitaries)) {
  if (u_.empty()) throw PreconditionError("unitaries: empty generating set");
  dim_ = static_cast<int>(u_.front().rows());
  const ComplexMatrix id = ComplexMatrix::Identity(dim_, dim_);
  for (size_t i = 0; i < u_.size(); ++i) {
    const auto& u = u_[i];
    if (u.rows() != dim_ || u.cols() != dim_) {
      throw PreconditionError("unitaries[" + std::to_string(i) + "]: dimension mismatch");
    }
    const double defect = max_abs(u.adjoint() * u - id);
    if (defect > 1e-9) {
      throw PreconditionError("unitaries[" + std::to_string(i) + "]: not unitary (defect " +
                              std::to_string(defect) + ")");
    }
  }
  if (max_abs(u_.front() - id) > 1e-10) {
    throw PreconditionError("unitaries[0]: the first generator must be the identity");
  }
}

UnitarySet UnitarySet::conjugated(const ComplexMatrix& w) const {
  std::vector<ComplexMatrix> out;
  out.reserve(u_.size());
  for (const auto& u : u_) out.emplace_back(w * u * w.adjoint());
  out.front() = ComplexMatrix::Identity(dim_, dim_);
  return UnitarySet(std::move(out));
}

void SpinLatitudeParams::validate() const {
  if (two_j < 1) throw PreconditionError("two_j: spin must be at least 1/2");
  if (n < 2) throw PreconditionError("n: need at least two states");
  if (!(a >= 0.0) || a > a_max() + 1e-12) {
    throw PreconditionError(describe("a: outside [0, 1/(2j)], got", a));
  }
}

Ensemble::Ensemble(std::vector<double> priors, std::vector<DensityMatrix> states,
                   std::optional<UnitarySet> generators)
    : priors_(std::move(priors)), states_(std::move(states)), generators_(std::move(generators)) {
  if (states_.empty()) throw PreconditionError("states: ensemble is empty");
  if (priors_.size() != states_.size()) {
    throw PreconditionError("priors: expected " + std::to_string(states_.size()) + " entries, got " +
                            std::to_string(priors_.size()));
  }
  double total = 0.0;
  for (double p : priors_) {
    if (!(p >= 0.0)) throw PreconditionError(describe("priors: negative entry", p));
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) throw PreconditionError(describe("priors: sum is", total));
  const int d = states_.front().dim();
  for (size_t i = 0; i < states_.size(); ++i) {
    if (states_[i].dim() != d) {
      throw PreconditionError("states[" + std::to_string(i) + "]: dimension mismatch");
    }
  }
  if (generators_) {
    if (generators_->dim() != d || generators_->size() != size()) {
      throw PreconditionError("generators: expected " + std::to_string(size()) + " unitaries of dim " +
                              std::to_string(d));
    }
    const auto& seed = states_.front().matrix();
    for (int i = 0; i < size(); ++i) {
      const auto& u = (*generators_)[i];
      if (max_abs(state(i).matrix() - u * seed * u.adjoint()) > 1e-9) {
        throw PreconditionError("states[" + std::to_string(i) +
                                "]: not the similarity transform of states[0]");
      }
    }
  }
}

bool Ensemble::equal_priors(double tol) const {
  const double p = 1.0 / size();
  for (double q : priors_) {
    if (std::abs(q - p) > tol) return false;
  }
  return true;
}

Ensemble Ensemble::with_latitude(SpinLatitudeParams p) const {
  Ensemble out = *this;
  out.latitude_ = p;
  return out;
}

Ensemble Ensemble::conjugated(const ComplexMatrix& w) const {
  std::vector<DensityMatrix> states;
  states.reserve(states_.size());
  for (const auto& s : states_) states.emplace_back(s.hermitian().conjugated(w));
  std::optional<UnitarySet> gens;
  if (generators_) gens = generators_->conjugated(w);
  return Ensemble(priors_, std::move(states), std::move(gens));
}

SpinOperators spin_operators(int two_j) {
  if (two_j < 1) throw PreconditionError("spin_operators: 2j must be a positive integer");
  const int d = two_j + 1;
  const double j = 0.5 * two_j;
  ComplexMatrix jz = ComplexMatrix::Zero(d, d);
  ComplexMatrix jp = ComplexMatrix::Zero(d, d);
  for (int k = 0; k < d; ++k) {
    const double m = j - k;
    jz(k, k) = m;
    // <m+1| J+ |m> sits one row above.
    if (k > 0) jp(k - 1, k) = std::sqrt(j * (j + 1) - m * (m + 1));
  }
  const ComplexMatrix jm = jp.adjoint();
  const Complex two_i(0, 2);
  return {HermitianMatrix::symmetrized((jp + jm) * 0.5),
          HermitianMatrix::symmetrized((jp - jm) / two_i), HermitianMatrix::symmetrized(jz)};
}

ComplexMatrix unitary_exponential(const HermitianMatrix& h, double t) {
  const auto spec = eigh(h);
  const ComplexVector phases =
      spec.eigenvalues.unaryExpr([t](double x) { return std::exp(Complex(0, t * x)); });
  return spec.eigenvectors * phases.asDiagonal() * spec.eigenvectors.adjoint();
}

std::vector<double> equal_priors(int n) {
  return std::vector<double>(static_cast<size_t>(n), 1.0 / n);
}

Ensemble similarity_ensemble(const DensityMatrix& seed, const UnitarySet& unitaries,
                             std::vector<double> priors) {
  if (seed.dim() != unitaries.dim()) throw PreconditionError("orbit: seed/unitary dimension mismatch");
  std::vector<DensityMatrix> states;
  states.reserve(static_cast<size_t>(unitaries.size()));
  for (const auto& u : unitaries.unitaries()) states.emplace_back(seed.hermitian().conjugated(u));
  return Ensemble(std::move(priors), std::move(states), unitaries);
}

Ensemble cyclic_spin_ensemble(const SpinLatitudeParams& params) {
  params.validate();
  const auto ops = spin_operators(params.two_j);
  const int d = params.dim();
  const double nx = std::sin(params.theta) * std::cos(params.phi);
  const double ny = std::sin(params.theta) * std::sin(params.phi);
  const double nz = std::cos(params.theta);
  const HermitianMatrix n_dot_j = ops.jx * nx + ops.jy * ny + ops.jz * nz;
  const DensityMatrix seed((HermitianMatrix::identity(d) + n_dot_j * (2 * params.a)) * (1.0 / d));

  std::vector<ComplexMatrix> us;
  for (int k = 0; k < params.n; ++k) {
    us.push_back(unitary_exponential(ops.jz, 2 * std::numbers::pi * k / params.n));
  }
  us.front() = ComplexMatrix::Identity(d, d);
  return similarity_ensemble(seed, UnitarySet(std::move(us)), equal_priors(params.n))
      .with_latitude(params);
}

Ensemble bloch_latitude_ensemble(double a, double theta, const std::vector<double>& phis) {
  if (!(a >= 0.0) || a > 1.0) throw PreconditionError(describe("a: must lie in [0, 1], got", a));
  if (phis.empty()) throw PreconditionError("phis: empty");
  if (phis.front() != 0.0) throw PreconditionError("phis: first entry must be 0");
  const double two_pi = 2 * std::numbers::pi;
  for (size_t i = 0; i < phis.size(); ++i) {
    for (size_t k = 0; k < i; ++k) {
      const double diff = std::remainder(phis[i] - phis[k], two_pi);
      if (std::abs(diff) < 1e-12) {
        throw PreconditionError("phis: entries " + std::to_string(k) + " and " + std::to_string(i) +
                                " coincide mod 2pi");
      }
    }
  }
  const auto seed = DensityMatrix::bloch(a * std::sin(theta), 0.0, a * std::cos(theta));
  std::vector<ComplexMatrix> us;
  for (double phi : phis) {
    ComplexMatrix u = ComplexMatrix::Zero(2, 2);
    u(0, 0) = std::exp(Complex(0, -phi / 2));
    u(1, 1) = std::exp(Complex(0, phi / 2));
    us.push_back(std::move(u));
  }
  const int n = static_cast<int>(phis.size());
  auto ens = similarity_ensemble(seed, UnitarySet(std::move(us)), equal_priors(n));
  if (n >= 2) ens = ens.with_latitude({1, a, theta, 0.0, n});
  return ens;
}

int commutant_dimension(const UnitarySet& unitaries) {
  const int d = unitaries.dim();
  const int d2 = d * d;
  const ComplexMatrix id = ComplexMatrix::Identity(d, d);
  // Column-major vec: vec(UX) = (I kron U) vec X, vec(XU) = (U^T kron I) vec X.
  ComplexMatrix stacked(static_cast<Eigen::Index>(unitaries.size()) * d2, d2);
  for (int g = 0; g < unitaries.size(); ++g) {
    const auto& u = unitaries[g];
    ComplexMatrix block(d2, d2);
    for (int r = 0; r < d; ++r) {
      for (int c = 0; c < d; ++c) {
        block.block(r * d, c * d, d, d) = id(r, c) * u - u(c, r) * id;
      }
    }
    stacked.middleRows(static_cast<Eigen::Index>(g) * d2, d2) = block;
  }
  Eigen::BDCSVD<ComplexMatrix> svd(stacked);
  const RealVector& sv = svd.singularValues();
  const double cut = 1e-8 * std::max(1.0, sv.size() ? sv(0) : 0.0);
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) rank += sv(i) > cut ? 1 : 0;
  return d2 - rank;
}

double group_closure_defect(const UnitarySet& unitaries) {
  const int n = unitaries.size();
  double worst = 0.0;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const ComplexMatrix prod = unitaries[a] * unitaries[b];
      double best = INFINITY;
      for (int k = 0; k < n; ++k) {
        const Complex overlap = (unitaries[k].adjoint() * prod).trace();
        const double mag = std::abs(overlap);
        const Complex phase = mag > 0 ? overlap / mag : Complex(1, 0);
        best = std::min(best, max_abs(prod - phase * unitaries[k]));
      }
      worst = std::max(worst, best);
    }
  }
  return worst;
}

}  // namespace med
