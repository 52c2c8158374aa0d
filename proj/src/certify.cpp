#include "med/certify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace med {

namespace {

void check_shapes(const Ensemble& ensemble, const Povm& povm) {
  if (povm.size() != ensemble.size()) {
    std::ostringstream os;
    os << "POVM has " << povm.size() << " elements but the ensemble has " << ensemble.size() << " states";
    throw PreconditionError(os.str());
  }
  for (const auto& e : povm.elements) {
    if (e.dim() != ensemble.dim()) {
      std::ostringstream os;
      os << "POVM element dimension " << e.dim() << " does not match ensemble dimension " << ensemble.dim();
      throw PreconditionError(os.str());
    }
  }
}

}  // namespace

double Povm::completeness_defect() const {
  if (elements.empty()) return INFINITY;
  ComplexMatrix sum = ComplexMatrix::Zero(dim(), dim());
  for (const auto& e : elements) sum += e.matrix();
  return max_abs(sum - ComplexMatrix::Identity(dim(), dim()));
}

double Povm::min_eigenvalue() const {
  double lo = INFINITY;
  for (const auto& e : elements) lo = std::min(lo, is_psd(e, 0.0).min_eigenvalue);
  return lo;
}

bool Povm::is_valid(double psd_tol, double completeness_tol) const {
  return !elements.empty() && min_eigenvalue() >= -psd_tol && completeness_defect() <= completeness_tol;
}

Povm Povm::uniform(int dim, int count) {
  return Povm{std::vector<HermitianMatrix>(static_cast<size_t>(count), HermitianMatrix::identity(dim) * (1.0 / count))};
}

Povm Povm::conjugated(const ComplexMatrix& w) const {
  Povm out;
  for (const auto& e : elements) out.elements.push_back(e.conjugated(w));
  return out;
}

double Certificate::min_margin() const {
  return psd_margins.empty() ? 0.0 : *std::min_element(psd_margins.begin(), psd_margins.end());
}

double success_probability(const Ensemble& ensemble, const Povm& povm) {
  check_shapes(ensemble, povm);
  double p = 0.0;
  for (int i = 0; i < ensemble.size(); ++i) {
    p += ensemble.prior(i) * trace_product(ensemble.state(i).hermitian(), povm[i]);
  }
  if (p < -1e-10) return 0.0;
  if (p > 1.0 + 1e-10) return 1.0;
  return p;
}

LagrangeOperator lagrange_operator(const Ensemble& ensemble, const Povm& povm) {
  check_shapes(ensemble, povm);
  ComplexMatrix m = ComplexMatrix::Zero(ensemble.dim(), ensemble.dim());
  for (int i = 0; i < ensemble.size(); ++i) {
    m += ensemble.prior(i) * ensemble.state(i).matrix() * povm[i].matrix();
  }
  const double defect = hermiticity_defect(m);
  return {std::move(m), defect};
}

Certificate certify_optimal(const Ensemble& ensemble, const Povm& povm, double tol) {
  const auto lagrange = lagrange_operator(ensemble, povm);
  Certificate cert;
  cert.tol = tol;
  cert.completeness_defect = povm.completeness_defect();
  cert.povm_min_eigenvalue = povm.min_eigenvalue();
  cert.success_probability = success_probability(ensemble, povm);
  cert.hermiticity_defect = lagrange.hermiticity_defect;
  cert.implied_probability = lagrange.trace().real();

  const HermitianMatrix msym = lagrange.symmetrized();
  cert.psd_margins.reserve(static_cast<size_t>(ensemble.size()));
  for (int j = 0; j < ensemble.size(); ++j) {
    cert.psd_margins.push_back(is_psd(msym - ensemble.state(j).hermitian() * ensemble.prior(j), 0.0).min_eigenvalue);
  }

  const bool povm_ok = cert.povm_min_eigenvalue >= -tol && cert.completeness_defect <= tol;
  const bool hermitian_ok = cert.hermiticity_defect <= tol;
  const bool margins_ok = cert.min_margin() >= -tol;
  cert.verdict = povm_ok && hermitian_ok && margins_ok ? Verdict::pass : Verdict::fail;
  return cert;
}

HelstromFamily extract_helstrom_family(const Ensemble& ensemble, const Povm& povm, double tol) {
  const auto cert = certify_optimal(ensemble, povm, tol);
  if (!cert.passed()) {
    std::ostringstream os;
    os << "extract_helstrom_family: POVM is not certified optimal (min margin " << cert.min_margin()
       << ", hermiticity defect " << cert.hermiticity_defect << ", completeness defect "
       << cert.completeness_defect << ")";
    throw ExtractionError(os.str());
  }
  const double p = cert.implied_probability;
  const HermitianMatrix msym = lagrange_operator(ensemble, povm).symmetrized();

  HelstromFamily family;
  family.ratio = p;
  for (int j = 0; j < ensemble.size(); ++j) {
    const double gap = p - ensemble.prior(j);
    if (gap <= tol) {
      family.conjugates.emplace_back(std::nullopt);
      family.min_eigenvalues.push_back(0.0);
      family.rank_deficient.push_back(false);
      continue;
    }
    const HermitianMatrix tau = (msym - ensemble.state(j).hermitian() * ensemble.prior(j)) * (1.0 / gap);
    try {
      family.conjugates.emplace_back(DensityMatrix(tau, 10 * tol));
    } catch (const PreconditionError& e) {
      throw ExtractionError("extract_helstrom_family: conjugate state " + std::to_string(j) +
                            " is invalid: " + e.what());
    }
    const double lo = is_psd(tau, 0.0).min_eigenvalue;
    family.min_eigenvalues.push_back(lo);
    family.rank_deficient.push_back(lo <= tol);
  }
  return family;
}

FamilyCheck verify_helstrom_family(const Ensemble& ensemble, const HelstromFamily& family, double tol) {
  if (family.size() != ensemble.size()) throw PreconditionError("verify_helstrom_family: size mismatch");
  std::vector<ComplexMatrix> ms;
  for (int j = 0; j < ensemble.size(); ++j) {
    if (family.degenerate(j)) continue;
    ms.push_back(ensemble.prior(j) * ensemble.state(j).matrix() +
                 (family.ratio - ensemble.prior(j)) * family.conjugates[static_cast<size_t>(j)]->matrix());
  }
  double worst = 0.0;
  for (size_t i = 0; i < ms.size(); ++i) {
    for (size_t k = i + 1; k < ms.size(); ++k) worst = std::max(worst, max_abs(ms[i] - ms[k]));
  }
  return {worst <= tol, worst};
}

std::vector<double> complementarity(const HelstromFamily& family, const Povm& povm) {
  if (family.size() != povm.size()) throw PreconditionError("complementarity: size mismatch");
  std::vector<double> out;
  for (int j = 0; j < family.size(); ++j) {
    out.push_back(family.degenerate(j)
                      ? 0.0
                      : trace_product(family.conjugates[static_cast<size_t>(j)]->hermitian(), povm[j]));
  }
  return out;
}

double complementarity_operator_defect(const HelstromFamily& family, const Povm& povm) {
  if (family.size() != povm.size()) throw PreconditionError("complementarity: size mismatch");
  double worst = 0.0;
  for (int j = 0; j < family.size(); ++j) {
    if (family.degenerate(j)) continue;
    worst = std::max(worst, max_abs(family.conjugates[static_cast<size_t>(j)]->matrix() * povm[j].matrix()));
  }
  return worst;
}

bool ratio_upper_bound_check(const Ensemble& ensemble, const HelstromFamily& family, const Povm& povm) {
  return success_probability(ensemble, povm) <= family.ratio + 1e-9;
}

double commutation_defect(const Ensemble& ensemble, const Povm& povm) {
  if (!ensemble.generators()) return 0.0;
  const auto m = lagrange_operator(ensemble, povm).matrix;
  double worst = 0.0;
  for (const auto& u : ensemble.generators()->unitaries()) worst = std::max(worst, max_abs(m * u - u * m));
  return worst;
}

}  // namespace med
