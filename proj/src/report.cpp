#include "med/report.hpp"

#include <cmath>

namespace med {

double tidy(double x) {
  if (!std::isfinite(x)) return x;
  return x == 0.0 ? 0.0 : x;
}

Json povm_to_json(const Povm& povm) {
  Json elements = Json::array();
  for (const auto& e : povm.elements) elements.push_back(matrix_to_json(e.matrix()));
  return {{"dim", povm.dim()}, {"elements", std::move(elements)}};
}

Povm povm_from_json(const Json& doc) {
  if (!doc.is_object()) throw SchemaError("", "expected an object");
  for (const auto& [key, _] : doc.items()) {
    if (key != "dim" && key != "elements") throw SchemaError(key, "unknown key");
  }
  if (!doc.contains("dim") || !doc["dim"].is_number_integer()) throw SchemaError("dim", "expected an integer");
  const int dim = doc["dim"].get<int>();
  if (!doc.contains("elements") || !doc["elements"].is_array() || doc["elements"].empty()) {
    throw SchemaError("elements", "expected a non-empty array");
  }
  Povm povm;
  const auto& elements = doc["elements"];
  for (size_t i = 0; i < elements.size(); ++i) {
    const std::string path = "elements[" + std::to_string(i) + "]";
    const ComplexMatrix m = matrix_from_json(elements[i], path);
    if (m.rows() != dim || m.cols() != dim) {
      throw SchemaError(path, "expected a " + std::to_string(dim) + "x" + std::to_string(dim) + " matrix");
    }
    try {
      povm.elements.emplace_back(m);
    } catch (const PreconditionError& e) {
      throw SchemaError(path, e.what());
    }
  }
  return povm;
}

Povm parse_povm_file(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw SchemaError("", std::string("invalid JSON: ") + e.what());
  }
  return povm_from_json(doc);
}

Json certificate_to_json(const Certificate& cert) {
  Json j;
  j["verdict"] = cert.passed() ? "pass" : "fail";
  j["p"] = tidy(cert.success_probability);
  j["hermiticity_defect"] = tidy(cert.hermiticity_defect);
  Json margins = Json::array();
  for (double m : cert.psd_margins) margins.push_back(tidy(m));
  j["psd_margins"] = std::move(margins);
  if (cert.complementarity) {
    Json comp = Json::array();
    for (double c : *cert.complementarity) comp.push_back(tidy(c));
    j["complementarity"] = std::move(comp);
  } else {
    j["complementarity"] = nullptr;
  }
  j["tol"] = cert.tol;
  j["completeness_defect"] = tidy(cert.completeness_defect);
  j["trace_lagrange"] = tidy(cert.implied_probability);
  return j;
}

Json solution_to_json(const ClosedFormSolution& s) {
  Json j;
  j["p_opt"] = tidy(s.p_opt);
  j["applicability"] = to_string(s.applicability);
  j["method"] = s.method;
  j["lambdas"] = s.lambdas;
  j["pi_prime_1"] = s.pi_prime_1 ? matrix_to_json(s.pi_prime_1->matrix()) : Json(nullptr);
  j["tau_1"] = s.tau_1 ? matrix_to_json(s.tau_1->matrix()) : Json(nullptr);
  if (s.povm) {
    Json elements = Json::array();
    for (const auto& e : s.povm->elements) elements.push_back(matrix_to_json(e.matrix()));
    j["povm"] = std::move(elements);
  } else {
    j["povm"] = nullptr;
  }
  if (!s.reason.empty()) j["reason"] = s.reason;
  return j;
}

Json oracle_to_json(const OracleResult& r) {
  Json j;
  j["p"] = tidy(r.p);
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["final_step_norm"] = tidy(r.final_step_norm);
  j["monotonicity_violations"] = r.monotonicity_violations;
  j["povm"] = povm_to_json(r.povm)["elements"];
  return j;
}

}  // namespace med
