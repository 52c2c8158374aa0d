#pragma once

// JSON ensemble documents.
//
//   {"dim": d, "priors": [p...] | "equal", "states": [entry...]}
//
// Each entry holds exactly one of
//   {"matrix": [[[re, im], ...], ...]}                       row-major d x d
//   {"bloch": {"a", "theta", "phi"}}                         one qubit
//   {"bloch_latitude": {"a", "theta", "phis": [...]}}        expands to N qubits
//   {"spin_orbit": {"two_j", "a", "theta", "phi", "n"}}      expands to n states
//   {"orbit": {"seed": entry, "unitaries": [matrix...]}}     expands to |unitaries|
// Unknown keys are rejected. A document whose only entry is an expanding
// constructor keeps its generators on the resulting Ensemble.

#include "med/ensemble.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>

namespace med {

/// Malformed or invalid document; `path` locates the offending field.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(std::string path, const std::string& message)
      : std::runtime_error(path.empty() ? message : path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

using Json = nlohmann::json;

Json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const Json& j, const std::string& path);

Ensemble ensemble_from_json(const Json& doc);
Ensemble parse_ensemble_file(const std::string& text);

/// Canonical form: explicit matrices, or a single orbit entry when the
/// ensemble carries generators. Priors are always written out.
Json ensemble_to_json(const Ensemble& e);
std::string serialize_ensemble(const Ensemble& e);

}  // namespace med
