#pragma once

// JSON encodings for POVM files, certificates, closed-form solutions and
// oracle results.

#include "med/closed_form.hpp"
#include "med/ensemble_io.hpp"
#include "med/oracle.hpp"

namespace med {

/// {"dim": d, "elements": [matrix, ...]}
Json povm_to_json(const Povm& povm);
Povm povm_from_json(const Json& doc);
Povm parse_povm_file(const std::string& text);

/// {"verdict", "p", "hermiticity_defect", "psd_margins", "complementarity", "tol"}
/// plus completeness and Tr(M) diagnostics.
Json certificate_to_json(const Certificate& cert);

/// {"p_opt", "applicability", "lambdas", "pi_prime_1", "tau_1", "povm"}
Json solution_to_json(const ClosedFormSolution& s);

Json oracle_to_json(const OracleResult& r);

/// Rounds tiny magnitudes and -0 so that reports print stably.
double tidy(double x);

}  // namespace med
