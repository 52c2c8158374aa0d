#include "med/ensemble_io.hpp"

#include <cmath>
#include <initializer_list>
#include <set>

namespace med {

namespace {

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string index(const std::string& path, size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

void require_object(const Json& j, const std::string& path) {
  if (!j.is_object()) throw SchemaError(path, "expected an object");
}

void reject_unknown(const Json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : j.items()) {
    if (!ok.count(key)) throw SchemaError(join(path, key), "unknown key");
  }
}

const Json& field(const Json& j, const char* key, const std::string& path) {
  const auto it = j.find(key);
  if (it == j.end()) throw SchemaError(join(path, key), "missing field");
  return *it;
}

double number(const Json& j, const std::string& path) {
  if (!j.is_number()) throw SchemaError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw SchemaError(path, "non-finite number");
  return v;
}

int integer(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) throw SchemaError(path, "expected an integer");
  return j.get<int>();
}

double number_field(const Json& j, const char* key, const std::string& path) {
  return number(field(j, key, path), join(path, key));
}

int integer_field(const Json& j, const char* key, const std::string& path) {
  return integer(field(j, key, path), join(path, key));
}

// Runs a builder and re-labels its precondition failures with `path`.
template <typename F>
auto at(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const SchemaError&) {
    throw;
  } catch (const std::exception& e) {
    throw SchemaError(path, e.what());
  }
}

struct Expanded {
  std::vector<DensityMatrix> states;
  std::optional<UnitarySet> generators;
  std::optional<SpinLatitudeParams> latitude;
};

const std::set<std::string> kEntryKinds = {"matrix", "bloch", "bloch_latitude", "spin_orbit", "orbit"};

Expanded expand_entry(const Json& entry, const std::string& path);

DensityMatrix single_state(const Json& entry, const std::string& path) {
  auto ex = expand_entry(entry, path);
  if (ex.states.size() != 1) throw SchemaError(path, "expected a single state");
  return std::move(ex.states.front());
}

Expanded expand_entry(const Json& entry, const std::string& path) {
  require_object(entry, path);
  int kinds = 0;
  for (const auto& [key, _] : entry.items()) {
    if (!kEntryKinds.count(key)) throw SchemaError(join(path, key), "unknown key");
    ++kinds;
  }
  if (kinds == 0) throw SchemaError(path, "empty state entry");
  if (kinds > 1) {
    throw SchemaError(path, "state entry must hold exactly one of matrix or a constructor");
  }
  const auto& [kind, body] = *entry.items().begin();
  const std::string here = join(path, kind);

  if (kind == "matrix") {
    const ComplexMatrix m = matrix_from_json(body, here);
    return at(here, [&] { return Expanded{{DensityMatrix(HermitianMatrix(m))}, {}, {}}; });
  }
  require_object(body, here);
  if (kind == "bloch") {
    reject_unknown(body, here, {"a", "theta", "phi"});
    const double a = number_field(body, "a", here);
    const double theta = number_field(body, "theta", here);
    const double phi = number_field(body, "phi", here);
    if (a < 0 || a > 1) throw SchemaError(join(here, "a"), "must lie in [0, 1]");
    return at(here, [&] {
      return Expanded{{DensityMatrix::bloch(a * std::sin(theta) * std::cos(phi),
                                            a * std::sin(theta) * std::sin(phi), a * std::cos(theta))},
                      {},
                      {}};
    });
  }
  if (kind == "bloch_latitude") {
    reject_unknown(body, here, {"a", "theta", "phis"});
    const double a = number_field(body, "a", here);
    const double theta = number_field(body, "theta", here);
    const auto& phis_json = field(body, "phis", here);
    if (!phis_json.is_array()) throw SchemaError(join(here, "phis"), "expected an array");
    std::vector<double> phis;
    for (size_t i = 0; i < phis_json.size(); ++i) phis.push_back(number(phis_json[i], index(join(here, "phis"), i)));
    return at(here, [&] {
      auto e = bloch_latitude_ensemble(a, theta, phis);
      return Expanded{e.states(), e.generators(), e.latitude()};
    });
  }
  if (kind == "spin_orbit") {
    reject_unknown(body, here, {"two_j", "a", "theta", "phi", "n"});
    SpinLatitudeParams p;
    p.two_j = integer_field(body, "two_j", here);
    p.a = number_field(body, "a", here);
    p.theta = number_field(body, "theta", here);
    p.phi = number_field(body, "phi", here);
    p.n = integer_field(body, "n", here);
    return at(here, [&] {
      auto e = cyclic_spin_ensemble(p);
      return Expanded{e.states(), e.generators(), e.latitude()};
    });
  }
  // orbit
  reject_unknown(body, here, {"seed", "unitaries"});
  const DensityMatrix seed = single_state(field(body, "seed", here), join(here, "seed"));
  const auto& us_json = field(body, "unitaries", here);
  const std::string us_path = join(here, "unitaries");
  if (!us_json.is_array() || us_json.empty()) throw SchemaError(us_path, "expected a non-empty array");
  std::vector<ComplexMatrix> us;
  for (size_t i = 0; i < us_json.size(); ++i) us.push_back(matrix_from_json(us_json[i], index(us_path, i)));
  return at(here, [&] {
    const UnitarySet set(std::move(us));
    auto e = similarity_ensemble(seed, set, equal_priors(set.size()));
    return Expanded{e.states(), e.generators(), {}};
  });
}

}  // namespace

Json matrix_to_json(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(Json::array({m(r, c).real(), m(r, c).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

ComplexMatrix matrix_from_json(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw SchemaError(path, "expected a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].is_array() ? j[0].size() : 0);
  if (cols == 0) throw SchemaError(index(path, 0), "expected a non-empty row");
  ComplexMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<size_t>(r)];
    const std::string rp = index(path, static_cast<size_t>(r));
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) throw SchemaError(rp, "ragged row");
    for (Eigen::Index c = 0; c < cols; ++c) {
      const auto& z = row[static_cast<size_t>(c)];
      const std::string zp = index(rp, static_cast<size_t>(c));
      if (!z.is_array() || z.size() != 2) throw SchemaError(zp, "expected [re, im]");
      m(r, c) = Complex(number(z[0], zp), number(z[1], zp));
    }
  }
  return m;
}

Ensemble ensemble_from_json(const Json& doc) {
  require_object(doc, "");
  reject_unknown(doc, "", {"dim", "priors", "states"});
  const int dim = integer_field(doc, "dim", "");
  if (dim < 1) throw SchemaError("dim", "must be positive");
  const auto& states_json = field(doc, "states", "");
  if (!states_json.is_array() || states_json.empty()) throw SchemaError("states", "expected a non-empty array");

  std::vector<Expanded> parts;
  std::vector<DensityMatrix> states;
  for (size_t i = 0; i < states_json.size(); ++i) {
    const std::string path = index("states", i);
    auto ex = expand_entry(states_json[i], path);
    for (const auto& s : ex.states) {
      if (s.dim() != dim) {
        throw SchemaError(path, "state dimension " + std::to_string(s.dim()) + " does not match dim " +
                                    std::to_string(dim));
      }
    }
    states.insert(states.end(), ex.states.begin(), ex.states.end());
    parts.push_back(std::move(ex));
  }

  const auto& priors_json = field(doc, "priors", "");
  std::vector<double> priors;
  if (priors_json.is_string()) {
    if (priors_json.get<std::string>() != "equal") throw SchemaError("priors", "expected an array or \"equal\"");
    priors = equal_priors(static_cast<int>(states.size()));
  } else if (priors_json.is_array()) {
    for (size_t i = 0; i < priors_json.size(); ++i) priors.push_back(number(priors_json[i], index("priors", i)));
  } else {
    throw SchemaError("priors", "expected an array or \"equal\"");
  }

  std::optional<UnitarySet> gens;
  std::optional<SpinLatitudeParams> latitude;
  if (parts.size() == 1) {
    gens = parts.front().generators;
    latitude = parts.front().latitude;
  }
  try {
    Ensemble e(std::move(priors), std::move(states), std::move(gens));
    return latitude ? e.with_latitude(*latitude) : e;
  } catch (const PreconditionError& err) {
    // Ensemble reports prior problems as "priors: ..."; keep that as the path.
    const std::string msg = err.what();
    if (msg.rfind("priors: ", 0) == 0) throw SchemaError("priors", msg.substr(8));
    throw SchemaError("", msg);
  }
}

Ensemble parse_ensemble_file(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw SchemaError("", std::string("invalid JSON: ") + e.what());
  }
  return ensemble_from_json(doc);
}

Json ensemble_to_json(const Ensemble& e) {
  Json doc;
  doc["dim"] = e.dim();
  doc["priors"] = e.priors();
  Json states = Json::array();
  if (e.generators()) {
    Json us = Json::array();
    for (const auto& u : e.generators()->unitaries()) us.push_back(matrix_to_json(u));
    states.push_back({{"orbit", {{"seed", {{"matrix", matrix_to_json(e.state(0).matrix())}}}, {"unitaries", us}}}});
  } else {
    for (const auto& s : e.states()) states.push_back({{"matrix", matrix_to_json(s.matrix())}});
  }
  doc["states"] = std::move(states);
  return doc;
}

std::string serialize_ensemble(const Ensemble& e) {
  return ensemble_to_json(e).dump(2) + "\n";
}

}  // namespace med
