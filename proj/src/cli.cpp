#include "med/cli.hpp"

#include "med/report.hpp"

#include <CLI11.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <future>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <sstream>
#include <thread>

namespace med::cli {

namespace {

using Clock = std::chrono::steady_clock;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream o(path, std::ios::binary);
  if (!o) throw std::runtime_error("cannot write " + path);
  o << text;
  if (!o) throw std::runtime_error("write failed: " + path);
}

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

struct Candidate {
  Povm povm;
  Certificate cert;
};

// Family summary for a certified candidate; null when extraction fails.
Json family_summary(const Ensemble& e, const Povm& povm, double tol) {
  try {
    const auto family = extract_helstrom_family(e, povm, tol);
    Json degenerate = Json::array();
    for (int j = 0; j < family.size(); ++j) degenerate.push_back(family.degenerate(j));
    Json mins = Json::array();
    for (double m : family.min_eigenvalues) mins.push_back(tidy(m));
    return {{"ratio", tidy(family.ratio)}, {"min_eigenvalues", mins}, {"degenerate", degenerate}};
  } catch (const ExtractionError&) {
    return nullptr;
  }
}

// ---------------------------------------------------------------- solve

struct SolveArgs {
  std::string path;
  std::string method = "both";
  double tol = kCertifyTol;
  bool json = false;
  std::uint64_t seed = 0;
};

int cmd_solve(const SolveArgs& a, std::ostream& out, std::ostream& err) {
  std::vector<std::pair<std::string, double>> timings;
  auto t0 = Clock::now();
  const std::string text = read_file(a.path);
  const Ensemble ensemble = parse_ensemble_file(text);
  const std::string digest = sha256_hex(serialize_ensemble(ensemble));
  timings.emplace_back("parse", elapsed_ms(t0));

  std::optional<ClosedFormSolution> closed;
  std::optional<OracleResult> oracle;
  std::optional<Candidate> pick;
  std::string method_used;
  std::string applicability = "not_attempted";

  if (a.method == "closed" || a.method == "both") {
    t0 = Clock::now();
    closed = solve_closed_form(ensemble, a.tol);
    timings.emplace_back("closed_form", elapsed_ms(t0));
    applicability = to_string(closed->applicability);
    err << "closed form: " << applicability;
    if (!closed->method.empty()) err << " (" << closed->method << ")";
    if (!closed->reason.empty()) err << ": " << closed->reason;
    err << "\n";
    if (closed->optimal()) {
      pick = Candidate{*closed->povm, *closed->certificate};
      method_used = "closed_form";
    }
  }

  if (!pick && (a.method == "oracle" || a.method == "both")) {
    t0 = Clock::now();
    FixedPointOptions opt;
    opt.seed = a.seed;
    oracle = fixed_point_solve(ensemble, opt);
    timings.emplace_back("oracle", elapsed_ms(t0));
    err << "oracle: " << oracle->iterations << " iterations, "
        << (oracle->converged ? "converged" : "not converged") << "\n";
    if (oracle->monotonicity_violations > 0) {
      err << "oracle: success probability decreased in " << oracle->monotonicity_violations
          << " sweeps (worst " << oracle->worst_decrease << ")\n";
    }
    pick = Candidate{oracle->povm, Certificate{}};
    method_used = closed ? "both" : "oracle";
  }

  if (!pick) {
    // Closed form only and inapplicable: fall back to the best candidate it
    // has, which is its assembled POVM or else the square-root measurement.
    pick = Candidate{closed->povm ? *closed->povm : srm(ensemble), Certificate{}};
    method_used = "closed_form";
  }

  t0 = Clock::now();
  pick->cert = certify_optimal(ensemble, pick->povm, a.tol);
  const bool certified = pick->cert.passed();
  Json family = certified ? family_summary(ensemble, pick->povm, a.tol) : Json(nullptr);
  if (certified && !family.is_null()) {
    const auto fam = extract_helstrom_family(ensemble, pick->povm, a.tol);
    pick->cert.complementarity = complementarity(fam, pick->povm);
  }
  timings.emplace_back("certify", elapsed_ms(t0));

  const double p_opt = pick->cert.success_probability;
  const std::string label = certified ? "optimal" : "best-found";

  if (a.json) {
    // Timings vary run to run, so they stay out of the machine-readable report.
    Json r;
    r["ensemble_digest"] = digest;
    r["method_used"] = method_used;
    r["label"] = label;
    r["p_opt"] = tidy(p_opt);
    r["applicability"] = applicability;
    r["certificate"] = certificate_to_json(pick->cert);
    r["helstrom_family"] = family;
    if (closed && !closed->reason.empty()) r["closed_form_reason"] = closed->reason;
    if (oracle) {
      r["oracle"] = {{"iterations", oracle->iterations},
                     {"converged", oracle->converged},
                     {"monotonicity_violations", oracle->monotonicity_violations}};
    }
    out << r.dump(2) << "\n";
  } else {
    out << std::setprecision(12);
    out << "ensemble " << digest << "\n";
    out << "method " << method_used << ", closed form " << applicability << "\n";
    out << "p_opt " << p_opt << " (" << label << ")\n";
    out << "Tr(M) " << pick->cert.implied_probability << "\n";
    out << "margins";
    for (double m : pick->cert.psd_margins) out << " " << m;
    out << "\n";
    if (!family.is_null()) {
      out << "helstrom ratio " << family["ratio"].get<double>() << ", tau min eigenvalues";
      for (const auto& m : family["min_eigenvalues"]) out << " " << m.get<double>();
      out << "\n";
    }
    out << "timings ms";
    for (const auto& [stage, ms] : timings) out << " " << stage << "=" << std::setprecision(3) << ms;
    out << "\n";
  }
  return certified ? kExitCertified : kExitBestFound;
}

// ---------------------------------------------------------------- certify

int cmd_certify(const std::string& ens_path, const std::string& povm_path, double tol, bool json,
                std::ostream& out) {
  const Ensemble ensemble = parse_ensemble_file(read_file(ens_path));
  const Povm povm = parse_povm_file(read_file(povm_path));
  if (povm.dim() != ensemble.dim()) {
    throw PreconditionError("dimension mismatch: ensemble has d=" + std::to_string(ensemble.dim()) +
                            ", POVM has d=" + std::to_string(povm.dim()));
  }
  if (povm.size() != ensemble.size()) {
    throw PreconditionError("count mismatch: ensemble has " + std::to_string(ensemble.size()) +
                            " states, POVM has " + std::to_string(povm.size()) + " elements");
  }
  const Certificate cert = certify_optimal(ensemble, povm, tol);
  if (json) {
    out << certificate_to_json(cert).dump(2) << "\n";
  } else {
    out << std::setprecision(12);
    out << "verdict " << (cert.passed() ? "pass" : "fail") << "\n";
    out << "p " << cert.success_probability << "\n";
    out << "Tr(M) " << cert.implied_probability << "\n";
    for (size_t j = 0; j < cert.psd_margins.size(); ++j) {
      out << "margin[" << j << "] " << cert.psd_margins[j] << "\n";
    }
    out << "completeness_defect " << cert.completeness_defect << "\n";
    out << "hermiticity_defect " << cert.hermiticity_defect << "\n";
  }
  return cert.passed() ? kExitCertified : kExitBestFound;
}

// ---------------------------------------------------------------- sweep

SpinLatitudeParams template_params(const Json& doc) {
  ensemble_from_json(doc);  // full schema validation
  const auto& states = doc.at("states");
  if (states.size() != 1 || !states[0].contains("spin_orbit")) {
    throw SchemaError("states", "sweep template must hold a single spin_orbit entry");
  }
  const auto& s = states[0]["spin_orbit"];
  SpinLatitudeParams p;
  p.two_j = s.at("two_j").get<int>();
  p.a = s.at("a").get<double>();
  p.theta = s.at("theta").get<double>();
  p.phi = s.at("phi").get<double>();
  p.n = s.at("n").get<int>();
  return p;
}

void set_param(SpinLatitudeParams& p, const std::string& name, double v) {
  auto as_int = [&](const char* field) {
    if (v != std::round(v)) throw PreconditionError(std::string("grid: ") + field + " must be an integer");
    return static_cast<int>(std::lround(v));
  };
  if (name == "a") p.a = v;
  else if (name == "theta") p.theta = v;
  else if (name == "n") p.n = as_int("n");
  else if (name == "two_j") p.two_j = as_int("two_j");
}

struct SweepRow {
  std::vector<double> point;
  double p_closed = 0.0;
  double p_oracle = 0.0;
  bool certified = false;
  std::optional<double> margin_min;
};

SweepRow evaluate(const SpinLatitudeParams& p, std::vector<double> point, std::uint64_t seed) {
  SweepRow row;
  row.point = std::move(point);
  const auto closed = solve_spin_latitude(p);
  row.p_closed = closed.p_opt;
  row.certified = closed.applicability != Applicability::inapplicable;
  if (closed.certificate) row.margin_min = closed.certificate->min_margin();
  FixedPointOptions opt;
  opt.seed = seed;
  row.p_oracle = fixed_point_solve(cyclic_spin_ensemble(p), opt).p;
  return row;
}

int cmd_sweep(const std::string& template_path, const std::string& grid_spec, const std::string& out_path,
              std::uint64_t seed, int jobs, std::ostream& err) {
  Json doc;
  try {
    doc = Json::parse(read_file(template_path));
  } catch (const Json::parse_error& e) {
    throw SchemaError("", std::string("invalid JSON: ") + e.what());
  }
  const SpinLatitudeParams base = template_params(doc);
  const auto axes = parse_grid(grid_spec);

  // Grid points in lexicographic order, last axis fastest.
  std::vector<std::vector<double>> points{{}};
  for (const auto& axis : axes) {
    std::vector<std::vector<double>> next;
    for (const auto& prefix : points) {
      for (double v : axis.values) {
        auto pt = prefix;
        pt.push_back(v);
        next.push_back(std::move(pt));
      }
    }
    points = std::move(next);
  }
  std::vector<SpinLatitudeParams> params;
  for (const auto& pt : points) {
    SpinLatitudeParams p = base;
    for (size_t k = 0; k < axes.size(); ++k) set_param(p, axes[k].name, pt[k]);
    p.validate();
    params.push_back(p);
  }

  // Compute concurrently, then emit in grid order.
  std::vector<SweepRow> rows(points.size());
  const size_t workers = static_cast<size_t>(std::max(1, jobs));
  for (size_t start = 0; start < points.size(); start += workers) {
    std::vector<std::future<SweepRow>> batch;
    for (size_t i = start; i < std::min(points.size(), start + workers); ++i) {
      batch.push_back(std::async(std::launch::async, evaluate, params[i], points[i], seed));
    }
    for (size_t k = 0; k < batch.size(); ++k) rows[start + k] = batch[k].get();
  }

  std::ostringstream csv;
  csv << std::setprecision(15);
  for (const auto& axis : axes) csv << axis.name << ",";
  csv << "p_closed,p_oracle,certified,margin_min\n";
  for (const auto& r : rows) {
    for (double v : r.point) csv << v << ",";
    csv << r.p_closed << "," << r.p_oracle << "," << (r.certified ? 1 : 0) << ",";
    if (r.margin_min) csv << *r.margin_min;
    csv << "\n";
  }
  write_file(out_path, csv.str());
  const auto n_cert = std::count_if(rows.begin(), rows.end(), [](const SweepRow& r) { return r.certified; });
  err << "sweep: " << rows.size() << " rows, " << n_cert << " certified\n";
  return 0;
}

// ---------------------------------------------------------------- gen

struct GenArgs {
  std::string kind;
  double a = 1.0;
  double theta = std::numbers::pi / 2;
  double phi = 0.0;
  int n = 3;
  int two_j = 1;
  std::string out;
};

Json latitude_doc(double a, double theta, const std::vector<double>& phis) {
  return {{"dim", 2},
          {"priors", "equal"},
          {"states", Json::array({{{"bloch_latitude", {{"a", a}, {"theta", theta}, {"phis", phis}}}}})}};
}

std::vector<double> equally_spaced(double phi, int n) {
  std::vector<double> phis;
  for (int k = 0; k < n; ++k) phis.push_back(phi + 2.0 * std::numbers::pi * k / n);
  return phis;
}

int cmd_gen(const GenArgs& g, std::ostream& out, std::ostream& err) {
  Json doc;
  if (g.kind == "trine") {
    doc = latitude_doc(1.0, std::numbers::pi / 2, equally_spaced(0.0, 3));
  } else if (g.kind == "pair") {
    doc = latitude_doc(g.a, std::numbers::pi / 2, equally_spaced(g.phi, 2));
  } else if (g.kind == "latitude") {
    doc = latitude_doc(g.a, g.theta, equally_spaced(g.phi, g.n));
  } else {
    doc = {{"dim", g.two_j + 1},
           {"priors", "equal"},
           {"states", Json::array({{{"spin_orbit",
                                     {{"two_j", g.two_j}, {"a", g.a}, {"theta", g.theta}, {"phi", g.phi}, {"n", g.n}}}}})}};
  }
  const std::string text = doc.dump(2) + "\n";
  const Ensemble e = parse_ensemble_file(text);  // refuse to emit anything that does not load
  if (g.out.empty()) {
    out << text;
  } else {
    write_file(g.out, text);
    err << "gen: wrote " << e.size() << " states (d=" << e.dim() << ") to " << g.out << "\n";
  }
  return 0;
}

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  std::ostringstream os;
  os << std::hex << std::setfill('0');
  for (unsigned int i = 0; i < len; ++i) os << std::setw(2) << static_cast<int>(md[i]);
  return os.str();
}

std::vector<GridAxis> parse_grid(const std::string& spec) {
  static const std::vector<std::string> allowed = {"a", "theta", "n", "two_j"};
  std::vector<GridAxis> axes;
  std::stringstream ss(spec);
  std::string part;
  while (std::getline(ss, part, ';')) {
    if (part.empty()) continue;
    const auto eq = part.find('=');
    if (eq == std::string::npos) throw PreconditionError("grid: expected name=values in '" + part + "'");
    GridAxis axis;
    axis.name = part.substr(0, eq);
    if (std::find(allowed.begin(), allowed.end(), axis.name) == allowed.end()) {
      throw PreconditionError("grid: unknown swept field '" + axis.name + "' (expected a, theta, n or two_j)");
    }
    for (const auto& ax : axes) {
      if (ax.name == axis.name) throw PreconditionError("grid: field '" + axis.name + "' given twice");
    }
    std::stringstream vs(part.substr(eq + 1));
    std::string v;
    while (std::getline(vs, v, ',')) {
      size_t used = 0;
      double x = 0.0;
      try {
        x = std::stod(v, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != v.size()) throw PreconditionError("grid: bad value '" + v + "' for " + axis.name);
      axis.values.push_back(x);
    }
    if (axis.values.empty()) throw PreconditionError("grid: no values for " + axis.name);
    axes.push_back(std::move(axis));
  }
  if (axes.empty()) throw PreconditionError("grid: empty specification");
  return axes;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Minimum-error discrimination solver and certifier", "medctl"};
  app.require_subcommand(1);

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "Solve an ensemble file and certify the result");
  solve_cmd->add_option("file", solve.path, "Ensemble JSON")->required();
  solve_cmd->add_option("--method", solve.method, "closed, oracle or both")
      ->check(CLI::IsMember({"closed", "oracle", "both"}));
  solve_cmd->add_option("--tol", solve.tol, "Certification tolerance");
  solve_cmd->add_flag("--json", solve.json, "Emit a JSON report");
  solve_cmd->add_option("--seed", solve.seed, "Seed for oracle restarts");

  std::string cert_ens, cert_povm;
  double cert_tol = kCertifyTol;
  bool cert_json = false;
  auto* cert_cmd = app.add_subcommand("certify", "Certify a POVM against an ensemble");
  cert_cmd->add_option("ensemble", cert_ens, "Ensemble JSON")->required();
  cert_cmd->add_option("povm", cert_povm, "POVM JSON")->required();
  cert_cmd->add_option("--tol", cert_tol, "Certification tolerance");
  cert_cmd->add_flag("--json", cert_json, "Emit a JSON certificate");

  std::string sweep_template, sweep_grid, sweep_out;
  std::uint64_t sweep_seed = 0;
  int sweep_jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  auto* sweep_cmd = app.add_subcommand("sweep", "Sweep spin-latitude parameters into a CSV");
  sweep_cmd->add_option("template", sweep_template, "spin_orbit ensemble JSON")->required();
  sweep_cmd->add_option("--grid", sweep_grid, "e.g. a=0,0.25;theta=0.5,1.0")->required();
  sweep_cmd->add_option("--out", sweep_out, "CSV output path")->required();
  sweep_cmd->add_option("--seed", sweep_seed, "Seed for oracle restarts");
  sweep_cmd->add_option("--jobs", sweep_jobs, "Grid points evaluated concurrently")->check(CLI::PositiveNumber);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Write an example ensemble file");
  gen_cmd->add_option("kind", gen.kind, "trine, pair, latitude or spin")
      ->required()
      ->check(CLI::IsMember({"trine", "pair", "latitude", "spin"}));
  gen_cmd->add_option("--a", gen.a, "Purity parameter");
  gen_cmd->add_option("--theta", gen.theta, "Polar angle (radians)");
  gen_cmd->add_option("--phi", gen.phi, "Azimuth of the first state (radians)");
  gen_cmd->add_option("--n", gen.n, "Number of states");
  gen_cmd->add_option("--two_j", gen.two_j, "Twice the spin");
  gen_cmd->add_option("--out", gen.out, "Output path (stdout if omitted)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }

  try {
    if (*solve_cmd) return cmd_solve(solve, out, err);
    if (*cert_cmd) return cmd_certify(cert_ens, cert_povm, cert_tol, cert_json, out);
    if (*sweep_cmd) return cmd_sweep(sweep_template, sweep_grid, sweep_out, sweep_seed, sweep_jobs, err);
    if (*gen_cmd) {
      if (gen.kind == "pair" && !gen_cmd->count("--a")) gen.a = 0.6;
      if (gen.kind == "pair") gen.n = 2;
      return cmd_gen(gen, out, err);
    }
  } catch (const SchemaError& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}

}  // namespace med::cli
