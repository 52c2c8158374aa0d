#include "helpers.hpp"
#include "med/cli.hpp"
#include "med/ensemble_io.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace medtest;

namespace {

const std::string kData = MED_TEST_DATA_DIR;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run medctl(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("medctl_test_" + name)).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  std::vector<std::vector<std::string>> rows;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("solve") {
  SUBCASE("trine, method both") {
    const auto r = medctl({"solve", kData + "/trine.json", "--method", "both", "--json"});
    CHECK(r.code == cli::kExitCertified);
    const auto j = Json::parse(r.out);
    CHECK(j["p_opt"].get<double>() == doctest::Approx(2.0 / 3).epsilon(1e-12));
    CHECK(j["certificate"]["verdict"] == "pass");
    CHECK(j["label"] == "optimal");
  }
  SUBCASE("latitude a=0.6, theta=pi/4, N=3") {
    const auto r = medctl({"solve", kData + "/latitude.json", "--json"});
    const auto j = Json::parse(r.out);
    if (r.code == cli::kExitCertified) {
      CHECK(j["p_opt"].get<double>() == doctest::Approx((1 + 0.6 * std::sin(kPi / 4)) / 3).epsilon(1e-9));
      CHECK(j["p_opt"].get<double>() == doctest::Approx(0.47475).epsilon(1e-5));
    } else {
      CHECK(r.code == cli::kExitBestFound);
      CHECK(j["label"] == "best-found");
    }
  }
  SUBCASE("oracle only on an ensemble without generators") {
    const auto r = medctl({"solve", kData + "/random_mixed.json", "--method", "oracle"});
    CHECK(r.code != cli::kExitError);
    CHECK(r.out.find("p_opt") != std::string::npos);
    CHECK(r.out.find(r.code == 0 ? "(optimal)" : "(best-found)") != std::string::npos);
  }
  SUBCASE("closed only falls back to a best-found candidate") {
    const auto r = medctl({"solve", kData + "/random_mixed.json", "--method", "closed", "--json"});
    CHECK(r.code == cli::kExitBestFound);
    CHECK(Json::parse(r.out)["applicability"] == "inapplicable");
  }
  SUBCASE("priors summing to 0.9") {
    const auto r = medctl({"solve", kData + "/priors_bad.json"});
    CHECK(r.code == cli::kExitError);
    CHECK(r.err.find("priors") != std::string::npos);
    CHECK(r.out.empty());
  }
  SUBCASE("unsupported method") {
    CHECK(medctl({"solve", kData + "/trine.json", "--method", "sdp"}).code == cli::kExitError);
  }
  SUBCASE("missing file") {
    CHECK(medctl({"solve", kData + "/nope.json"}).code == cli::kExitError);
  }
  SUBCASE("json mode emits exactly one document") {
    const auto r = medctl({"solve", kData + "/trine.json", "--json", "--method", "oracle"});
    CHECK_NOTHROW((void)Json::parse(r.out));
    CHECK(r.out.find("oracle:") == std::string::npos);
    CHECK(r.err.find("oracle:") != std::string::npos);
  }
  SUBCASE("same seed, same bytes") {
    const auto a = medctl({"solve", kData + "/random_mixed.json", "--json", "--seed", "7"});
    const auto b = medctl({"solve", kData + "/random_mixed.json", "--json", "--seed", "7"});
    CHECK(a.code == b.code);
    CHECK(a.out == b.out);
  }
}

TEST_CASE("certify") {
  const auto pass = medctl({"certify", kData + "/orthogonal_pair.json", kData + "/pair_projective_povm.json"});
  CHECK(pass.code == cli::kExitCertified);
  CHECK(pass.out.find("Tr(M)") != std::string::npos);
  CHECK(pass.out.find("margin[1]") != std::string::npos);

  const auto fail = medctl({"certify", kData + "/orthogonal_pair.json", kData + "/pair_uniform_povm.json", "--json"});
  CHECK(fail.code == cli::kExitBestFound);
  const auto j = Json::parse(fail.out);
  CHECK(j["verdict"] == "fail");
  double worst = 0.0;
  for (const auto& m : j["psd_margins"]) worst = std::min(worst, m.get<double>());
  CHECK(worst < 0);

  CHECK(medctl({"certify", kData + "/orthogonal_pair.json", kData + "/qutrit_povm.json"}).code == cli::kExitError);
}

TEST_CASE("gen") {
  SUBCASE("trine") {
    const auto path = temp_path("trine.json");
    REQUIRE(medctl({"gen", "trine", "--out", path}).code == 0);
    const auto e = parse_ensemble_file(slurp(path));
    CHECK(e.size() == 3);
    CHECK(e.equal_priors());
    for (const auto& s : e.states()) {
      CHECK(std::abs(s.matrix()(0, 0).real() - 0.5) < 1e-12);                  // equatorial
      CHECK(std::abs((s.matrix() * s.matrix()).trace().real() - 1.0) < 1e-12);  // pure
    }
  }
  SUBCASE("pair") {
    const auto r = medctl({"gen", "pair", "--a", "0.6"});
    REQUIRE(r.code == 0);
    const auto e = parse_ensemble_file(r.out);
    CHECK(e.size() == 2);
    for (const auto& s : e.states()) {
      CHECK(std::abs(s.matrix()(0, 0).real() - 0.5) < 1e-12);
      CHECK(std::abs((s.matrix() * s.matrix()).trace().real() - 0.5 * (1 + 0.36)) < 1e-12);
    }
  }
  SUBCASE("spin round trip") {
    const auto path = temp_path("spin.json");
    REQUIRE(medctl({"gen", "spin", "--two_j", "2", "--a", "0.3", "--theta", "1.0472", "--n", "4", "--out", path}).code == 0);
    const auto e = parse_ensemble_file(slurp(path));
    const auto direct = cyclic_spin_ensemble({2, 0.3, 1.0472, 0.0, 4});
    REQUIRE(e.size() == 4);
    for (int i = 0; i < 4; ++i) CHECK(max_abs(e.state(i).matrix() - direct.state(i).matrix()) <= 1e-12);
  }
  SUBCASE("invalid params") {
    CHECK(medctl({"gen", "spin", "--two_j", "2", "--a", "0.9"}).code == cli::kExitError);
    CHECK(medctl({"gen", "hexagon"}).code == cli::kExitError);
  }
}

TEST_CASE("sweep") {
  const std::string tmpl = kData + "/spin_template.json";
  SUBCASE("theta sweep") {
    const auto out = temp_path("theta.csv");
    REQUIRE(medctl({"sweep", tmpl, "--grid", "theta=0,0.7853981633974483,1.5707963267948966", "--out", out}).code == 0);
    const auto rows = read_csv(out);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0] == std::vector<std::string>{"theta", "p_closed", "p_oracle", "certified", "margin_min"});
    CHECK(std::stod(rows[1][1]) == doctest::Approx(1.0 / 3).epsilon(1e-12));
    CHECK(std::stod(rows[1][2]) == doctest::Approx(1.0 / 3).epsilon(1e-9));
  }
  SUBCASE("a = 0 rows are 1/N") {
    const auto out = temp_path("a0.csv");
    REQUIRE(medctl({"sweep", tmpl, "--grid", "a=0;theta=0.3,1.2;n=2,4", "--out", out}).code == 0);
    const auto rows = read_csv(out);
    REQUIRE(rows.size() == 5);
    // Lexicographic, last axis fastest.
    CHECK(rows[1][1] == "0.3");
    CHECK(rows[1][2] == "2");
    CHECK(rows[2][2] == "4");
    CHECK(rows[3][1] == "1.2");
    for (size_t k = 1; k < rows.size(); ++k) {
      const double n = std::stod(rows[k][2]);
      CHECK(std::stod(rows[k][3]) == doctest::Approx(1.0 / n).epsilon(1e-12));
      CHECK(std::stod(rows[k][4]) == doctest::Approx(1.0 / n).epsilon(1e-9));
    }
  }
  SUBCASE("j = 1/2 certified rows agree with the oracle") {
    const auto out = temp_path("half.csv");
    REQUIRE(medctl({"sweep", tmpl, "--grid", "a=0.25,0.5,0.75,1;theta=0.5236,1.0472,1.5708", "--out", out}).code == 0);
    const auto rows = read_csv(out);
    REQUIRE(rows.size() == 13);
    int certified = 0;
    for (size_t k = 1; k < rows.size(); ++k) {
      if (rows[k][4] != "1") continue;
      ++certified;
      CHECK(std::abs(std::stod(rows[k][2]) - std::stod(rows[k][3])) <= 1e-6);
    }
    CHECK(certified > 0);
  }
  SUBCASE("deterministic regardless of concurrency") {
    const auto a = temp_path("jobs1.csv");
    const auto b = temp_path("jobs4.csv");
    REQUIRE(medctl({"sweep", tmpl, "--grid", "a=0.1,0.4;theta=0.5,1.5", "--out", a, "--jobs", "1"}).code == 0);
    REQUIRE(medctl({"sweep", tmpl, "--grid", "a=0.1,0.4;theta=0.5,1.5", "--out", b, "--jobs", "4"}).code == 0);
    CHECK(slurp(a) == slurp(b));
  }
  SUBCASE("errors") {
    const auto out = temp_path("bad.csv");
    CHECK(medctl({"sweep", tmpl, "--grid", "phi=0,1", "--out", out}).code == cli::kExitError);
    CHECK(medctl({"sweep", tmpl, "--grid", "a=x", "--out", out}).code == cli::kExitError);
    CHECK(medctl({"sweep", kData + "/trine.json", "--grid", "a=0.5", "--out", out}).code == cli::kExitError);
    CHECK(medctl({"sweep", tmpl, "--grid", "a=1.5", "--out", out}).code == cli::kExitError);
  }
}

TEST_CASE("grid parsing and digest") {
  const auto axes = cli::parse_grid("a=0,0.25;theta=1;n=3;two_j=1,2");
  REQUIRE(axes.size() == 4);
  CHECK(axes[0].values == std::vector<double>{0, 0.25});
  CHECK(axes[3].name == "two_j");
  CHECK_THROWS_AS(cli::parse_grid("a=1;a=2"), PreconditionError);
  CHECK(cli::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
