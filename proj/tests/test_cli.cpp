#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include <json.hpp>

#include "mtdar/errors.hpp"
#include "mtdar/correlation.hpp"
#include "mtdar/spectrum.hpp"

namespace fs = std::filesystem;
using namespace mtdar;

namespace {

struct Workdir {
  fs::path dir;
  Workdir() {
    dir = fs::temp_directory_path() / ("mtdar_cli_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Workdir() { fs::remove_all(dir); }
  std::string operator/(const std::string& name) const { return (dir / name).string(); }
};

int run(const std::string& args) {
  const std::string cmd = std::string(MTDAR_CLI) + " " + args + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void put(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

std::string model_json(double a1, int q1, int q2, double rho) {
  std::ostringstream o;
  o << R"({"p": 2, "weights": [)" << a1 << ", " << 1 - a1 << R"(], "signs": [)" << q1 << ", " << q2
    << R"(], "binding": {"family": "wrapped_cauchy", "concentration": )" << rho << "}}";
  return o.str();
}

std::vector<std::vector<double>> read_csv(const std::string& path) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_CASE("cli simulate") {
  Workdir w;
  put(w / "ar1.json", R"({"p": 1, "weights": [1.0], "signs": [1], "binding": {"family": "wrapped_cauchy", "concentration": 0.9}})");
  REQUIRE(run("--seed 11 simulate --model " + w / "ar1.json" + " -n 1000 --out " + w / "a.csv") == 0);
  REQUIRE(run("simulate --model " + w / "ar1.json" + " -n 1000 --seed 11 --out " + w / "b.csv") == 0);
  CHECK(slurp(w / "a.csv") == slurp(w / "b.csv"));
  const auto rows = read_csv(w / "a.csv");
  CHECK(rows.size() == 1000);
  for (const auto& r : rows) CHECK((r[0] >= -kPi && r[0] < kPi));

  CHECK(run("simulate --model " + w / "ar1.json" + " -n 0") == 2);
  CHECK(run("simulate --model " + w / "missing.json" + " -n 10") == 4);
  put(w / "bad.json", R"({"p": 1, "weights": [0.5], "signs": [1], "binding": {"family": "wrapped_cauchy", "concentration": 0.9}})");
  CHECK(run("simulate --model " + w / "bad.json" + " -n 10") == 2);
  put(w / "broken.json", "{not json");
  CHECK(run("simulate --model " + w / "broken.json" + " -n 10") == 2);
  CHECK(run("frobnicate") == 2);
  CHECK(run("simulate --model " + w / "ar1.json" + " -n 10 --out /nonexistent/dir/x.csv") == 4);
}

TEST_CASE("cli acf, pacf, spectrum") {
  Workdir w;
  put(w / "fig.json", model_json(0.3, 1, 1, 0.9));
  REQUIRE(run("acf --model " + w / "fig.json" + " -K 10 --out " + w / "acf.csv --svg " + w / "acf.svg") == 0);
  const auto acf = read_csv(w / "acf.csv");
  const auto ref = cacf(MtdArModel({0.3, 0.7}, {1, 1}, BindingDensity::wrapped_cauchy(0.9)), 10);
  REQUIRE(acf.size() == 11);
  for (int k = 0; k <= 10; ++k) CHECK(acf[k][1] == ref[k]);
  CHECK(slurp(w / "acf.svg").find("<svg") == 0);

  REQUIRE(run("pacf --model " + w / "fig.json" + " -K 8 --out " + w / "pacf.csv") == 0);
  const auto pacf = read_csv(w / "pacf.csv");
  REQUIRE(pacf.size() == 8);
  CHECK(pacf[0][0] == 1);
  for (int k = 3; k <= 8; ++k) CHECK(std::abs(pacf[k - 1][1]) < 1e-10);

  REQUIRE(run("acf --model " + w / "fig.json" + " -K 3 --gamma --out " + w / "g.csv") == 0);
  CHECK(slurp(w / "g.csv").rfind("lag,g11,g12,g21,g22\n0,0.5,0,0,0.5\n", 0) == 0);

  put(w / "iid.json", R"({"p": 1, "weights": [1.0], "signs": [1], "binding": {"family": "wrapped_cauchy", "concentration": 0.0}})");
  REQUIRE(run("--seed 3 simulate --model " + w / "iid.json" + " -n 20000 --out " + w / "iid.csv") == 0);
  REQUIRE(run("pacf --series " + w / "iid.csv" + " -K 5 --out " + w / "ipacf.csv") == 0);
  for (const auto& r : read_csv(w / "ipacf.csv")) CHECK(std::abs(r[1]) < 0.03);
  REQUIRE(run("acf --series " + w / "iid.csv" + " -K 5 --out " + w / "iacf.csv") == 0);
  for (const auto& r : read_csv(w / "iacf.csv")) if (r[0] > 0) CHECK(std::abs(r[1]) < 0.03);
  CHECK(run("acf --model " + w / "fig.json" + " --series " + w / "iid.csv") == 2);
  CHECK(run("acf -K 3") == 2);

  for (auto [q1, q2] : std::vector<std::pair<int, int>>{{1, 1}, {-1, 1}, {1, -1}, {-1, -1}}) {
    put(w / "m.json", model_json(0.3, q1, q2, 0.9));
    REQUIRE(run("spectrum --model " + w / "m.json" + " --grid 2048 --out " + w / "f.csv") == 0);
    const auto f = read_csv(w / "f.csv");
    REQUIRE(f.size() == 2048);
    double total = 0;
    for (const auto& r : f) total += r[1] * kTwoPi / 2048;
    CHECK(std::abs(total - 0.25) < 1e-6);
  }
  put(w / "ar1.json", R"({"p": 1, "weights": [1.0], "signs": [-1], "binding": {"family": "wrapped_cauchy", "concentration": 0.8}})");
  REQUIRE(run("spectrum --model " + w / "ar1.json" + " --grid 64 --out " + w / "f1.csv") == 0);
  for (const auto& r : read_csv(w / "f1.csv")) {
    const double closed = (1 - 0.64) * (1 + 0.64) / (8 * kPi * std::norm(1.0 + 0.64 * std::polar(1.0, r[0])));
    CHECK(std::abs(r[1] - closed) < 1e-12);
  }
  REQUIRE(run("spectrum --series " + w / "iid.csv" + " --grid 64 --window bartlett --window-lag 50 --out " + w / "p.csv") == 0);
  CHECK(read_csv(w / "p.csv").size() == 64);
}

TEST_CASE("cli fit") {
  Workdir w;
  put(w / "fig.json", model_json(0.3, 1, -1, 0.9));
  REQUIRE(run("--seed 21 simulate --model " + w / "fig.json" + " -n 1000 --out " + w / "s.csv") == 0);
  REQUIRE(run("fit --series " + w / "s.csv" + " --p 2 --out " + w / "fit.json") == 0);
  const auto j = nlohmann::json::parse(slurp(w / "fit.json"));
  CHECK(j["signs"] == std::vector<int>{1, -1});
  CHECK(std::abs(j["weights"][0].get<double>() - 0.3) < 0.07);
  CHECK(std::abs(j["concentration"].get<double>() - 0.9) < 0.015);
  CHECK(j["trace"]["candidates"].size() == 4);

  // the same data in degrees
  std::ofstream deg(w / "deg.csv");
  deg << "wind_direction\n";
  for (const auto& r : read_csv(w / "s.csv")) deg << std::setprecision(17) << r[0] * 180.0 / kPi << '\n';
  deg.close();
  REQUIRE(run("fit --series " + w / "deg.csv" + " --unit deg --p 2 --out " + w / "fitd.json") == 0);
  const auto jd = nlohmann::json::parse(slurp(w / "fitd.json"));
  CHECK(std::abs(jd["loglik"].get<double>() - j["loglik"].get<double>()) < 1e-6);
  CHECK(jd["signs"] == j["signs"]);

  REQUIRE(run("fit --series " + w / "s.csv" + " --p-max 4 --criterion aic --out " + w / "sel.json") == 0);
  const auto sel = nlohmann::json::parse(slurp(w / "sel.json"));
  CHECK(sel["fits"].size() == 4);
  CHECK(sel["selected_p"].get<int>() >= 2);

  CHECK(run("fit --series " + w / "s.csv") == 2);
  CHECK(run("fit --series " + w / "s.csv" + " --p 2 --p-max 3") == 2);
  CHECK(run("fit --series " + w / "s.csv" + " --p 2 --family gaussian") == 2);
}

TEST_CASE("cli wind-style pipeline") {
  Workdir w;
  put(w / "m.json", R"({"p": 1, "weights": [1.0], "signs": [1], "binding": {"family": "von_mises", "concentration": 4.0}})");
  REQUIRE(run("--seed 4 simulate --model " + w / "m.json" + " -n 310 --out " + w / "r.csv") == 0);
  std::ofstream deg(w / "wind.csv");
  for (const auto& r : read_csv(w / "r.csv")) deg << std::setprecision(10) << r[0] * 180.0 / kPi + 180.0 << '\n';
  deg.close();
  REQUIRE(run("fit --series " + w / "wind.csv" + " --unit deg --p-max 7 --criterion bic --out " + w / "t.json") == 0);
  const auto t = nlohmann::json::parse(slurp(w / "t.json"));
  CHECK(t["fits"].size() == 7);
  for (const auto& f : t["fits"]) {
    CHECK(f.contains("aic"));
    CHECK(f.contains("bic"));
    CHECK(f["n"] == 310);
  }
}

TEST_CASE("cli study") {
  Workdir w;
  put(w / "cfg.json", R"({"kind": "estimation",
    "truth": {"weights": [0.3, 0.7], "binding": {"family": "wrapped_cauchy", "concentration": 0.9}},
    "fit_family": "von_mises", "sample_sizes": [100], "q_grid": [[1, 1], [1, -1]], "replications": 1, "seed": 9})");
  REQUIRE(run("study --config " + w / "cfg.json" + " --out-dir " + w / "o1 > /dev/null") == 0);
  REQUIRE(run("study --config " + w / "cfg.json" + " --out " + w / "o2 > /dev/null") == 0);
  const std::string est = slurp(w / "o1/estimation.csv");
  CHECK(est.rfind("n,q,replications,failures,mean_a1,rmse_a1,mean_rho,rmse_rho,coverage_a1,sign_recovery\n", 0) == 0);
  CHECK(est.find("\"(1,-1)\"") != std::string::npos);
  CHECK(est == slurp(w / "o2/estimation.csv"));
  CHECK(slurp(w / "o1/replications.csv") == slurp(w / "o2/replications.csv"));
  const auto man = nlohmann::json::parse(slurp(w / "o1/manifest.json"));
  CHECK(man["seed"] == 9);
  CHECK(man.contains("wall_time_seconds"));
  CHECK(man.contains("version"));

  put(w / "sel.json", R"({"kind": "selection",
    "truth": {"weights": [0.3, 0.7], "binding": {"family": "wrapped_cauchy", "concentration": 0.9}},
    "sample_sizes": [100], "q_grid": [[1, 1]], "replications": 1, "p_max": 3})");
  REQUIRE(run("--seed 2 study --config " + w / "sel.json" + " --out-dir " + w / "o3 > /dev/null") == 0);
  const std::string sel = slurp(w / "o3/selection.csv");
  CHECK(sel.rfind("n,q,criterion,p1,p2,p3,failures\n", 0) == 0);
  CHECK(nlohmann::json::parse(slurp(w / "o3/manifest.json"))["seed"] == 2);

  put(w / "bad.json", R"({"truth": {"weights": [0.3, 0.7], "binding": {"family": "wrapped_cauchy", "concentration": 0.9}},
    "sample_sizes": [10], "replications": 1})");
  CHECK(run("study --config " + w / "bad.json" + " --out-dir " + w / "o4") == 2);
}
