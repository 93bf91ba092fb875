#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "pcgs/errors.hpp"
#include "pcgs/state_io.hpp"

namespace fs = std::filesystem;
using pcgs::cli::run;

namespace {

const fs::path kWork{PCGS_TEST_WORKDIR};

// Cached fixtures must not outlive a rebuild.
const bool kFreshWorkdir = [] {
  fs::remove_all(kWork);
  fs::create_directories(kWork);
  return true;
}();

struct Result {
  int code;
  std::string out, err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string first_line(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  return line;
}

std::size_t data_rows(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::size_t n = 0;
  std::getline(in, line);
  while (std::getline(in, line))
    if (!line.empty()) ++n;
  return n;
}

std::string last_line(const fs::path& p) {
  std::ifstream in(p);
  std::string line, last;
  while (std::getline(in, line))
    if (!line.empty()) last = line;
  return last;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

/// Small simulated problem shared by the workflow tests.
fs::path tiny_problem() {
  const fs::path dir = kWork / "tiny";
  if (!fs::exists(dir / "X.mtx")) {
    const auto r = invoke({"simulate", "--n", "120", "--p", "15", "--k", "3", "--m", "2", "--seed", "7",
                           "--signal", "1.5", "--out-dir", dir.string()});
    REQUIRE(r.code == 0);
  }
  return dir;
}

fs::path tiny_state() {
  const fs::path dir = tiny_problem();
  if (!fs::exists(dir / "state.bin")) {
    const auto r = invoke({"gibbs", "--data", (dir / "X.mtx").string(), "--outcome", (dir / "y.csv").string(),
                           "--n-iter", "100", "--burn-in", "20", "--intercept", "--seed", "3", "--log-every", "0",
                           "--out-dir", dir.string()});
    REQUIRE(r.code == 0);
  }
  return dir;
}

}  // namespace

TEST_CASE("usage errors exit 1") {
  CHECK(invoke({}).code == 1);
  const auto r = invoke({"simulate", "--n", "10", "--p", "5", "--bogus", "1"});
  CHECK(r.code == 1);
  CHECK(r.err.find("--bogus") != std::string::npos);
  CHECK(r.err.find("Usage") != std::string::npos);
  CHECK(invoke({"frobnicate"}).code == 1);
  CHECK(invoke({"simulate", "--n", "10", "--p", "5", "--m", "7", "--out-dir", (kWork / "bad").string()}).code == 1);
  CHECK(invoke({"--help"}).code == 0);
}

TEST_CASE("simulate writes design, outcome and manifest reproducibly") {
  const fs::path a = kWork / "sim_a", b = kWork / "sim_b";
  const std::vector<std::string> base{"simulate", "--n", "60", "--p", "12", "--k", "2", "--m", "3", "--seed", "11"};
  auto args = base;
  args.insert(args.end(), {"--out-dir", a.string()});
  const auto r = invoke(args);
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("correlation_sd ", 0) == 0);
  CHECK(first_line(a / "y.csv") == "y");
  CHECK(data_rows(a / "y.csv") == 60);
  CHECK(first_line(a / "X.mtx").rfind("%%MatrixMarket", 0) == 0);

  const auto m = nlohmann::json::parse(slurp(a / "manifest.simulate.json"));
  CHECK(m["subcommand"] == "simulate");
  CHECK(m["seed"] == 11);
  CHECK(m["flags"]["n"] == "60");
  CHECK(m["flags"]["m"] == "3");
  CHECK(m["outputs"].size() == 2);
  CHECK(m.contains("started_utc"));

  auto args_b = base;
  args_b.insert(args_b.end(), {"--out-dir", b.string()});
  REQUIRE(invoke(args_b).code == 0);
  CHECK(slurp(a / "X.mtx") == slurp(b / "X.mtx"));
  CHECK(slurp(a / "y.csv") == slurp(b / "y.csv"));
}

TEST_CASE("output directory comes from the environment when no flag is given") {
  const fs::path dir = kWork / "from_env";
  fs::remove_all(dir);
  ::setenv(pcgs::cli::kOutputDirEnv, dir.string().c_str(), 1);
  const auto r = invoke({"simulate", "--n", "20", "--p", "4", "--m", "1", "--k", "1", "--x", "X.csv"});
  ::unsetenv(pcgs::cli::kOutputDirEnv);
  REQUIRE(r.code == 0);
  CHECK(fs::exists(dir / "X.csv"));
  CHECK(fs::exists(dir / "manifest.simulate.json"));
}

TEST_CASE("gibbs writes one chain row per stored draw") {
  const fs::path dir = tiny_problem();
  const fs::path out = kWork / "gibbs_rows";
  const auto r = invoke({"gibbs", "--data", (dir / "X.mtx").string(), "--outcome", (dir / "y.csv").string(),
                         "--sampler", "cg", "--n-iter", "100", "--burn-in", "30", "--seed", "5", "--log-every", "50",
                         "--out-dir", out.string()});
  REQUIRE(r.code == 0);
  CHECK(data_rows(out / "chain.csv") == 70);
  std::string header;
  for (int j = 0; j < 15; ++j) header += "beta_" + std::to_string(j) + ",";
  CHECK(first_line(out / "chain.csv") == header + "tau,logdensity");
  CHECK(r.err.find("iteration 50/100") != std::string::npos);
  const auto saved = pcgs::io::load_state(out / "state.bin");
  CHECK(saved.state.beta.size() == 15);
  CHECK_FALSE(saved.intercept);
}

TEST_CASE("config file mirrors the flags") {
  const fs::path dir = tiny_problem();
  const fs::path out = kWork / "gibbs_config";
  fs::create_directories(out);
  {
    std::ofstream cfg(out / "run.cfg");
    cfg << "data=" << (dir / "X.mtx").string() << "\n"
        << "outcome=" << (dir / "y.csv").string() << "\n"
        << "n-iter=40\nburn-in=10\nthin=3\nsampler=direct\nseed=9\nlog-every=0\n";
  }
  const auto r = invoke({"gibbs", "--config", (out / "run.cfg").string(), "--out-dir", out.string()});
  REQUIRE(r.code == 0);
  CHECK(data_rows(out / "chain.csv") == 10);
  const auto m = nlohmann::json::parse(slurp(out / "manifest.gibbs.json"));
  CHECK(m["flags"]["sampler"] == "direct");
  CHECK(m["seed"] == 9);
}

TEST_CASE("unsupported bridge exponent is an argument error") {
  const fs::path dir = tiny_problem();
  const auto r = invoke({"gibbs", "--data", (dir / "X.mtx").string(), "--outcome", (dir / "y.csv").string(),
                         "--alpha", "0.5", "--n-iter", "5", "--out-dir", (kWork / "alpha").string()});
  CHECK(r.code == 1);
}

TEST_CASE("cg-bench on a saved state converges and writes the trace") {
  const fs::path dir = tiny_state();
  const fs::path out = kWork / "bench";
  const auto r = invoke({"cg-bench", "--state", (dir / "state.bin").string(), "--data", (dir / "X.mtx").string(),
                         "--outcome", (dir / "y.csv").string(), "--preconditioner", "prior", "--trace", "t.csv",
                         "--replicates", "3", "--out-dir", out.string()});
  REQUIRE(r.code == 0);
  CHECK(first_line(out / "t.csv") == "iter,rms_precond_residual,phi_norm_error,l2_error,rel_coord_error");
  const std::string last = last_line(out / "t.csv");
  const auto c1 = last.find(','), c2 = last.find(',', c1 + 1);
  CHECK(std::stod(last.substr(c1 + 1, c2 - c1 - 1)) <= 1e-6);
  CHECK(r.out.find("replicate 2 iterations") != std::string::npos);

  const auto again = invoke({"cg-bench", "--state", (dir / "state.bin").string(), "--data",
                             (dir / "X.mtx").string(), "--outcome", (dir / "y.csv").string(), "--trace", "t2.csv",
                             "--replicates", "3", "--out-dir", out.string()});
  REQUIRE(again.code == 0);
  CHECK(slurp(out / "t.csv") == slurp(out / "t2.csv"));
}

TEST_CASE("eig-diag and trace emit their tables") {
  const fs::path dir = tiny_state();
  const fs::path out = kWork / "eig";
  auto r = invoke({"eig-diag", "--state", (dir / "state.bin").string(), "--data", (dir / "X.mtx").string(),
                   "--preconditioner", "prior", "--out-dir", out.string()});
  REQUIRE(r.code == 0);
  CHECK(first_line(out / "spectrum.csv") == "index,eigenvalue,log10_eigenvalue");
  CHECK(data_rows(out / "spectrum.csv") == 16);
  CHECK(first_line(out / "histogram.csv") == "log10_lower,log10_upper,count");
  CHECK(r.out.find("fraction_in_trim_range") != std::string::npos);

  r = invoke({"trace", "--state", (dir / "state.bin").string(), "--out-dir", out.string()});
  REQUIRE(r.code == 0);
  CHECK(first_line(out / "tau_lambda.csv") == "rank,tau_lambda,relative");
  CHECK(data_rows(out / "tau_lambda.csv") == 15);
}

TEST_CASE("compare-chains on two chains of the same posterior") {
  const fs::path dir = tiny_problem();
  const fs::path out = kWork / "compare";
  for (const char* seed : {"1", "2"}) {
    const auto r = invoke({"gibbs", "--data", (dir / "X.mtx").string(), "--outcome", (dir / "y.csv").string(),
                           "--n-iter", "700", "--burn-in", "100", "--seed", seed, "--log-every", "0", "--out",
                           std::string("chain_") + seed + ".csv", "--out-dir", out.string()});
    REQUIRE(r.code == 0);
  }
  const auto r = invoke({"compare-chains", "--a", (out / "chain_1.csv").string(), "--b",
                         (out / "chain_2.csv").string(), "--out-dir", out.string()});
  REQUIRE(r.code == 0);
  CHECK(first_line(out / "standardized_differences.csv") == "index,z,ess_a,ess_b,flagged");
  CHECK(data_rows(out / "standardized_differences.csv") == 15);
  CHECK(r.out.find("result ") != std::string::npos);
}

TEST_CASE("numeric failure exits 2") {
  const fs::path dir = tiny_state();
  auto saved = pcgs::io::load_state(dir / "state.bin");
  saved.state.tau = 1e300;
  saved.state.lambda.assign(saved.state.lambda.size(), 1e300);
  const fs::path bad = kWork / "overflow_state.bin";
  pcgs::io::save_state(bad, saved);
  const auto r = invoke({"cg-bench", "--state", bad.string(), "--data", (dir / "X.mtx").string(), "--outcome",
                         (dir / "y.csv").string(), "--out-dir", (kWork / "overflow").string()});
  CHECK(r.code == 2);
}

TEST_CASE("state from a different design is rejected") {
  const fs::path dir = tiny_state();
  const fs::path other = kWork / "sim_a" / "X.mtx";
  if (!fs::exists(other)) return;
  const auto r = invoke({"eig-diag", "--state", (dir / "state.bin").string(), "--data", other.string(), "--out-dir",
                         (kWork / "mismatch").string()});
  CHECK(r.code == 1);
}
