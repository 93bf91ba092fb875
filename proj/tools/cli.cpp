#include "cli.hpp"

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "pcgs/cg.hpp"
#include "pcgs/diagnostics.hpp"
#include "pcgs/errors.hpp"
#include "pcgs/gibbs.hpp"
#include "pcgs/io.hpp"
#include "pcgs/mcmc_stats.hpp"
#include "pcgs/parallel.hpp"
#include "pcgs/precond.hpp"
#include "pcgs/sampler.hpp"
#include "pcgs/state_io.hpp"
#include "pcgs/synth.hpp"

namespace pcgs::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string format_double(double v) {
  if (std::isnan(v)) return "";
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::array<char, 32> buf{};
  std::strftime(buf.data(), buf.size(), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf.data();
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(ctx);
    throw std::runtime_error("sha256 initialisation failed");
  }
  std::array<char, 1 << 16> chunk{};
  while (in) {
    in.read(chunk.data(), chunk.size());
    EVP_DigestUpdate(ctx, chunk.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md.data(), &len);
  EVP_MD_CTX_free(ctx);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex.push_back(kHex[md[i] >> 4]);
    hex.push_back(kHex[md[i] & 0xF]);
  }
  return hex;
}

/// Comma-separated table with a fixed header; doubles in shortest round-trip form.
class CsvTable {
 public:
  CsvTable(const fs::path& path, const std::vector<std::string>& header) : out_(path) {
    if (!out_) throw ParseError("cannot write " + path.string());
    row(header);
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
  }
  void close() {
    out_.close();
    if (!out_) throw std::runtime_error("write failed");
  }

 private:
  std::ofstream out_;
};

/// Per-invocation bookkeeping: output directory, recorded files and the manifest.
class Run {
 public:
  Run(std::string subcommand, CLI::App* app) : subcommand_(std::move(subcommand)), app_(app) {}

  std::optional<std::string> out_dir_flag;
  std::size_t threads = 1;

  fs::path output_dir() const {
    if (out_dir_flag && !out_dir_flag->empty()) return *out_dir_flag;
    if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') return env;
    return fs::current_path();
  }

  fs::path output(const std::string& name) {
    const fs::path p(name);
    const fs::path full = p.is_absolute() ? p : output_dir() / p;
    if (full.has_parent_path()) fs::create_directories(full.parent_path());
    outputs_.push_back(full);
    return full;
  }

  fs::path input(const std::string& name) {
    const fs::path p(name);
    if (!fs::exists(p)) throw ParseError("input file not found: " + name);
    inputs_.push_back(p);
    return p;
  }

  void begin() {
    started_ = utc_now();
    set_num_threads(threads);
  }

  void write_manifest(std::optional<std::uint64_t> seed) {
    json m;
    m["subcommand"] = subcommand_;
    m["version"] = PCGS_VERSION;
    m["seed"] = seed ? json(*seed) : json(nullptr);
    m["threads"] = threads;
    json flags = json::object();
    for (const CLI::Option* opt : app_->get_options()) {
      const std::string name = opt->get_single_name();
      if (name == "help" || name == "config") continue;
      if (opt->count() > 0) {
        const auto& res = opt->results();
        flags[name] = res.size() == 1 ? json(res.front()) : json(res);
      } else {
        flags[name] = opt->get_default_str();
      }
    }
    m["flags"] = flags;
    json inputs = json::object();
    for (const auto& p : inputs_) inputs[p.string()] = sha256_file(p);
    m["inputs"] = inputs;
    json outputs = json::object();
    for (const auto& p : outputs_)
      if (fs::exists(p)) outputs[p.string()] = sha256_file(p);
    m["outputs"] = outputs;
    m["started_utc"] = started_;
    m["finished_utc"] = utc_now();
    const fs::path path = output_dir() / ("manifest." + subcommand_ + ".json");
    fs::create_directories(path.parent_path());
    std::ofstream out(path);
    out << m.dump(2) << '\n';
    if (!out) throw std::runtime_error("cannot write manifest " + path.string());
  }

 private:
  std::string subcommand_;
  CLI::App* app_;
  std::vector<fs::path> inputs_;
  std::vector<fs::path> outputs_;
  std::string started_;
};

void add_common(CLI::App* sub, Run& run, std::string& config) {
  sub->add_option("--config", config, "key=value file mirroring the flags; command-line flags win");
  sub->add_option("--threads", run.threads, "worker threads for the sparse kernels")->check(CLI::PositiveNumber);
  sub->add_option("--out-dir", run.out_dir_flag, std::string("output directory (overrides ") + kOutputDirEnv + ")");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

/// Splices `--key=value` for every line of each --config file in front of
/// the other flags, so that explicit flags take precedence.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> from_file, rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string path;
    if (args[i] == "--config") {
      if (i + 1 == args.size()) throw ArgumentError("--config needs a file");
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
      continue;
    }
    std::ifstream in(path);
    if (!in) throw ArgumentError("cannot read config file " + path);
    std::string line;
    for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
      line = trim(line);
      if (line.empty() || line[0] == '#' || line[0] == ';') continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos || trim(line.substr(0, eq)).empty())
        throw ArgumentError(path + ":" + std::to_string(lineno) + ": expected key=value");
      from_file.push_back("--" + trim(line.substr(0, eq)) + "=" + trim(line.substr(eq + 1)));
    }
  }
  if (from_file.empty() || rest.empty()) return rest;
  std::vector<std::string> out{rest.front()};
  out.insert(out.end(), from_file.begin(), from_file.end());
  out.insert(out.end(), rest.begin() + 1, rest.end());
  return out;
}

double parse_sd(const std::string& text) {
  if (text == "inf" || text == "flat") return std::numeric_limits<double>::infinity();
  double v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() || !(v > 0))
    throw ArgumentError("prior sd must be positive or 'inf', got '" + text + "'");
  return v;
}

/// Design as the sampler sees it: optional standardization, then the intercept column.
SparseDesignMatrix model_design(const fs::path& path, bool csv_header, bool standardized, bool intercept) {
  SparseDesignMatrix x = io::read_design(path, csv_header);
  if (standardized) x = standardize(x);
  if (intercept) x = x.with_intercept();
  return x;
}

std::vector<double> read_outcome(const fs::path& path, std::size_t n) {
  auto y = io::read_vector_csv(path);
  if (y.size() != n) throw ArgumentError("outcome length " + std::to_string(y.size()) + " != design rows " + std::to_string(n));
  return y;
}

std::vector<double> initial_gamma(const std::vector<double>& unshrunk_sd) {
  ChainOutput empty;
  empty.n_unshrunk = unshrunk_sd.size();
  empty.unshrunk_prior_sd = unshrunk_sd;
  return gamma_policy(empty);
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  SimSpec spec;
  std::string x_path = "X.mtx";
  std::string y_path = "y.csv";
};

void cmd_simulate(const SimulateArgs& a, Run& run, std::ostream& out) {
  a.spec.validate();
  const Eigen::MatrixXd xd = simulate_design(a.spec);
  const SparseDesignMatrix xs = SparseDesignMatrix::from_dense(xd);
  const auto y = simulate_outcomes(xs, a.spec);
  const fs::path xp = run.output(a.x_path);
  if (xp.extension() == ".mtx")
    io::write_matrix_market(xp, xs);
  else
    io::write_dense_csv(xp, xd);
  io::write_vector_csv(run.output(a.y_path), y, "y");
  out << "correlation_sd " << format_double(pairwise_correlation_sd(xd)) << '\n';
}

// ---------------------------------------------------------------- gibbs

struct GibbsArgs {
  std::string data, outcome;
  bool csv_header = false;
  bool standardize = false;
  bool intercept = false;
  std::size_t n_unshrunk = 0;
  std::string unshrunk_sd = "inf";
  double alpha = 1.0;
  double global_shape = 1.0;
  double global_rate = 1.0;
  std::size_t n_iter = 1000;
  std::size_t burn_in = 0;
  std::size_t thin = 1;
  std::string sampler = "cg";
  std::uint64_t seed = 0;
  std::string preconditioner = "prior";
  double rtol = 1e-6;
  std::size_t max_iter = 0;
  bool warm_start = true;
  std::string out = "chain.csv";
  std::string state_out = "state.bin";
  std::size_t log_every = 100;
};

void cmd_gibbs(const GibbsArgs& a, Run& run, std::ostream& out, std::ostream& err) {
  const SparseDesignMatrix x = model_design(run.input(a.data), a.csv_header, a.standardize, a.intercept);
  const auto y = read_outcome(run.input(a.outcome), x.n_rows());
  const std::size_t q1 = a.n_unshrunk + (a.intercept ? 1 : 0);
  if (q1 >= x.n_cols()) throw ArgumentError("no shrunk coefficients left after the unshrunk block");

  GibbsConfig cfg;
  cfg.bridge.alpha = a.alpha;
  cfg.bridge.global_shape = a.global_shape;
  cfg.bridge.global_rate = a.global_rate;
  cfg.bridge.unshrunk_prior_sd.assign(q1, parse_sd(a.unshrunk_sd));
  cfg.n_iter = a.n_iter;
  cfg.burn_in = a.burn_in;
  cfg.thin = a.thin;
  if (a.sampler == "cg")
    cfg.sampler = BetaSampler::kCg;
  else if (a.sampler == "direct")
    cfg.sampler = BetaSampler::kDirect;
  else
    throw ArgumentError("sampler must be cg or direct");
  cfg.seed = a.seed;
  cfg.cg = {.max_iter = a.max_iter, .rtol = a.rtol, .trace_level = TraceLevel::kNone};
  cfg.preconditioner = parse_preconditioner(a.preconditioner);
  cfg.warm_start = a.warm_start;
  if (a.log_every > 0) {
    cfg.on_iteration = [&](std::size_t it, const ShrinkageState& s) {
      if ((it + 1) % a.log_every == 0)
        err << "iteration " << it + 1 << "/" << a.n_iter << " tau " << format_double(s.tau) << '\n';
    };
  }

  ShrinkageState state = initial_state(x.n_rows(), q1, x.n_cols() - q1);
  const ChainOutput chain = gibbs_run(x, y, cfg, state);
  io::write_chain_csv(run.output(a.out), chain);
  io::save_state(run.output(a.state_out),
                 {.state = state, .unshrunk_prior_sd = cfg.bridge.unshrunk_prior_sd,
                  .standardized = a.standardize, .intercept = a.intercept});

  double mean_iters = 0;
  for (auto k : chain.cg_iterations) mean_iters += static_cast<double>(k);
  if (!chain.cg_iterations.empty()) mean_iters /= static_cast<double>(chain.cg_iterations.size());
  out << "stored_draws " << chain.draws.size() << '\n';
  out << "mean_cg_iterations " << format_double(mean_iters) << '\n';
  out << "final_tau " << format_double(state.tau) << '\n';
}

// ---------------------------------------------------------------- cg-bench

struct FrozenArgs {
  std::string state, data;
  bool csv_header = false;
  std::string preconditioner = "prior";
};

struct Frozen {
  io::SavedState saved;
  SparseDesignMatrix x;
};

Frozen load_frozen(const FrozenArgs& a, Run& run) {
  Frozen f{io::load_state(run.input(a.state)), {}};
  f.x = model_design(run.input(a.data), a.csv_header, f.saved.standardized, f.saved.intercept);
  f.saved.state.validate(f.x.n_rows(), f.x.n_cols());
  if (f.saved.unshrunk_prior_sd.size() + f.saved.state.lambda.size() != f.x.n_cols())
    throw ArgumentError("state does not match the design width");
  return f;
}

struct BenchArgs {
  FrozenArgs frozen;
  std::string outcome;
  double rtol = 1e-6;
  std::size_t max_iter = 0;
  std::string trace;
  std::size_t replicates = 1;
  std::uint64_t seed = 0;
  bool oracle = true;
};

void cmd_cg_bench(const BenchArgs& a, Run& run, std::ostream& out) {
  if (a.replicates == 0) throw ArgumentError("replicates must be >= 1");
  const Frozen f = load_frozen(a.frozen, run);
  const auto y = read_outcome(run.input(a.outcome), f.x.n_rows());
  const auto gamma = initial_gamma(f.saved.unshrunk_prior_sd);
  const BetaConditional cond =
      beta_conditional(f.x, outcome_linear_term(f.x, y), f.saved.state, f.saved.unshrunk_prior_sd, gamma);
  const PrecisionOperator& phi = cond.target.precision;
  const Preconditioner m = make_preconditioner(parse_preconditioner(a.frozen.preconditioner), phi, gamma, cond.shrunk_scale);
  const bool want_errors = a.oracle && !a.trace.empty();
  const CGConfig cfg{.max_iter = a.max_iter, .rtol = a.rtol,
                     .trace_level = want_errors ? TraceLevel::kFull : TraceLevel::kNorms};

  std::vector<std::vector<double>> rms, phi_err, l2_err, rel_err;
  for (std::size_t r = 0; r < a.replicates; ++r) {
    Rng rng = Rng::substream(a.seed, {tag(StreamTag::kReplicate), r});
    const auto b = generate_rhs(cond.target, rng);
    const CGReport rep = pcg_solve(phi, b, m, {}, cfg);
    rms.push_back(rep.rms_precond_residual_trace);
    if (want_errors) {
      const ErrorTrace e = error_trace(rep, direct_solve(cond.target, b), phi);
      phi_err.push_back(e.phi_norm_error);
      l2_err.push_back(e.l2_error);
      rel_err.push_back(e.rel_coord_error);
    }
    out << "replicate " << r << " iterations " << rep.iterations << " termination "
        << (rep.converged() ? "converged" : "max_iter") << " final_rms "
        << format_double(rep.rms_precond_residual_trace.back()) << '\n';
  }

  if (!a.trace.empty()) {
    const auto g_rms = geometric_mean(rms);
    const auto g_phi = want_errors ? geometric_mean(phi_err) : std::vector<double>{};
    const auto g_l2 = want_errors ? geometric_mean(l2_err) : std::vector<double>{};
    const auto g_rel = want_errors ? geometric_mean(rel_err) : std::vector<double>{};
    const auto cell = [](const std::vector<double>& v, std::size_t i) {
      return i < v.size() ? format_double(v[i]) : std::string();
    };
    CsvTable t(run.output(a.trace), {"iter", "rms_precond_residual", "phi_norm_error", "l2_error", "rel_coord_error"});
    for (std::size_t i = 0; i < g_rms.size(); ++i)
      t.row({std::to_string(i), cell(g_rms, i), cell(g_phi, i), cell(g_l2, i), cell(g_rel, i)});
    t.close();
  }
}

// ---------------------------------------------------------------- eig-diag

struct EigArgs {
  FrozenArgs frozen;
  std::string out = "spectrum.csv";
  std::string histogram = "histogram.csv";
  std::vector<double> trim;
};

void cmd_eig_diag(const EigArgs& a, Run& run, std::ostream& out) {
  const Frozen f = load_frozen(a.frozen, run);
  const auto gamma = initial_gamma(f.saved.unshrunk_prior_sd);
  const std::vector<double> no_outcome(f.x.n_cols(), 0.0);
  const BetaConditional cond = beta_conditional(f.x, no_outcome, f.saved.state, f.saved.unshrunk_prior_sd, gamma);
  const Preconditioner m = make_preconditioner(parse_preconditioner(a.frozen.preconditioner), cond.target.precision,
                                               gamma, cond.shrunk_scale);
  std::optional<std::pair<double, double>> trim;
  if (!a.trim.empty()) {
    if (a.trim.size() != 2 || !(a.trim[0] <= a.trim[1])) throw ArgumentError("--trim needs LO HI with LO <= HI");
    trim = std::pair{a.trim[0], a.trim[1]};
  }
  const SpectrumReport r = preconditioned_spectrum(cond.target.precision, m, trim);

  CsvTable s(run.output(a.out), {"index", "eigenvalue", "log10_eigenvalue"});
  for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) {
    const double v = r.eigenvalues[i];
    s.row({std::to_string(i), format_double(v), v > 0 ? format_double(std::log10(v)) : std::string()});
  }
  s.close();
  if (!a.histogram.empty()) {
    CsvTable h(run.output(a.histogram), {"log10_lower", "log10_upper", "count"});
    for (std::size_t i = 0; i < r.histogram.counts.size(); ++i)
      h.row({format_double(r.histogram.bin_edges[i]), format_double(r.histogram.bin_edges[i + 1]),
             std::to_string(r.histogram.counts[i])});
    h.close();
  }
  out << "min_eigenvalue " << format_double(r.eigenvalues.back()) << '\n';
  out << "max_eigenvalue " << format_double(r.eigenvalues.front()) << '\n';
  out << "trim_range " << format_double(r.trim_range.first) << ' ' << format_double(r.trim_range.second) << '\n';
  out << "fraction_in_trim_range "
      << format_double(static_cast<double>(r.in_trim_range) / static_cast<double>(r.eigenvalues.size())) << '\n';
}

// ---------------------------------------------------------------- trace

struct TraceArgs {
  std::string state;
  std::size_t top = 250;
  std::string out = "tau_lambda.csv";
};

void cmd_trace(const TraceArgs& a, Run& run, std::ostream& out) {
  const io::SavedState saved = io::load_state(run.input(a.state));
  const TauLambdaProfile prof = tau_lambda_profile(saved.state.tau, saved.state.lambda, a.top);
  CsvTable t(run.output(a.out), {"rank", "tau_lambda", "relative"});
  for (std::size_t i = 0; i < prof.sorted.size(); ++i)
    t.row({std::to_string(i), format_double(prof.sorted[i]), i < prof.relative.size() ? format_double(prof.relative[i]) : ""});
  t.close();
  out << "max_tau_lambda " << format_double(prof.sorted.front()) << '\n';
}

// ---------------------------------------------------------------- compare-chains

struct CompareArgs {
  std::string a, b;
  double min_ess = 10.0;
  std::size_t min_draws = 500;
  double level = 0.01;
  std::string out = "standardized_differences.csv";
};

void cmd_compare(const CompareArgs& a, Run& run, std::ostream& out) {
  const io::ChainTable ca = io::read_chain_csv(run.input(a.a));
  const io::ChainTable cb = io::read_chain_csv(run.input(a.b));
  const StandardizedDifferences d = standardized_difference_test(ca.draws, cb.draws, a.min_ess, a.min_draws);
  CsvTable t(run.output(a.out), {"index", "z", "ess_a", "ess_b", "flagged"});
  std::size_t flagged = 0;
  for (std::size_t j = 0; j < d.z.size(); ++j) {
    t.row({std::to_string(j), format_double(d.z[j]), format_double(d.ess_a[j]), format_double(d.ess_b[j]),
           d.flagged[j] ? "1" : "0"});
    flagged += d.flagged[j] ? 1 : 0;
  }
  t.close();
  out << "coordinates " << d.z.size() << '\n' << "flagged " << flagged << '\n';
  const auto z = d.unflagged();
  if (z.empty()) {
    out << "result inconclusive\n";
    return;
  }
  const KsResult ks = ks_test(z, normal_cdf);
  out << "ks_statistic " << format_double(ks.statistic) << '\n';
  out << "ks_p_value " << format_double(ks.p_value) << '\n';
  out << "result " << (ks.p_value >= a.level ? "pass" : "fail") << '\n';
}

int classify(const std::exception& e) {
  if (dynamic_cast<const NotPositiveDefiniteError*>(&e) || dynamic_cast<const NumericBreakdownError*>(&e) ||
      dynamic_cast<const GibbsError*>(&e) || dynamic_cast<const DegeneratePreconditionerError*>(&e))
    return kExitNumeric;
  return kExitUsage;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Prior-preconditioned conjugate gradient sampler for sparse Bayesian logistic regression", "pcgs"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  std::string config_path;

  std::map<std::string, std::unique_ptr<Run>> runs;
  std::map<std::string, std::function<std::optional<std::uint64_t>()>> actions;
  const auto subcommand = [&](const std::string& name, const std::string& help) {
    CLI::App* sub = app.add_subcommand(name, help);
    auto r = std::make_unique<Run>(name, sub);
    add_common(sub, *r, config_path);
    runs.emplace(name, std::move(r));
    return sub;
  };

  SimulateArgs sim;
  {
    CLI::App* s = subcommand("simulate", "draw a synthetic factor-model design and logistic outcomes");
    s->add_option("--n", sim.spec.n, "observations")->required();
    s->add_option("--p", sim.spec.p, "predictors")->required();
    s->add_option("--k", sim.spec.n_signals, "number of nonzero coefficients")->capture_default_str();
    s->add_option("--m", sim.spec.n_factors, "latent factors (must be < p)")->capture_default_str();
    s->add_option("--signal", sim.spec.signal_value, "value of each nonzero coefficient")->capture_default_str();
    s->add_option("--seed", sim.spec.seed)->capture_default_str();
    s->add_option("--x", sim.x_path, "design output (.mtx or dense CSV)")->capture_default_str();
    s->add_option("--y", sim.y_path, "outcome CSV")->capture_default_str();
    actions["simulate"] = [&]() -> std::optional<std::uint64_t> {
      cmd_simulate(sim, *runs["simulate"], out);
      return sim.spec.seed;
    };
  }

  GibbsArgs gb;
  {
    CLI::App* s = subcommand("gibbs", "run the Polya-Gamma shrinkage Gibbs sampler");
    s->add_option("--data", gb.data, "design (.mtx or dense CSV)")->required();
    s->add_option("--outcome", gb.outcome, "0/1 outcome CSV")->required();
    s->add_flag("--csv-header", gb.csv_header, "dense CSV design has a header line");
    s->add_flag("--standardize", gb.standardize, "centre and scale design columns");
    s->add_flag("--intercept", gb.intercept, "prepend an unshrunk intercept column");
    s->add_option("--unshrunk", gb.n_unshrunk, "leading design columns left unshrunk");
    s->add_option("--unshrunk-sd", gb.unshrunk_sd, "prior sd of unshrunk coefficients, or inf for flat");
    s->add_option("--alpha", gb.alpha, "bridge exponent; only 1 has an exact update");
    s->add_option("--global-shape", gb.global_shape);
    s->add_option("--global-rate", gb.global_rate);
    s->add_option("--n-iter", gb.n_iter);
    s->add_option("--burn-in", gb.burn_in);
    s->add_option("--thin", gb.thin);
    s->add_option("--sampler", gb.sampler)->check(CLI::IsMember({"cg", "direct"}));
    s->add_option("--seed", gb.seed);
    s->add_option("--preconditioner", gb.preconditioner, "prior|jacobi|augmented|block:<k>|identity");
    s->add_option("--rtol", gb.rtol);
    s->add_option("--max-iter", gb.max_iter, "CG iteration cap; 0 means 2p");
    s->add_flag("--warm-start,!--no-warm-start", gb.warm_start);
    s->add_option("--out", gb.out, "chain CSV");
    s->add_option("--save-state", gb.state_out, "binary file for the final state");
    s->add_option("--log-every", gb.log_every, "progress line interval; 0 disables");
    actions["gibbs"] = [&]() -> std::optional<std::uint64_t> {
      cmd_gibbs(gb, *runs["gibbs"], out, err);
      return gb.seed;
    };
  }

  const auto frozen_flags = [](CLI::App* s, FrozenArgs& f) {
    s->add_option("--state", f.state, "saved Gibbs state")->required();
    s->add_option("--data", f.data, "design used to produce the state")->required();
    s->add_flag("--csv-header", f.csv_header);
    s->add_option("--preconditioner", f.preconditioner, "prior|jacobi|augmented|block:<k>|identity");
  };

  BenchArgs bench;
  {
    CLI::App* s = subcommand("cg-bench", "rerun CG on fresh right-hand sides at a frozen state");
    frozen_flags(s, bench.frozen);
    s->add_option("--outcome", bench.outcome)->required();
    s->add_option("--rtol", bench.rtol);
    s->add_option("--max-iter", bench.max_iter, "0 means 2p");
    s->add_option("--trace", bench.trace, "per-iteration trace CSV");
    s->add_option("--replicates", bench.replicates);
    s->add_option("--seed", bench.seed);
    s->add_flag("--oracle,!--no-oracle", bench.oracle, "compare iterates with a dense direct solve");
    actions["cg-bench"] = [&]() -> std::optional<std::uint64_t> {
      cmd_cg_bench(bench, *runs["cg-bench"], out);
      return bench.seed;
    };
  }

  EigArgs eig;
  {
    CLI::App* s = subcommand("eig-diag", "spectrum of the preconditioned precision at a frozen state");
    frozen_flags(s, eig.frozen);
    s->add_option("--out", eig.out, "spectrum CSV");
    s->add_option("--histogram", eig.histogram, "log10 histogram CSV; empty disables");
    s->add_option("--trim", eig.trim, "log10 range LO HI counted in the summary")->expected(2);
    actions["eig-diag"] = [&]() -> std::optional<std::uint64_t> {
      cmd_eig_diag(eig, *runs["eig-diag"], out);
      return std::nullopt;
    };
  }

  TraceArgs tr;
  {
    CLI::App* s = subcommand("trace", "sorted tau*lambda profile of a saved state");
    s->add_option("--state", tr.state)->required();
    s->add_option("--top", tr.top);
    s->add_option("--out", tr.out);
    actions["trace"] = [&]() -> std::optional<std::uint64_t> {
      cmd_trace(tr, *runs["trace"], out);
      return std::nullopt;
    };
  }

  CompareArgs cmp;
  {
    CLI::App* s = subcommand("compare-chains", "standardized posterior-mean differences between two chains");
    s->add_option("--a", cmp.a, "first chain CSV")->required();
    s->add_option("--b", cmp.b, "second chain CSV")->required();
    s->add_option("--min-ess", cmp.min_ess);
    s->add_option("--min-draws", cmp.min_draws);
    s->add_option("--level", cmp.level, "KS significance level");
    s->add_option("--out", cmp.out);
    actions["compare-chains"] = [&]() -> std::optional<std::uint64_t> {
      cmd_compare(cmp, *runs["compare-chains"], out);
      return std::nullopt;
    };
  }

  try {
    const auto expanded = expand_config(args);
    std::vector<std::string> reversed(expanded.rbegin(), expanded.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return kExitUsage;
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  Run& r = *runs[name];
  try {
    r.begin();
    const auto seed = actions[name]();
    r.write_manifest(seed);
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return classify(e);
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace pcgs::cli
