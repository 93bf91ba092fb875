#include "pcgs/gibbs.hpp"

#include <cmath>
#include <string>

#include "pcgs/errors.hpp"
#include "pcgs/parallel.hpp"
#include "pcgs/polya_gamma.hpp"
#include "pcgs/precision.hpp"
#include "pcgs/sampler.hpp"

namespace pcgs {

void BridgeConfig::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ArgumentError("bridge alpha must lie in (0, 1]");
  if (!(global_shape > 0.0) || !std::isfinite(global_shape))
    throw ArgumentError("global shape must be positive and finite");
  if (!(global_rate >= 0.0) || !std::isfinite(global_rate))
    throw ArgumentError("global rate must be finite and >= 0");
  for (double s : unshrunk_prior_sd)
    if (!(s > 0.0)) throw ArgumentError("unshrunk prior sd must be positive (inf for flat)");
}

void ShrinkageState::validate(std::size_t n, std::size_t p_total) const {
  if (beta.size() != p_total) throw ArgumentError("state: beta length does not match the design");
  if (lambda.size() > beta.size()) throw ArgumentError("state: lambda longer than beta");
  if (omega.size() != n) throw ArgumentError("state: omega length != n");
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ArgumentError("state: tau must be positive and finite");
  for (double l : lambda)
    if (!(l > 0.0) || !std::isfinite(l)) throw ArgumentError("state: lambda must be positive and finite");
  for (double w : omega)
    if (!(w > 0.0) || !std::isfinite(w)) throw ArgumentError("state: omega must be positive and finite");
  for (double b : beta)
    if (!std::isfinite(b)) throw ArgumentError("state: beta must be finite");
}

ShrinkageState initial_state(std::size_t n, std::size_t n_unshrunk, std::size_t p_shrunk) {
  ShrinkageState s;
  s.beta.assign(n_unshrunk + p_shrunk, 0.0);
  s.omega.assign(n, 0.25);
  s.lambda.assign(p_shrunk, 1.0);
  s.tau = 1.0;
  return s;
}

OmegaUpdate update_omega(const ShrinkageState& state, const SparseDesignMatrix& x,
                         std::span<const double> y, const ScanStreams& streams) {
  const std::size_t n = x.n_rows();
  if (y.size() != n) throw ArgumentError("update_omega: y length != n");
  for (double b : state.beta)
    if (!std::isfinite(b)) throw ArgumentError("update_omega: beta must be finite");
  const std::vector<double> z = matvec(x, state.beta);
  OmegaUpdate out;
  out.omega.resize(n);
  out.pseudo_outcome.resize(n);
  parallel_chunks(n, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      Rng rng = streams.stream(StreamTag::kOmega, i);
      out.omega[i] = pg_draw(z[i], rng);
      out.pseudo_outcome[i] = (y[i] - 0.5) / out.omega[i];
    }
  });
  return out;
}

double update_global_scale(std::span<const double> beta_shrunk, const BridgeConfig& cfg, Rng& rng) {
  cfg.validate();
  const double a = cfg.alpha;
  double rate = cfg.global_rate;
  for (double b : beta_shrunk) rate += std::pow(std::abs(b), a);
  if (!(rate > 0.0))
    throw ArgumentError("update_global_scale: improper conditional (zero rate with all coefficients zero)");
  const double shape = cfg.global_shape + static_cast<double>(beta_shrunk.size()) / a;
  const double phi = rng.gamma(shape, rate);
  return std::pow(phi, -1.0 / a);
}

std::vector<double> update_local_scales(std::span<const double> beta_shrunk, double tau,
                                        const BridgeConfig& cfg, const ScanStreams& streams) {
  if (cfg.alpha != 1.0)
    throw UnsupportedUpdateError(
        "no exact local-scale update for alpha != 1; supply GibbsConfig::local_scale_update");
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ArgumentError("update_local_scales: tau must be positive");
  std::vector<double> lambda(beta_shrunk.size());
  parallel_chunks(lambda.size(), [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      Rng rng = streams.stream(StreamTag::kLocalScale, j);
      const double mean = tau / std::abs(beta_shrunk[j]);
      double lambda_sq;
      if (std::isfinite(mean) && mean < 1e100) {
        lambda_sq = 1.0 / rng.inverse_gaussian(mean, 1.0);
      } else {
        lambda_sq = rng.gamma(0.5, 0.5);
      }
      lambda[j] = std::sqrt(lambda_sq);
    }
  });
  return lambda;
}

double lasso_mixing_density(double lambda_sq) { return lambda_sq < 0.0 ? 0.0 : 0.5 * std::exp(-0.5 * lambda_sq); }

double bridge_prior_density(double beta, double tau, double alpha) {
  return std::exp(-std::pow(std::abs(beta / tau), alpha)) / (2.0 * tau * std::tgamma(1.0 + 1.0 / alpha));
}

double log_density(const SparseDesignMatrix& x, std::span<const double> y, std::span<const double> beta,
                   double tau, const BridgeConfig& cfg) {
  const std::size_t q1 = cfg.unshrunk_prior_sd.size();
  if (beta.size() != x.n_cols() || beta.size() < q1) throw ArgumentError("log_density: beta length mismatch");
  const std::vector<double> z = matvec(x, beta);
  double ll = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    // y z − log(1 + e^z), stable for large |z|.
    const double zi = z[i];
    ll += y[i] * zi - (zi > 0.0 ? zi + std::log1p(std::exp(-zi)) : std::log1p(std::exp(zi)));
  }
  const double a = cfg.alpha;
  const double log_tau = std::log(tau);
  const double log_norm = std::log(2.0) + std::lgamma(1.0 + 1.0 / a);
  for (std::size_t j = q1; j < beta.size(); ++j)
    ll += -log_tau - std::pow(std::abs(beta[j] / tau), a) - log_norm;
  // Gamma prior on φ = τ^{−α} plus the Jacobian |dφ/dτ| = α τ^{−α−1}.
  const double phi = std::pow(tau, -a);
  const double a0 = cfg.global_shape, b0 = cfg.global_rate;
  ll += (a0 - 1.0) * std::log(phi) - b0 * phi + std::log(a) - (a + 1.0) * log_tau;
  if (b0 > 0.0) ll += a0 * std::log(b0) - std::lgamma(a0);
  for (std::size_t j = 0; j < q1; ++j) {
    const double s = cfg.unshrunk_prior_sd[j];
    if (std::isinf(s)) continue;
    ll += -0.5 * (beta[j] / s) * (beta[j] / s) - std::log(s) - 0.5 * std::log(2.0 * 3.141592653589793);
  }
  return ll;
}

void GibbsConfig::validate() const {
  bridge.validate();
  if (thin == 0) throw ArgumentError("thin must be >= 1");
  if (burn_in > n_iter) throw ArgumentError("burn-in exceeds the number of iterations");
  if (!local_scale_update && bridge.alpha != 1.0)
    throw UnsupportedUpdateError("no exact local-scale update for alpha != 1; supply a local_scale_update");
}

std::vector<double> outcome_linear_term(const SparseDesignMatrix& x, std::span<const double> y) {
  if (y.size() != x.n_rows()) throw ArgumentError("outcome_linear_term: y length != n");
  std::vector<double> centred(y.begin(), y.end());
  for (double& v : centred) v -= 0.5;
  return matvec_t(x, centred);
}

BetaConditional beta_conditional(const SparseDesignMatrix& x, std::span<const double> linear_term,
                                 const ShrinkageState& state, std::span<const double> unshrunk_prior_sd,
                                 std::span<const double> gamma) {
  const std::size_t q1 = unshrunk_prior_sd.size();
  if (gamma.size() != q1) throw ArgumentError("beta_conditional: gamma length != unshrunk count");
  if (x.n_cols() != q1 + state.lambda.size()) throw ArgumentError("beta_conditional: design width mismatch");
  std::vector<double> shrunk_scale(state.lambda.size());
  for (std::size_t j = 0; j < shrunk_scale.size(); ++j) {
    shrunk_scale[j] = state.tau * state.lambda[j];
    if (!(shrunk_scale[j] > 0.0) || !std::isfinite(shrunk_scale[j]))
      throw NumericBreakdownError("prior scale tau*lambda is not positive and finite", 0);
  }
  BetaConditional out{GaussianTarget{PrecisionOperator(x, state.omega,
                                                       prior_precision_diagonal(state.tau, state.lambda,
                                                                                unshrunk_prior_sd)),
                                     std::vector<double>(linear_term.begin(), linear_term.end())},
                      shrunk_scale};
  std::vector<double> residual_scale(gamma.begin(), gamma.end());
  residual_scale.insert(residual_scale.end(), shrunk_scale.begin(), shrunk_scale.end());
  out.target.precision.set_residual_scale(std::move(residual_scale));
  return out;
}

ChainOutput gibbs_run(const SparseDesignMatrix& x, std::span<const double> y, const GibbsConfig& cfg,
                      ShrinkageState& state) {
  cfg.validate();
  const std::size_t n = x.n_rows();
  const std::size_t q1 = cfg.bridge.unshrunk_prior_sd.size();
  if (x.n_cols() < q1) throw ArgumentError("gibbs_run: fewer columns than unshrunk coefficients");
  const std::size_t p = x.n_cols() - q1;
  if (y.size() != n) throw ArgumentError("gibbs_run: y length != n");
  for (double v : y)
    if (v != 0.0 && v != 1.0) throw ArgumentError("gibbs_run: outcomes must be 0 or 1");
  state.validate(n, x.n_cols());
  if (state.lambda.size() != p) throw ArgumentError("gibbs_run: lambda length != shrunk coefficient count");
  if (cfg.fixed_omega && cfg.fixed_omega->size() != n) throw ArgumentError("gibbs_run: fixed omega length != n");

  ChainOutput chain;
  chain.seed = cfg.seed;
  chain.n_unshrunk = q1;
  chain.unshrunk_prior_sd = cfg.bridge.unshrunk_prior_sd;

  // XᵀΩy′ = Xᵀ(y − 1/2) does not depend on ω.
  const std::vector<double> linear_term = outcome_linear_term(x, y);
  const LocalScaleUpdate local = cfg.local_scale_update ? cfg.local_scale_update : LocalScaleUpdate(update_local_scales);

  for (std::size_t it = 0; it < cfg.n_iter; ++it) {
    const ScanStreams streams{cfg.seed, it};
    try {
      if (cfg.fixed_omega) {
        state.omega = *cfg.fixed_omega;
      } else {
        state.omega = update_omega(state, x, y, streams).omega;
      }
      if (!cfg.freeze_scales) {
        Rng tau_rng = streams.stream(StreamTag::kScan, 0);
        state.tau = update_global_scale(state.shrunk_beta(), cfg.bridge, tau_rng);
        state.lambda = local(state.shrunk_beta(), state.tau, cfg.bridge, streams);
      }

      const std::vector<double> gamma = gamma_policy(chain, cfg.gamma);
      BetaConditional cond = beta_conditional(x, linear_term, state, cfg.bridge.unshrunk_prior_sd, gamma);
      GaussianTarget& target = cond.target;
      const std::vector<double>& shrunk_scale = cond.shrunk_scale;
      Rng beta_rng = streams.stream(StreamTag::kScan, 1);
      if (cfg.sampler == BetaSampler::kDirect) {
        state.beta = direct_sample(target, beta_rng);
        chain.cg_iterations.push_back(0);
      } else {
        const Preconditioner m = make_preconditioner(cfg.preconditioner, target.precision, gamma, shrunk_scale);
        std::vector<double> x0;
        if (cfg.warm_start) x0 = initial_vector(chain, state.tau, state.lambda);
        CGSample draw = cg_sample(target, m, x0, cfg.cg, beta_rng);
        state.beta = std::move(draw.beta);
        chain.cg_iterations.push_back(draw.report.iterations);
      }
      chain.record_update(state.beta, shrunk_scale);
      for (double w : state.omega)
        if (!(w > 0.0)) throw NumericBreakdownError("omega lost positivity", it);
    } catch (const GibbsError&) {
      throw;
    } catch (const std::exception& e) {
      throw GibbsError("Gibbs scan failed at iteration " + std::to_string(it) + ": " + e.what(), it);
    }

    chain.logdensity_trace.push_back(log_density(x, y, state.beta, state.tau, cfg.bridge));
    if (it >= cfg.burn_in && (it - cfg.burn_in) % cfg.thin == 0) {
      chain.draws.push_back(state.beta);
      chain.tau_draws.push_back(state.tau);
      chain.draw_logdensity.push_back(chain.logdensity_trace.back());
    }
    chain.iterations_run = it + 1;
    if (cfg.on_iteration) cfg.on_iteration(it, state);
  }
  return chain;
}

}  // namespace pcgs
