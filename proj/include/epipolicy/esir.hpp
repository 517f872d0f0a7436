#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <future>
#include <sstream>
#include <string>
#include <vector>

#include "epipolicy/csv.hpp"
#include "epipolicy/dates.hpp"
#include "epipolicy/distributions.hpp"
#include "epipolicy/errors.hpp"
#include "epipolicy/rng.hpp"
#include "epipolicy/sir.hpp"
#include "epipolicy/stats.hpp"
#include "epipolicy/timeseries.hpp"

namespace epipolicy {

inline constexpr int kTrainingWindowDays = 30;
inline constexpr int kPredictionHorizonDays = 31;

struct LognormalPrior {
    double meanlog = 0.0;
    double sdlog = 1.0;
};

struct GammaPrior {
    double shape = 1.0;
    double rate = 1.0;
};

// Bayesian state-space SIR model:
//   theta_t | theta_{t-1} ~ Dirichlet(kappa * f(theta_{t-1}, beta, gamma))
//   Y_t^I ~ Beta(lambda_i * theta_t^I, lambda_i * (1 - theta_t^I))
//   Y_t^R ~ Beta(lambda_r * theta_t^R, lambda_r * (1 - theta_t^R))
// with f the daily RK4 advance of the SIR equations. Priors are lognormal
// on the reproduction number R0 = beta/gamma and on gamma, gamma priors on
// the Dirichlet concentration and Beta precisions.
struct EsirModelSpec {
    LognormalPrior prior_r0{std::log(3.28), 0.5};
    LognormalPrior prior_gamma{std::log(0.12), 0.4};
    GammaPrior prior_kappa{2.0, 1e-4};
    GammaPrior prior_lambda_i{2.0, 1e-4};
    GammaPrior prior_lambda_r{2.0, 1e-4};
    int chains = 4;
    int iterations = 20000;  // total per chain, including burn-in
    int burn_in = 10000;
    int thin = 10;
    std::uint64_t seed = 0;
    double credible_level = 0.95;
    bool observe_removed = true;          // fit the Y^R observation term
    double initial_proposal_scale = 0.1;  // random-walk scale before adaptation
    bool adapt_proposals = true;

    void validate() const {
        if (chains < 1) throw ConfigError("model spec: chains must be >= 1");
        if (iterations < 1) throw ConfigError("model spec: iterations must be >= 1");
        if (burn_in < 0 || burn_in >= iterations) {
            throw ConfigError("model spec: burn_in must lie in [0, iterations)");
        }
        if (thin < 1) throw ConfigError("model spec: thin must be >= 1");
        if (!(credible_level > 0.0 && credible_level < 1.0)) {
            throw ConfigError("model spec: credible_level must lie in (0,1)");
        }
        if (initial_proposal_scale < 0.0) {
            throw ConfigError("model spec: proposal scale must be nonnegative");
        }
        if (!(prior_r0.sdlog > 0.0) || !(prior_gamma.sdlog > 0.0)) {
            throw ConfigError("model spec: prior sdlog must be positive");
        }
        for (const GammaPrior* g : {&prior_kappa, &prior_lambda_i, &prior_lambda_r}) {
            if (!(g->shape > 0.0) || !(g->rate > 0.0)) {
                throw ConfigError("model spec: gamma prior parameters must be positive");
            }
        }
    }
};

struct ParamDraw {
    double beta = 0.0;
    double gamma = 0.0;
    double kappa = 0.0;
    double lambda_i = 0.0;
    double lambda_r = 0.0;
    std::vector<Theta> latent;  // one state per training day
    int chain_id = 0;
    int iteration = 0;
};

struct PosteriorDraws {
    std::vector<ParamDraw> draws;  // ordered by chain_id, then iteration
    std::uint64_t seed = 0;
    std::vector<Date> training_dates;
    Theta anchor;  // nudged first observed state; transitions start from f(anchor)
    std::vector<std::string> warnings;
    std::vector<double> chain_accept_params;  // post-adaptation rates per chain
    std::vector<double> chain_accept_latent;
    double ess_beta = 0.0;
    double ess_gamma = 0.0;
};

struct PredictiveSummary {
    std::vector<Date> dates;
    std::vector<double> median_i;
    std::vector<double> lower_i;
    std::vector<double> upper_i;
    int draws_used = 0;
};

enum class PredictMode {
    sample,           // theta_{t+1} ~ Dirichlet(kappa * f(theta_t))
    deterministic,    // theta_{t+1} = f(theta_t): the kappa -> infinity surrogate
};

namespace esir_detail {

constexpr double kNudge = 1e-10;

inline double nudge(double y) { return std::min(1.0 - kNudge, std::max(kNudge, y)); }

inline Theta nudge_theta(const Theta& th) {
    Theta out{nudge(th.s), nudge(th.i), nudge(th.r)};
    const double total = out.s + out.i + out.r;
    out.s /= total;
    out.i /= total;
    out.r /= total;
    return out;
}

struct Observation {
    double y_i;
    double y_r;
};

inline std::vector<Observation> extract_observations(const CompartmentSeries& observed) {
    std::vector<Observation> obs;
    obs.reserve(observed.rows.size());
    for (const auto& row : observed.rows) {
        obs.push_back({row.i, row.r});
    }
    return obs;
}

inline void require_open_interval(const std::vector<Observation>& obs) {
    for (std::size_t t = 0; t < obs.size(); ++t) {
        if (!(obs[t].y_i > 0.0 && obs[t].y_i < 1.0 && obs[t].y_r > 0.0 && obs[t].y_r < 1.0)) {
            throw DomainError("observed proportion at exact 0/1 on day " + std::to_string(t) +
                              "; nudge observations into (0,1) first");
        }
    }
}

inline double log_transition(const Theta& current, const Theta& previous_mean, double kappa) {
    const std::array<double, 3> alpha = {kappa * previous_mean.s, kappa * previous_mean.i,
                                         kappa * previous_mean.r};
    return log_dirichlet_pdf(current.as_array(), alpha);
}

inline double log_observation(const Observation& y, const Theta& th, double lambda_i,
                              double lambda_r, bool observe_removed) {
    double value = log_beta_pdf(y.y_i, lambda_i * th.i, lambda_i * (1.0 - th.i));
    if (observe_removed) {
        value += log_beta_pdf(y.y_r, lambda_r * th.r, lambda_r * (1.0 - th.r));
    }
    return value;
}

// Additive log-ratio coordinates for a simplex state, used for symmetric
// random-walk proposals on latent sites.
inline std::array<double, 2> to_alr(const Theta& th) {
    return {std::log(th.s / th.r), std::log(th.i / th.r)};
}

inline Theta from_alr(const std::array<double, 2>& u) {
    const double m = std::max({u[0], u[1], 0.0});
    const double es = std::exp(u[0] - m);
    const double ei = std::exp(u[1] - m);
    const double er = std::exp(-m);
    const double denom = es + ei + er;
    return Theta{es / denom, ei / denom, er / denom};
}

inline double log_alr_jacobian(const Theta& th) {
    return std::log(th.s) + std::log(th.i) + std::log(th.r);
}

}  // namespace esir_detail

// Log posterior density of (parameters, latent chain) given the observed
// series, in the natural parameterization: log prior + log transition
// densities + log observation densities. The latent chain must have one
// state per observed row; the chain is anchored at the first observed
// state, so the first transition mean is f(observed row 0).
inline double log_posterior(const ParamDraw& state, const CompartmentSeries& observed,
                            const EsirModelSpec& spec) {
    const std::size_t horizon = observed.rows.size();
    if (state.latent.size() != horizon) {
        throw DomainError("log_posterior: latent chain length must equal observation count");
    }
    if (horizon == 0) throw EmptyInputError("log_posterior: no observations");
    if (!(state.beta > 0.0 && state.gamma > 0.0 && state.kappa > 0.0 && state.lambda_i > 0.0 &&
          state.lambda_r > 0.0)) {
        throw DomainError("log_posterior: parameters must be strictly positive");
    }
    const auto obs = esir_detail::extract_observations(observed);
    esir_detail::require_open_interval(obs);

    // Prior on (beta, gamma) through (R0, gamma): the change of variables
    // contributes 1/gamma.
    const double r0 = state.beta / state.gamma;
    double value = log_lognormal_pdf(r0, spec.prior_r0.meanlog, spec.prior_r0.sdlog) +
                   log_lognormal_pdf(state.gamma, spec.prior_gamma.meanlog, spec.prior_gamma.sdlog) -
                   std::log(state.gamma);
    value += log_gamma_pdf(state.kappa, spec.prior_kappa.shape, spec.prior_kappa.rate);
    value += log_gamma_pdf(state.lambda_i, spec.prior_lambda_i.shape, spec.prior_lambda_i.rate);
    value += log_gamma_pdf(state.lambda_r, spec.prior_lambda_r.shape, spec.prior_lambda_r.rate);

    const SirParams params{state.beta, state.gamma};
    const Theta anchor{1.0 - obs[0].y_i - obs[0].y_r, obs[0].y_i, obs[0].y_r};
    Theta previous = anchor;
    for (std::size_t t = 0; t < horizon; ++t) {
        const Theta mean = rk4_step(previous, params, 1.0);
        value += esir_detail::log_transition(state.latent[t], mean, state.kappa);
        value += esir_detail::log_observation(obs[t], state.latent[t], state.lambda_i,
                                              state.lambda_r, spec.observe_removed);
        previous = state.latent[t];
    }
    return value;
}

namespace esir_detail {

struct ChainResult {
    std::vector<ParamDraw> draws;
    double accept_params = 0.0;
    double accept_latent = 0.0;
};

// One random-walk Metropolis-within-Gibbs chain. Parameters move on the
// log scale (log R0, log gamma, log kappa, log lambda_i, log lambda_r) and
// latent sites in ALR coordinates, so all proposals are symmetric and the
// target carries the matching change-of-variable terms. Proposal scales
// adapt toward 30% acceptance during burn-in only, preserving detailed
// balance for the retained draws.
class ChainSampler {
  public:
    ChainSampler(const std::vector<Observation>& obs, const Theta& anchor,
                 const EsirModelSpec& spec, int chain_id)
        : obs_(obs), anchor_(anchor), spec_(spec), chain_id_(chain_id),
          rng_(Rng::derive_stream(spec.seed, static_cast<std::uint64_t>(chain_id))) {}

    ChainResult run() {
        initialize();
        const int days = static_cast<int>(obs_.size());
        param_scales_.assign(5, spec_.initial_proposal_scale);
        latent_scales_.assign(obs_.size(), spec_.initial_proposal_scale);
        param_accepts_.assign(5, 0);
        param_attempts_.assign(5, 0);
        latent_accepts_.assign(obs_.size(), 0);
        latent_attempts_.assign(obs_.size(), 0);
        std::int64_t post_param_acc = 0, post_param_att = 0;
        std::int64_t post_latent_acc = 0, post_latent_att = 0;

        ChainResult result;
        const int retained = (spec_.iterations - spec_.burn_in + spec_.thin - 1) / spec_.thin;
        result.draws.reserve(static_cast<std::size_t>(std::max(retained, 0)));

        for (int iter = 0; iter < spec_.iterations; ++iter) {
            const bool adapting = spec_.adapt_proposals && iter < spec_.burn_in;
            for (int k = 0; k < 5; ++k) {
                const bool accepted = update_param(k);
                ++param_attempts_[static_cast<std::size_t>(k)];
                if (accepted) ++param_accepts_[static_cast<std::size_t>(k)];
                if (!adapting) {
                    ++post_param_att;
                    if (accepted) ++post_param_acc;
                }
            }
            for (int t = 0; t < days; ++t) {
                const bool accepted = update_latent(static_cast<std::size_t>(t));
                ++latent_attempts_[static_cast<std::size_t>(t)];
                if (accepted) ++latent_accepts_[static_cast<std::size_t>(t)];
                if (!adapting) {
                    ++post_latent_att;
                    if (accepted) ++post_latent_acc;
                }
            }
            if (adapting && (iter + 1) % kAdaptBatch == 0) adapt();
            if ((iter + 1) % 500 == 0) refresh_sums();
            if (iter >= spec_.burn_in && (iter - spec_.burn_in) % spec_.thin == 0) {
                result.draws.push_back(snapshot(iter));
            }
        }
        result.accept_params =
            post_param_att > 0 ? static_cast<double>(post_param_acc) / post_param_att : 0.0;
        result.accept_latent =
            post_latent_att > 0 ? static_cast<double>(post_latent_acc) / post_latent_att : 0.0;
        return result;
    }

    // Deterministic starting point: prior-median rates, prior-mean
    // concentrations, latent path from the deterministic SIR skeleton.
    void initialize() {
        x_[0] = spec_.prior_r0.meanlog;     // log R0
        x_[1] = spec_.prior_gamma.meanlog;  // log gamma
        x_[2] = std::log(spec_.prior_kappa.shape / spec_.prior_kappa.rate);
        x_[3] = std::log(spec_.prior_lambda_i.shape / spec_.prior_lambda_i.rate);
        x_[4] = std::log(spec_.prior_lambda_r.shape / spec_.prior_lambda_r.rate);

        const SirParams params = current_params();
        latent_.clear();
        Theta state = anchor_;
        f_cache_.clear();
        for (std::size_t t = 0; t < obs_.size(); ++t) {
            state = rk4_step(state, params, 1.0);
            f_cache_.push_back(state);  // transition mean for site t
            latent_.push_back(state);
        }
        refresh_sums();
        const double total = log_prior_x() + trans_sum_ + obs_i_sum_ + obs_r_sum_ + jac_sum_;
        if (!std::isfinite(total)) {
            throw InitializationError("fit: log posterior not finite at initialization");
        }
    }

  private:
    static constexpr int kAdaptBatch = 50;

    SirParams current_params() const {
        const double gamma = std::exp(x_[1]);
        return SirParams{std::exp(x_[0]) * gamma, gamma};
    }

    double kappa() const { return std::exp(x_[2]); }
    double lambda_i() const { return std::exp(x_[3]); }
    double lambda_r() const { return std::exp(x_[4]); }

    // Prior density in the sampling coordinates: normal on log R0 and
    // log gamma, gamma priors on kappa/lambda with the e^x Jacobian.
    double log_prior_x() const {
        double value = log_normal_pdf(x_[0], spec_.prior_r0.meanlog, spec_.prior_r0.sdlog);
        value += log_normal_pdf(x_[1], spec_.prior_gamma.meanlog, spec_.prior_gamma.sdlog);
        value += log_gamma_pdf(kappa(), spec_.prior_kappa.shape, spec_.prior_kappa.rate) + x_[2];
        value += log_gamma_pdf(lambda_i(), spec_.prior_lambda_i.shape, spec_.prior_lambda_i.rate) +
                 x_[3];
        value += log_gamma_pdf(lambda_r(), spec_.prior_lambda_r.shape, spec_.prior_lambda_r.rate) +
                 x_[4];
        return value;
    }

    double transition_sum(const SirParams& params, double kap,
                          std::vector<Theta>* cache_out) const {
        double total = 0.0;
        Theta previous = anchor_;
        for (std::size_t t = 0; t < latent_.size(); ++t) {
            const Theta mean = rk4_step(previous, params, 1.0);
            if (cache_out) (*cache_out)[t] = mean;
            total += log_transition(latent_[t], mean, kap);
            previous = latent_[t];
        }
        return total;
    }

    double observation_sum_i(double lam) const {
        double total = 0.0;
        for (std::size_t t = 0; t < latent_.size(); ++t) {
            total += log_beta_pdf(obs_[t].y_i, lam * latent_[t].i, lam * (1.0 - latent_[t].i));
        }
        return total;
    }

    double observation_sum_r(double lam) const {
        if (!spec_.observe_removed) return 0.0;
        double total = 0.0;
        for (std::size_t t = 0; t < latent_.size(); ++t) {
            total += log_beta_pdf(obs_[t].y_r, lam * latent_[t].r, lam * (1.0 - latent_[t].r));
        }
        return total;
    }

    void refresh_sums() {
        scratch_cache_.resize(latent_.size());
        trans_sum_ = transition_sum(current_params(), kappa(), &scratch_cache_);
        f_cache_ = scratch_cache_;
        obs_i_sum_ = observation_sum_i(lambda_i());
        obs_r_sum_ = observation_sum_r(lambda_r());
        jac_sum_ = 0.0;
        for (const Theta& th : latent_) jac_sum_ += log_alr_jacobian(th);
    }

    bool update_param(int k) {
        const double scale = param_scales_[static_cast<std::size_t>(k)];
        const double step = scale * rng_.normal();
        const double old_x = x_[static_cast<std::size_t>(k)];
        const double old_prior = log_prior_x();
        x_[static_cast<std::size_t>(k)] = old_x + step;

        double new_prior = 0.0;
        double new_trans = trans_sum_, new_obs_i = obs_i_sum_, new_obs_r = obs_r_sum_;
        bool cache_valid = false;
        try {
            new_prior = log_prior_x();
            if (k == 0 || k == 1) {
                new_trans = transition_sum(current_params(), kappa(), &scratch_cache_);
                cache_valid = true;
            } else if (k == 2) {
                new_trans = transition_sum(current_params(), kappa(), nullptr);
            } else if (k == 3) {
                new_obs_i = observation_sum_i(lambda_i());
            } else {
                new_obs_r = observation_sum_r(lambda_r());
            }
        } catch (const DomainError&) {
            x_[static_cast<std::size_t>(k)] = old_x;  // proposal left the support
            return false;
        }
        const double delta = (new_prior - old_prior) + (new_trans - trans_sum_) +
                             (new_obs_i - obs_i_sum_) + (new_obs_r - obs_r_sum_);
        if (accept(delta)) {
            trans_sum_ = new_trans;
            obs_i_sum_ = new_obs_i;
            obs_r_sum_ = new_obs_r;
            if (cache_valid) f_cache_.swap(scratch_cache_);
            return true;
        }
        x_[static_cast<std::size_t>(k)] = old_x;
        return false;
    }

    bool update_latent(std::size_t t) {
        const double scale = latent_scales_[t];
        if (scale == 0.0) return true;  // identity proposal, accepted by construction
        auto u = to_alr(latent_[t]);
        u[0] += scale * rng_.normal();
        u[1] += scale * rng_.normal();
        const Theta proposed = from_alr(u);
        const Theta current = latent_[t];
        const double kap = kappa();
        const double lam_i = lambda_i();
        const double lam_r = lambda_r();
        const bool has_next = t + 1 < latent_.size();

        double trans_t_new, trans_next_new = 0.0, trans_next_old = 0.0;
        double obs_i_new, obs_r_new = 0.0, obs_r_old = 0.0;
        Theta new_next_mean;
        try {
            trans_t_new = log_transition(proposed, f_cache_[t], kap);
            if (has_next) {
                new_next_mean = rk4_step(proposed, current_params(), 1.0);
                trans_next_new = log_transition(latent_[t + 1], new_next_mean, kap);
                trans_next_old = log_transition(latent_[t + 1], f_cache_[t + 1], kap);
            }
            obs_i_new = log_beta_pdf(obs_[t].y_i, lam_i * proposed.i, lam_i * (1.0 - proposed.i));
            if (spec_.observe_removed) {
                obs_r_new =
                    log_beta_pdf(obs_[t].y_r, lam_r * proposed.r, lam_r * (1.0 - proposed.r));
                obs_r_old = log_beta_pdf(obs_[t].y_r, lam_r * current.r, lam_r * (1.0 - current.r));
            }
        } catch (const DomainError&) {
            return false;  // proposal hit the simplex boundary
        }
        const double trans_t_old = log_transition(current, f_cache_[t], kap);
        const double obs_i_old =
            log_beta_pdf(obs_[t].y_i, lam_i * current.i, lam_i * (1.0 - current.i));
        const double jac_new = log_alr_jacobian(proposed);
        const double jac_old = log_alr_jacobian(current);

        const double delta = (trans_t_new - trans_t_old) + (trans_next_new - trans_next_old) +
                             (obs_i_new - obs_i_old) + (obs_r_new - obs_r_old) +
                             (jac_new - jac_old);
        if (!accept(delta)) return false;

        trans_sum_ += (trans_t_new - trans_t_old) + (trans_next_new - trans_next_old);
        obs_i_sum_ += obs_i_new - obs_i_old;
        obs_r_sum_ += obs_r_new - obs_r_old;
        jac_sum_ += jac_new - jac_old;
        latent_[t] = proposed;
        if (has_next) f_cache_[t + 1] = new_next_mean;
        return true;
    }

    bool accept(double log_ratio) {
        if (!std::isfinite(log_ratio)) return false;
        if (log_ratio >= 0.0) return true;
        return std::log(rng_.uniform()) < log_ratio;
    }

    void adapt() {
        ++adapt_batches_;
        const double step = 1.0 / std::sqrt(static_cast<double>(adapt_batches_));
        for (std::size_t k = 0; k < param_scales_.size(); ++k) {
            if (param_attempts_[k] == 0) continue;
            const double rate =
                static_cast<double>(param_accepts_[k]) / static_cast<double>(param_attempts_[k]);
            param_scales_[k] *= std::exp(step * (rate - kTargetAcceptance));
            param_accepts_[k] = 0;
            param_attempts_[k] = 0;
        }
        for (std::size_t t = 0; t < latent_scales_.size(); ++t) {
            if (latent_attempts_[t] == 0) continue;
            const double rate =
                static_cast<double>(latent_accepts_[t]) / static_cast<double>(latent_attempts_[t]);
            latent_scales_[t] *= std::exp(step * (rate - kTargetAcceptance));
            latent_accepts_[t] = 0;
            latent_attempts_[t] = 0;
        }
    }

    ParamDraw snapshot(int iter) const {
        ParamDraw draw;
        const SirParams params = current_params();
        draw.beta = params.beta;
        draw.gamma = params.gamma;
        draw.kappa = kappa();
        draw.lambda_i = lambda_i();
        draw.lambda_r = lambda_r();
        draw.latent = latent_;
        draw.chain_id = chain_id_;
        draw.iteration = iter;
        return draw;
    }

    static constexpr double kTargetAcceptance = 0.3;

    const std::vector<Observation>& obs_;
    Theta anchor_;
    const EsirModelSpec& spec_;
    int chain_id_;
    Rng rng_;

    std::array<double, 5> x_{};  // log R0, log gamma, log kappa, log lambda_i, log lambda_r
    std::vector<Theta> latent_;
    std::vector<Theta> f_cache_;  // f_cache_[t] = transition mean for site t
    std::vector<Theta> scratch_cache_;
    double trans_sum_ = 0.0;
    double obs_i_sum_ = 0.0;
    double obs_r_sum_ = 0.0;
    double jac_sum_ = 0.0;

    std::vector<double> param_scales_;
    std::vector<double> latent_scales_;
    std::vector<std::int64_t> param_accepts_, param_attempts_;
    std::vector<std::int64_t> latent_accepts_, latent_attempts_;
    int adapt_batches_ = 0;
};

}  // namespace esir_detail

// Fits the state-space model by random-walk Metropolis-within-Gibbs.
// Chains are independent streams derived from (seed, chain_id) and may run
// in parallel; the merged output is ordered by chain_id then iteration, so
// parallel and serial execution produce identical results.
inline PosteriorDraws fit(const CompartmentSeries& observed, const EsirModelSpec& spec) {
    spec.validate();
    if (observed.rows.size() < 3) {
        throw InsufficientDataError("fit: need at least 3 observed days");
    }
    for (std::size_t k = 1; k < observed.rows.size(); ++k) {
        if (observed.rows[k].date - observed.rows[k - 1].date != 1) {
            throw CoverageError("fit: training window has a date gap at " +
                                observed.rows[k].date.to_string());
        }
    }

    auto obs = esir_detail::extract_observations(observed);
    for (auto& o : obs) {
        o.y_i = esir_detail::nudge(o.y_i);
        o.y_r = esir_detail::nudge(o.y_r);
    }
    const Theta anchor = esir_detail::nudge_theta(
        Theta{1.0 - obs[0].y_i - obs[0].y_r, obs[0].y_i, obs[0].y_r});

    std::vector<std::future<esir_detail::ChainResult>> futures;
    futures.reserve(static_cast<std::size_t>(spec.chains));
    for (int c = 0; c < spec.chains; ++c) {
        futures.push_back(std::async(std::launch::async, [&, c]() {
            esir_detail::ChainSampler sampler(obs, anchor, spec, c);
            return sampler.run();
        }));
    }

    PosteriorDraws out;
    out.seed = spec.seed;
    out.anchor = anchor;
    for (const auto& row : observed.rows) out.training_dates.push_back(row.date);
    for (int c = 0; c < spec.chains; ++c) {
        esir_detail::ChainResult chain = futures[static_cast<std::size_t>(c)].get();
        out.chain_accept_params.push_back(chain.accept_params);
        out.chain_accept_latent.push_back(chain.accept_latent);
        for (auto& draw : chain.draws) out.draws.push_back(std::move(draw));
        auto check = [&](double rate, const char* what) {
            if (rate < 0.05 || rate > 0.95) {
                std::ostringstream msg;
                msg << "chain " << c << ": " << what << " acceptance rate " << rate
                    << " outside [0.05, 0.95] after adaptation";
                out.warnings.push_back(msg.str());
            }
        };
        check(chain.accept_params, "parameter");
        check(chain.accept_latent, "latent");
    }

    std::vector<std::vector<double>> beta_chains(static_cast<std::size_t>(spec.chains));
    std::vector<std::vector<double>> gamma_chains(static_cast<std::size_t>(spec.chains));
    for (const auto& draw : out.draws) {
        beta_chains[static_cast<std::size_t>(draw.chain_id)].push_back(draw.beta);
        gamma_chains[static_cast<std::size_t>(draw.chain_id)].push_back(draw.gamma);
    }
    out.ess_beta = effective_sample_size(beta_chains);
    out.ess_gamma = effective_sample_size(gamma_chains);
    return out;
}

// Posterior-predictive infection-proportion band. Every retained draw is
// rolled `horizon` days past the training window with its own parameters;
// per-day median and equal-tailed interval at spec.credible_level are taken
// across draws. Each draw owns a private RNG stream derived from
// (seed, draw index), so results are independent of processing order.
inline PredictiveSummary predict(const PosteriorDraws& draws, int horizon,
                                 const EsirModelSpec& spec,
                                 PredictMode mode = PredictMode::sample) {
    if (horizon < 1) throw DomainError("predict: horizon must be >= 1");
    if (draws.draws.empty()) throw EmptyInputError("predict: no posterior draws");
    if (draws.training_dates.empty()) throw EmptyInputError("predict: draws carry no dates");

    constexpr std::uint64_t kPredictStreamBase = 1ull << 32;
    const std::size_t n_draws = draws.draws.size();
    std::vector<std::vector<double>> paths(static_cast<std::size_t>(horizon),
                                           std::vector<double>(n_draws));
    for (std::size_t d = 0; d < n_draws; ++d) {
        const ParamDraw& draw = draws.draws[d];
        Rng rng(Rng::derive_stream(draws.seed, kPredictStreamBase + d));
        const SirParams params{draw.beta, draw.gamma};
        Theta state = draw.latent.back();
        for (int h = 0; h < horizon; ++h) {
            const Theta mean = rk4_step(state, params, 1.0);
            if (mode == PredictMode::sample) {
                const auto next = rng.dirichlet(
                    {draw.kappa * mean.s, draw.kappa * mean.i, draw.kappa * mean.r});
                state = Theta{next[0], next[1], next[2]};
            } else {
                state = mean;
            }
            paths[static_cast<std::size_t>(h)][d] = state.i;
        }
    }

    PredictiveSummary summary;
    summary.draws_used = static_cast<int>(n_draws);
    const double tail = 0.5 * (1.0 - spec.credible_level);
    const Date last_training = draws.training_dates.back();
    for (int h = 0; h < horizon; ++h) {
        summary.dates.push_back(last_training + (h + 1));
        auto& day = paths[static_cast<std::size_t>(h)];
        summary.median_i.push_back(median(day));
        summary.lower_i.push_back(quantile_type7(day, tail));
        summary.upper_i.push_back(quantile_type7(day, 1.0 - tail));
    }
    return summary;
}

struct CoverageReport {
    int days = 0;
    int covered = 0;
    double fraction = 0.0;
    std::vector<bool> inside;
};

struct ValidationResult {
    PredictiveSummary summary;
    CoverageReport coverage;
};

// Model-efficiency check: fit on the 30 days before `anchor` (a day with no
// policy interference), predict the next 31 days, and report how much of
// the actual infection curve falls inside the credible band.
inline ValidationResult validate_no_policy(const CompartmentSeries& series, Date anchor,
                                           const EsirModelSpec& spec) {
    const CompartmentSeries training = window(series, anchor - kTrainingWindowDays,
                                              kTrainingWindowDays);
    const CompartmentSeries actual = window(series, anchor, kPredictionHorizonDays);

    const PosteriorDraws draws = fit(training, spec);
    ValidationResult result;
    result.summary = predict(draws, kPredictionHorizonDays, spec);
    result.coverage.days = kPredictionHorizonDays;
    for (int k = 0; k < kPredictionHorizonDays; ++k) {
        const double actual_i = actual.rows[static_cast<std::size_t>(k)].i;
        const bool inside = actual_i >= result.summary.lower_i[static_cast<std::size_t>(k)] &&
                            actual_i <= result.summary.upper_i[static_cast<std::size_t>(k)];
        result.coverage.inside.push_back(inside);
        if (inside) ++result.coverage.covered;
    }
    result.coverage.fraction =
        static_cast<double>(result.coverage.covered) / static_cast<double>(result.coverage.days);
    return result;
}

// Draw table for external diagnostics.
inline std::string draws_to_csv(const PosteriorDraws& draws) {
    std::ostringstream out;
    out << "chain,iter,beta,gamma,kappa,lambda_i,lambda_r\n";
    for (const auto& d : draws.draws) {
        out << d.chain_id << ',' << d.iteration << ',' << format_double(d.beta) << ','
            << format_double(d.gamma) << ',' << format_double(d.kappa) << ','
            << format_double(d.lambda_i) << ',' << format_double(d.lambda_r) << '\n';
    }
    return out.str();
}

}  // namespace epipolicy
