#pragma once

#include "amortize/diff/tensor.hpp"
#include "amortize/nets/posterior.hpp"
#include "amortize/random.hpp"
#include "amortize/sim/model.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace amortize::diag {

/// Posterior sampler under test: encoded dataset -> draws.
using Sampler = std::function<nets::PosteriorDraws(const diff::Tensor& data, std::size_t n_draws, Rng& rng)>;

/// Point estimator for recovery studies. Also receives the ground truth.
using Estimator =
    std::function<std::vector<double>(const diff::Tensor& data, std::span<const double> truth, Rng& rng)>;

struct SbcConfig {
    std::size_t replications = 1000;  // M
    std::size_t n = 200;              // observations per simulated dataset
    std::size_t draws = 99;           // L
    std::size_t bins = 20;
    double significance = 0.01;
    std::size_t threads = 1;
};

struct SbcResult {
    std::vector<std::string> names;
    std::size_t replications = 0;
    std::size_t draws = 0;
    std::size_t bins = 0;
    std::vector<std::vector<std::size_t>> ranks;   // per parameter, one rank in [0, L] per replication
    std::vector<std::vector<std::size_t>> counts;  // per parameter, `bins` entries summing to M
    std::vector<bool> tested;                      // false when M is too small for a chi-square test
    std::vector<double> chi_square;
    std::vector<double> p_value;  // NaN where !tested
    double significance = 0.01;

    /// Parameters whose rank histogram is not rejected at `significance`.
    std::size_t passed() const;
    std::size_t rejected() const;
};

/// Simulation-based calibration: theta* ~ prior, X ~ model(theta*, n),
/// L posterior draws, rank of theta*_d among the draws, chi-square
/// uniformity test of the binned ranks per parameter. Requires (L + 1) % bins == 0.
SbcResult run_sbc(const sim::SimulationModel& model, const Sampler& sampler, const SbcConfig& config, Rng& rng);

/// Chi-square statistic and p-value of equal-probability bin counts.
std::pair<double, double> chi_square_uniform(std::span<const std::size_t> counts);

struct RecoveryConfig {
    std::vector<std::size_t> n_grid{50, 200, 800};
    std::size_t replications = 100;
    std::size_t bootstrap = 1000;
    std::size_t threads = 1;
};

struct RecoveryResult {
    std::vector<std::string> names;
    std::vector<std::size_t> n_grid;
    /// [grid index][parameter]
    std::vector<std::vector<double>> r2;
    std::vector<std::vector<double>> ci_low;
    std::vector<std::vector<double>> ci_high;
    /// [grid index][replication][parameter]
    std::vector<std::vector<std::vector<double>>> truth;
    std::vector<std::vector<std::vector<double>>> estimate;
};

/// 1 - SS_res / SS_tot of `estimate` against `truth`.
double r_squared(std::span<const double> truth, std::span<const double> estimate);

/// Parameter recovery as a function of dataset size.
RecoveryResult run_recovery(const sim::SimulationModel& model, const Estimator& estimator,
                            const RecoveryConfig& config, Rng& rng);

/// Posterior-mean estimator from a sampler with a fixed number of draws.
Estimator posterior_mean_estimator(Sampler sampler, std::size_t draws = 500);

struct PosteriorSummary {
    std::vector<std::string> names;
    std::vector<double> mean;
    std::vector<double> sd;
    std::vector<double> lower;  // equal-tailed interval
    std::vector<double> upper;
    double level = 0.95;
    std::size_t dim = 0;
    /// Row-major D x D Pearson correlations; empty where a column has zero variance.
    std::vector<std::optional<double>> correlation;

    std::optional<double> corr(std::size_t i, std::size_t j) const { return correlation[i * dim + j]; }
};

/// Means, sds, equal-tailed 95% intervals and the correlation matrix of the draws.
/// Throws ContractError for fewer than two draws.
PosteriorSummary summarize_posterior(const nets::PosteriorDraws& draws, double level = 0.95);

/// Linear-interpolated sample quantile of sorted values.
double quantile_sorted(std::span<const double> sorted, double q);

/// BF_ij = (post_i / post_j) / (prior_i / prior_j).
std::vector<std::vector<double>> bayes_factors(std::span<const double> model_posterior,
                                               std::span<const double> model_prior);

}  // namespace amortize::diag
