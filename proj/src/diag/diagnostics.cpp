#include "amortize/diag/diagnostics.hpp"

#include "amortize/errors.hpp"
#include "amortize/sim/batch.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace amortize::diag {

std::size_t SbcResult::passed() const {
    std::size_t k = 0;
    for (std::size_t d = 0; d < p_value.size(); ++d)
        if (tested[d] && p_value[d] >= significance) ++k;
    return k;
}

std::size_t SbcResult::rejected() const {
    std::size_t k = 0;
    for (std::size_t d = 0; d < p_value.size(); ++d)
        if (tested[d] && p_value[d] < significance) ++k;
    return k;
}

std::pair<double, double> chi_square_uniform(std::span<const std::size_t> counts) {
    if (counts.size() < 2) throw ContractError("chi-square test needs at least two bins");
    double total = 0.0;
    for (auto c : counts) total += static_cast<double>(c);
    if (total <= 0.0) throw ContractError("chi-square test on empty counts");
    const double expected = total / static_cast<double>(counts.size());
    double stat = 0.0;
    for (auto c : counts) {
        const double diff = static_cast<double>(c) - expected;
        stat += diff * diff / expected;
    }
    const boost::math::chi_squared dist(static_cast<double>(counts.size() - 1));
    return {stat, boost::math::cdf(boost::math::complement(dist, stat))};
}

SbcResult run_sbc(const sim::SimulationModel& model, const Sampler& sampler, const SbcConfig& config, Rng& rng) {
    if (config.replications == 0) throw ContractError("sbc: at least one replication is required");
    if (config.bins < 2 || (config.draws + 1) % config.bins != 0) {
        throw ContractError("sbc: draws + 1 (" + std::to_string(config.draws + 1) + ") must be divisible by bins (" +
                            std::to_string(config.bins) + ")");
    }
    const std::size_t d = model.parameter_dim();
    const std::size_t m = config.replications;
    std::vector<std::uint64_t> seeds(m);
    for (auto& s : seeds) s = rng.next_u64();

    std::vector<std::vector<std::size_t>> by_rep(m);
    sim::parallel_for(m, config.threads, [&](std::size_t r) {
        Rng local(seeds[r]);
        sim::SimStats stats;
        const auto truth = sim::sample_prior(model.prior(), local);
        const auto data = model.simulate_encoded(truth, config.n, local, stats);
        const auto draws = sampler(data, config.draws, local);
        if (draws.dim != d || draws.draws != config.draws) {
            throw ConfigError("sbc: sampler returned draws that do not match the model's parameters");
        }
        std::vector<std::size_t> ranks(d, 0);
        for (std::size_t s = 0; s < draws.draws; ++s)
            for (std::size_t j = 0; j < d; ++j)
                if (draws(s, j) < truth[j]) ++ranks[j];
        by_rep[r] = std::move(ranks);
    });

    SbcResult out;
    out.names = model.prior().names();
    out.replications = m;
    out.draws = config.draws;
    out.bins = config.bins;
    out.significance = config.significance;
    out.ranks.assign(d, std::vector<std::size_t>(m));
    out.counts.assign(d, std::vector<std::size_t>(config.bins, 0));
    const std::size_t per_bin = (config.draws + 1) / config.bins;
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t j = 0; j < d; ++j) {
            out.ranks[j][r] = by_rep[r][j];
            ++out.counts[j][by_rep[r][j] / per_bin];
        }
    }
    // No test below one expected count per bin.
    const bool testable = m >= config.bins;
    out.tested.assign(d, testable);
    out.chi_square.assign(d, std::numeric_limits<double>::quiet_NaN());
    out.p_value.assign(d, std::numeric_limits<double>::quiet_NaN());
    if (testable) {
        for (std::size_t j = 0; j < d; ++j) std::tie(out.chi_square[j], out.p_value[j]) = chi_square_uniform(out.counts[j]);
    }
    return out;
}

double r_squared(std::span<const double> truth, std::span<const double> estimate) {
    if (truth.size() != estimate.size() || truth.size() < 2) {
        throw ContractError("r_squared: need two equally long series of length >= 2");
    }
    double mean = 0.0;
    for (double t : truth) mean += t;
    mean /= static_cast<double>(truth.size());
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        ss_res += (truth[i] - estimate[i]) * (truth[i] - estimate[i]);
        ss_tot += (truth[i] - mean) * (truth[i] - mean);
    }
    if (ss_tot == 0.0) return ss_res == 0.0 ? 1.0 : -std::numeric_limits<double>::infinity();
    return 1.0 - ss_res / ss_tot;
}

double quantile_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw ContractError("quantile of empty sample");
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

Estimator posterior_mean_estimator(Sampler sampler, std::size_t draws) {
    return [sampler = std::move(sampler), draws](const diff::Tensor& data, std::span<const double>, Rng& rng) {
        const auto post = sampler(data, draws, rng);
        std::vector<double> mean(post.dim, 0.0);
        for (std::size_t s = 0; s < post.draws; ++s)
            for (std::size_t j = 0; j < post.dim; ++j) mean[j] += post(s, j);
        for (auto& v : mean) v /= static_cast<double>(post.draws);
        return mean;
    };
}

RecoveryResult run_recovery(const sim::SimulationModel& model, const Estimator& estimator,
                            const RecoveryConfig& config, Rng& rng) {
    if (config.n_grid.empty()) throw ContractError("recovery: empty n grid");
    if (config.replications < 2) throw ContractError("recovery: need at least two replications");
    const std::size_t d = model.parameter_dim();
    RecoveryResult out;
    out.names = model.prior().names();
    out.n_grid = config.n_grid;

    for (std::size_t n : config.n_grid) {
        if (n == 0) throw ContractError("recovery: n must be positive");
        std::vector<std::uint64_t> seeds(config.replications);
        for (auto& s : seeds) s = rng.next_u64();
        std::vector<std::vector<double>> truth(config.replications), estimate(config.replications);
        sim::parallel_for(config.replications, config.threads, [&](std::size_t r) {
            Rng local(seeds[r]);
            sim::SimStats stats;
            truth[r] = sim::sample_prior(model.prior(), local);
            const auto data = model.simulate_encoded(truth[r], n, local, stats);
            estimate[r] = estimator(data, truth[r], local);
            if (estimate[r].size() != d) throw ConfigError("recovery: estimator returned the wrong width");
        });

        std::vector<double> r2(d), lo(d), hi(d);
        const std::uint64_t boot_seed = rng.next_u64();
        for (std::size_t j = 0; j < d; ++j) {
            std::vector<double> t(config.replications), e(config.replications);
            for (std::size_t r = 0; r < config.replications; ++r) {
                t[r] = truth[r][j];
                e[r] = estimate[r][j];
            }
            r2[j] = r_squared(t, e);
            Rng boot(split_seed(boot_seed, j));
            std::vector<double> stats;
            stats.reserve(config.bootstrap);
            std::vector<double> bt(config.replications), be(config.replications);
            for (std::size_t b = 0; b < config.bootstrap; ++b) {
                for (std::size_t r = 0; r < config.replications; ++r) {
                    const auto k = static_cast<std::size_t>(
                        boot.uniform_int(0, static_cast<std::int64_t>(config.replications) - 1));
                    bt[r] = t[k];
                    be[r] = e[k];
                }
                stats.push_back(r_squared(bt, be));
            }
            std::sort(stats.begin(), stats.end());
            lo[j] = stats.empty() ? r2[j] : quantile_sorted(stats, 0.025);
            hi[j] = stats.empty() ? r2[j] : quantile_sorted(stats, 0.975);
        }
        out.r2.push_back(std::move(r2));
        out.ci_low.push_back(std::move(lo));
        out.ci_high.push_back(std::move(hi));
        out.truth.push_back(std::move(truth));
        out.estimate.push_back(std::move(estimate));
    }
    return out;
}

PosteriorSummary summarize_posterior(const nets::PosteriorDraws& draws, double level) {
    if (draws.draws < 2) throw ContractError("summarize_posterior: at least two draws are required");
    if (!(level > 0.0 && level < 1.0)) throw ContractError("summarize_posterior: level must lie in (0, 1)");
    const std::size_t d = draws.dim;
    const double s = static_cast<double>(draws.draws);
    PosteriorSummary out;
    out.names = draws.names;
    out.dim = d;
    out.level = level;
    out.mean.assign(d, 0.0);
    out.sd.assign(d, 0.0);
    out.lower.resize(d);
    out.upper.resize(d);
    for (std::size_t j = 0; j < d; ++j) {
        auto col = draws.column(j);
        double m = 0.0;
        for (double v : col) m += v;
        m /= s;
        double var = 0.0;
        for (double v : col) var += (v - m) * (v - m);
        out.mean[j] = m;
        out.sd[j] = std::sqrt(var / (s - 1.0));
        std::sort(col.begin(), col.end());
        out.lower[j] = quantile_sorted(col, 0.5 * (1.0 - level));
        out.upper[j] = quantile_sorted(col, 1.0 - 0.5 * (1.0 - level));
    }
    out.correlation.assign(d * d, std::nullopt);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i; j < d; ++j) {
            double sxy = 0.0, sxx = 0.0, syy = 0.0;
            for (std::size_t r = 0; r < draws.draws; ++r) {
                const double x = draws(r, i) - out.mean[i];
                const double y = draws(r, j) - out.mean[j];
                sxy += x * y;
                sxx += x * x;
                syy += y * y;
            }
            if (sxx == 0.0 || syy == 0.0) continue;
            const double r = i == j ? 1.0 : std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
            out.correlation[i * d + j] = r;
            out.correlation[j * d + i] = r;
        }
    }
    return out;
}

std::vector<std::vector<double>> bayes_factors(std::span<const double> model_posterior,
                                               std::span<const double> model_prior) {
    const std::size_t j = model_posterior.size();
    if (j < 2 || model_prior.size() != j) throw ContractError("bayes_factors: need two vectors of equal length >= 2");
    auto check_simplex = [](std::span<const double> v, const char* what) {
        double total = 0.0;
        for (double x : v) {
            if (!(x >= 0.0) || !std::isfinite(x)) throw ContractError(std::string("bayes_factors: invalid ") + what);
            total += x;
        }
        if (std::abs(total - 1.0) > 1e-9) throw ContractError(std::string("bayes_factors: ") + what + " does not sum to 1");
    };
    check_simplex(model_posterior, "posterior");
    check_simplex(model_prior, "prior");
    for (double p : model_prior)
        if (p == 0.0) throw ContractError("bayes_factors: prior probabilities must be non-zero");

    std::vector<std::vector<double>> bf(j, std::vector<double>(j, 1.0));
    for (std::size_t a = 0; a < j; ++a)
        for (std::size_t b = 0; b < j; ++b)
            if (a != b) bf[a][b] = (model_posterior[a] / model_posterior[b]) / (model_prior[a] / model_prior[b]);
    return bf;
}

}  // namespace amortize::diag
