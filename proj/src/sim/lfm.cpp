#include "amortize/sim/lfm.hpp"

#include "amortize/errors.hpp"
#include "amortize/sim/alpha_stable.hpp"

#include <cmath>
#include <string>

namespace amortize::sim {

namespace {

constexpr int kMaxResamplesPerTrial = 1000;

void shuffle(std::vector<Trial>& trials, Rng& rng) {
    for (std::size_t i = trials.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i - 1)));
        std::swap(trials[i - 1], trials[j]);
    }
}

}  // namespace

void LfmParams::validate() const {
    for (double vc : v)
        if (!std::isfinite(vc)) throw DomainError("lfm: drift rates must be finite");
    if (!(alpha > 1.0 && alpha <= 2.0)) throw DomainError("lfm: alpha must lie in (1, 2], got " + std::to_string(alpha));
    if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("lfm: threshold a must be positive, got " + std::to_string(a));
    if (!(zr > 0.0 && zr < 1.0)) throw DomainError("lfm: zr must lie in (0, 1), got " + std::to_string(zr));
    if (!(t0 >= 0.0) || !std::isfinite(t0)) throw DomainError("lfm: t0 must be >= 0, got " + std::to_string(t0));
}

void check_timeout_rate(const SimStats& stats, double max_fraction) {
    if (stats.timeout_fraction() > max_fraction) {
        throw TrainingError("simulator: " + std::to_string(stats.timeouts) + " of " +
                            std::to_string(stats.trials + stats.timeouts) +
                            " paths reached t_max without a boundary crossing (limit " +
                            std::to_string(100.0 * max_fraction) + "%); check the prior ranges");
    }
}

std::optional<Trial> simulate_lfm_trial(const LfmParams& p, int condition, double dt, double t_max, Rng& rng) {
    if (!(dt > 0.0)) throw ContractError("lfm: dt must be positive");
    if (dt >= t_max) throw ContractError("lfm: dt must be smaller than t_max");
    if (condition < 1 || condition > static_cast<int>(kConditions)) {
        throw ContractError("lfm: condition must lie in 1..4, got " + std::to_string(condition));
    }
    const AlphaStableSampler noise(p.alpha);
    const double drift_step = p.v[static_cast<std::size_t>(condition - 1)] * dt;
    const double noise_scale = std::pow(dt, 1.0 / p.alpha);
    const auto max_steps = static_cast<std::uint64_t>(std::floor(t_max / dt + 1e-9));

    double x = p.zr * p.a;
    for (std::uint64_t step = 1; step <= max_steps; ++step) {
        x += drift_step + noise_scale * noise(rng);
        if (x <= 0.0 || x >= p.a) {
            return Trial{p.t0 + static_cast<double>(step) * dt, x >= p.a ? 1 : 0, condition};
        }
    }
    return std::nullopt;
}

TrialTable simulate_trials(const LfmParams& p, std::size_t n_total, const SimulatorSettings& settings, Rng& rng,
                           SimStats& stats) {
    if (n_total == 0) throw ContractError("lfm: a dataset needs at least one trial");
    p.validate();
    TrialTable table;
    table.trials.reserve(n_total);
    for (std::size_t c = 0; c < kConditions; ++c) {
        const std::size_t count = n_total / kConditions + (c < n_total % kConditions ? 1 : 0);
        const int condition = static_cast<int>(c) + 1;
        for (std::size_t i = 0; i < count; ++i) {
            int attempts = 0;
            for (;;) {
                auto trial = simulate_lfm_trial(p, condition, settings.dt, settings.t_max, rng);
                if (trial) {
                    table.trials.push_back(*trial);
                    ++stats.trials;
                    break;
                }
                ++stats.timeouts;
                if (++attempts >= kMaxResamplesPerTrial) {
                    throw TrainingError("simulator: condition " + std::to_string(condition) + " timed out " +
                                        std::to_string(attempts) + " times in a row");
                }
            }
        }
    }
    shuffle(table.trials, rng);
    return table;
}

TrialTable simulate_dataset(const LfmParams& p, std::size_t n_per_condition, const SimulatorSettings& settings,
                            Rng& rng, SimStats& stats) {
    if (n_per_condition == 0) throw ContractError("lfm: n_per_condition must be at least 1");
    return simulate_trials(p, n_per_condition * kConditions, settings, rng, stats);
}

}  // namespace amortize::sim
