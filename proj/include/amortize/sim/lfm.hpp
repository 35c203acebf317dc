#pragma once

#include "amortize/random.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace amortize::sim {

inline constexpr std::size_t kConditions = 4;

/// Levy-flight evidence accumulation parameters.
struct LfmParams {
    std::array<double, kConditions> v{};  // drift per condition
    double alpha = 2.0;                   // stability exponent in (1, 2]
    double a = 1.0;                       // boundary separation
    double zr = 0.5;                      // relative starting point in (0, 1)
    double t0 = 0.3;                      // non-decision time, seconds

    /// Throws DomainError when an invariant is violated.
    void validate() const;
};

struct Trial {
    double rt = 0.0;
    int choice = 0;     // 0 lower boundary, 1 upper boundary
    int condition = 1;  // 1..4
};

struct TrialTable {
    std::vector<Trial> trials;

    std::size_t n() const noexcept { return trials.size(); }
};

struct SimulatorSettings {
    double dt = 0.001;
    double t_max = 10.0;                 // longest admissible decision time, seconds
    double max_timeout_fraction = 0.01;  // run-level abort threshold
};

/// Timeout bookkeeping: accepted trials and discarded paths that never crossed.
struct SimStats {
    std::uint64_t trials = 0;
    std::uint64_t timeouts = 0;

    SimStats& operator+=(const SimStats& other) {
        trials += other.trials;
        timeouts += other.timeouts;
        return *this;
    }
    double timeout_fraction() const noexcept {
        const auto total = trials + timeouts;
        return total ? static_cast<double>(timeouts) / static_cast<double>(total) : 0.0;
    }
};

/// Throws TrainingError if more than `max_fraction` of simulated paths timed out.
void check_timeout_rate(const SimStats& stats, double max_fraction);

/// One Euler-Maruyama path x += v_c dt + dt^(1/alpha) xi from x = zr * a until it
/// leaves (0, a). Returns nullopt when no boundary is reached within t_max.
std::optional<Trial> simulate_lfm_trial(const LfmParams& p, int condition, double dt, double t_max, Rng& rng);

/// `n_total` trials with conditions assigned as evenly as possible (the first
/// n_total % 4 conditions get one extra), timeouts resampled, order shuffled.
TrialTable simulate_trials(const LfmParams& p, std::size_t n_total, const SimulatorSettings& settings, Rng& rng,
                           SimStats& stats);

/// `n_per_condition` trials in each of the four conditions, order shuffled.
TrialTable simulate_dataset(const LfmParams& p, std::size_t n_per_condition, const SimulatorSettings& settings,
                            Rng& rng, SimStats& stats);

}  // namespace amortize::sim
