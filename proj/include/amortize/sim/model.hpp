#pragma once

#include "amortize/diff/tensor.hpp"
#include "amortize/random.hpp"
#include "amortize/sim/lfm.hpp"
#include "amortize/sim/prior.hpp"

#include <memory>
#include <span>
#include <string>

namespace amortize::sim {

/// A simulator paired with its prior: the implicit likelihood p(X | theta).
class SimulationModel {
public:
    virtual ~SimulationModel() = default;

    /// Short identifier used in configs and checkpoints ("lfm", "ddm", "gaussian").
    virtual std::string kind() const = 0;
    virtual const PriorSpec& prior() const = 0;
    std::size_t parameter_dim() const { return prior().size(); }

    /// Width of one encoded observation row.
    virtual std::size_t input_dim() const = 0;

    /// Simulates `n` observations at `theta` and returns them encoded, one row each.
    virtual diff::Tensor simulate_encoded(std::span<const double> theta, std::size_t n, Rng& rng,
                                          SimStats& stats) const = 0;
};

/// Default prior for the Levy-flight model: v1..v4, alpha, a, zr, t0.
PriorSpec default_lfm_prior();
/// Default prior for the Gaussian-noise diffusion model: v1..v4, a, zr, t0.
PriorSpec default_ddm_prior();
/// Standard normal prior on mu1, mu2.
PriorSpec default_gaussian_prior();

/// Levy-flight model; theta = (v1, v2, v3, v4, alpha, a, zr, t0).
class LevyFlightModel final : public SimulationModel {
public:
    LevyFlightModel(PriorSpec prior, SimulatorSettings settings);

    std::string kind() const override { return "lfm"; }
    const PriorSpec& prior() const override { return prior_; }
    std::size_t input_dim() const override { return 6; }
    diff::Tensor simulate_encoded(std::span<const double> theta, std::size_t n, Rng& rng,
                                  SimStats& stats) const override;

    LfmParams params_from(std::span<const double> theta) const;
    TrialTable simulate_table(std::span<const double> theta, std::size_t n, Rng& rng, SimStats& stats) const;
    const SimulatorSettings& settings() const noexcept { return settings_; }

private:
    PriorSpec prior_;
    SimulatorSettings settings_;
    std::array<std::size_t, 8> index_{};
};

/// Diffusion model: the Levy-flight simulator with alpha fixed at 2;
/// theta = (v1, v2, v3, v4, a, zr, t0).
class DiffusionModel final : public SimulationModel {
public:
    DiffusionModel(PriorSpec prior, SimulatorSettings settings);

    std::string kind() const override { return "ddm"; }
    const PriorSpec& prior() const override { return prior_; }
    std::size_t input_dim() const override { return 6; }
    diff::Tensor simulate_encoded(std::span<const double> theta, std::size_t n, Rng& rng,
                                  SimStats& stats) const override;

    LfmParams params_from(std::span<const double> theta) const;
    TrialTable simulate_table(std::span<const double> theta, std::size_t n, Rng& rng, SimStats& stats) const;

private:
    PriorSpec prior_;
    SimulatorSettings settings_;
    std::array<std::size_t, 7> index_{};
};

/// Two independent conjugate-Gaussian means observed jointly: rows (x1, x2) with
/// x_d ~ N(mu_d, 1). The closed-form posterior makes this the oracle model.
class GaussianToyModel final : public SimulationModel {
public:
    explicit GaussianToyModel(PriorSpec prior = default_gaussian_prior());

    std::string kind() const override { return "gaussian"; }
    const PriorSpec& prior() const override { return prior_; }
    std::size_t input_dim() const override { return 2; }
    diff::Tensor simulate_encoded(std::span<const double> theta, std::size_t n, Rng& rng,
                                  SimStats& stats) const override;

private:
    PriorSpec prior_;
};

/// Builds a model by kind name; throws ConfigError for unknown kinds.
std::unique_ptr<SimulationModel> make_model(const std::string& kind, const PriorSpec& prior,
                                            const SimulatorSettings& settings);
/// The default prior for a model kind.
PriorSpec default_prior(const std::string& kind);

}  // namespace amortize::sim
