#pragma once

#include "amortize/nets/layers.hpp"
#include "amortize/sim/prior.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace amortize::nets {

struct FlowConfig {
    std::size_t dim = 8;
    std::size_t n_blocks = 6;
    std::vector<std::size_t> hidden_widths{64, 64};
    double s_max = 1.9;
    std::size_t condition_dim = 32;

    void validate() const;
};

/// Per-parameter affine map into a roughly unit-scale space.
struct Standardizer {
    std::vector<double> location;
    std::vector<double> scale;

    /// Mean and sd of `draws` samples from the prior.
    static Standardizer from_prior(const sim::PriorSpec& prior, Rng& rng, std::size_t draws = 10000);
    static Standardizer identity(std::size_t dim);

    std::size_t dim() const noexcept { return location.size(); }
    void validate() const;
    Tensor standardize(const Tensor& raw) const;
    Tensor destandardize(const Tensor& standardized) const;
    /// sum_d log scale_d, the Jacobian term of the raw-space density.
    double log_scale_sum() const;
};

struct FlowOutput {
    Var z;
    Var log_det;  // batch x 1
};

/// Stack of conditional affine coupling blocks. Even blocks keep the first
/// half of the coordinates fixed and transform the second; odd blocks swap
/// the roles. Block output: changed * exp(clamp(scale(fixed, s))) + shift(fixed, s),
/// with clamp(u) = (2 s_max / pi) atan(u / s_max).
class FlowNet {
public:
    explicit FlowNet(FlowConfig config, std::string prefix = "flow");

    const FlowConfig& config() const noexcept { return config_; }

    void initialize(ParameterSet& params, Rng& rng) const;

    /// theta (batch x D, standardized) -> latent z with log|det J|.
    FlowOutput forward(Graph& g, const ParameterSet& params, Var theta, Var condition) const;

    /// Exact inverse in standardized space. `log_det`, if given, receives the
    /// per-row log-determinant of the inverse map.
    Tensor inverse(const ParameterSet& params, const Tensor& z, const Tensor& condition,
                   std::vector<double>* log_det = nullptr) const;

    /// Largest |log_det| the clamp allows.
    double log_det_bound() const;

private:
    struct Halves {
        std::size_t fixed_begin, fixed_end, changed_begin, changed_end;
    };
    Halves halves(std::size_t block) const;
    std::string block_prefix(std::size_t block) const;
    /// (clamped log-scale, shift) for one block.
    std::pair<Var, Var> coupling(Graph& g, const ParameterSet& params, std::size_t block, Var fixed,
                                 Var condition) const;

    FlowConfig config_;
    std::string prefix_;
};

/// Repeats a 1 x C row `count` times.
Tensor repeat_row(std::span<const double> row, std::size_t count);

}  // namespace amortize::nets
