#pragma once

#include "amortize/random.hpp"

namespace amortize::sim {

/// One draw from the symmetric standard stable law S(alpha, 0, 1, 0) using the
/// Chambers-Mallows-Stuck transform. alpha = 2 gives N(0, 2), alpha = 1 gives a
/// standard Cauchy variate. Throws DomainError unless 0 < alpha <= 2.
double sample_alpha_stable(double alpha, Rng& rng);

/// Sampler with the alpha-dependent constants of the transform precomputed.
class AlphaStableSampler {
public:
    explicit AlphaStableSampler(double alpha);

    double alpha() const noexcept { return alpha_; }
    double operator()(Rng& rng) const;

private:
    double alpha_;
    double inv_alpha_;
    double tail_exponent_;  // (1 - alpha) / alpha
};

}  // namespace amortize::sim
