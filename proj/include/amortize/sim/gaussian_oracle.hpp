#pragma once

#include "amortize/random.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace amortize::sim {

// Conjugate model with closed-form posterior: mu ~ N(0, 1), x_i | mu ~ N(mu, 1).

std::vector<double> gaussian_oracle_simulate(double mu, std::size_t n, Rng& rng);

struct GaussianPosterior {
    double mean = 0.0;
    double sd = 1.0;
};

/// N(n * mean(x) / (n + 1), 1 / (n + 1)). Empty data returns the prior.
GaussianPosterior gaussian_oracle_posterior(std::span<const double> data);

}  // namespace amortize::sim
