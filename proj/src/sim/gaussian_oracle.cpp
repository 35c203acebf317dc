#include "amortize/sim/gaussian_oracle.hpp"

#include <cmath>

namespace amortize::sim {

std::vector<double> gaussian_oracle_simulate(double mu, std::size_t n, Rng& rng) {
    std::vector<double> out(n);
    for (auto& x : out) x = rng.normal(mu, 1.0);
    return out;
}

GaussianPosterior gaussian_oracle_posterior(std::span<const double> data) {
    const double n = static_cast<double>(data.size());
    double total = 0.0;
    for (double x : data) total += x;
    // n * xbar / (n + 1) == sum / (n + 1)
    return {total / (n + 1.0), 1.0 / std::sqrt(n + 1.0)};
}

}  // namespace amortize::sim
