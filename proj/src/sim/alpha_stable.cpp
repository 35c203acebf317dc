#include "amortize/sim/alpha_stable.hpp"

#include "amortize/errors.hpp"

#include <cmath>
#include <numbers>

namespace amortize::sim {

AlphaStableSampler::AlphaStableSampler(double alpha) : alpha_(alpha) {
    if (!(alpha > 0.0 && alpha <= 2.0)) {
        throw DomainError("alpha-stable: alpha must lie in (0, 2], got " + std::to_string(alpha));
    }
    inv_alpha_ = 1.0 / alpha;
    tail_exponent_ = (1.0 - alpha) / alpha;
}

double AlphaStableSampler::operator()(Rng& rng) const {
    // S(2, 0, 1, 0) is exactly N(0, 2); skip the transcendental-heavy transform.
    if (alpha_ == 2.0) return std::numbers::sqrt2 * rng.normal();
    const double v = std::numbers::pi * (rng.uniform() - 0.5);
    if (alpha_ == 1.0) return std::tan(v);
    const double w = rng.exponential();
    // sin(aV) / cos(V)^(1/a) * (cos((1-a)V) / W)^((1-a)/a)
    const double log_tail = -inv_alpha_ * std::log(std::cos(v)) +
                            tail_exponent_ * (std::log(std::cos((1.0 - alpha_) * v)) - std::log(w));
    return std::sin(alpha_ * v) * std::exp(log_tail);
}

double sample_alpha_stable(double alpha, Rng& rng) { return AlphaStableSampler(alpha)(rng); }

}  // namespace amortize::sim
