#pragma once

#include "amortize/diff/tensor.hpp"

#include <cstdint>
#include <map>
#include <string>

namespace amortize::diff {

/// Named trainable tensors. Ordered so that iteration (and serialization) is deterministic.
using ParameterSet = std::map<std::string, Tensor>;
using GradientSet = std::map<std::string, Tensor>;

struct AdamState {
    std::map<std::string, Tensor> first_moment;
    std::map<std::string, Tensor> second_moment;
    std::uint64_t step_count = 0;
    double lr = 5e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// One bias-corrected Adam update, applied in place. Moments are created
/// lazily on the first step. A parameter absent from `grads` is treated as
/// having a zero gradient. Throws TrainingError naming the parameter if any
/// gradient entry is not finite; in that case nothing is modified.
void adam_step(AdamState& state, ParameterSet& params, const GradientSet& grads);

}  // namespace amortize::diff
