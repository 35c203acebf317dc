#include "amortize/diff/adam.hpp"

#include "amortize/errors.hpp"

#include <cmath>

namespace amortize::diff {

void adam_step(AdamState& state, ParameterSet& params, const GradientSet& grads) {
    if (!(state.beta1 > 0.0 && state.beta1 < 1.0 && state.beta2 > 0.0 && state.beta2 < 1.0)) {
        throw ContractError("adam: betas must lie in (0, 1)");
    }
    for (const auto& [name, g] : grads) {
        auto it = params.find(name);
        if (it == params.end()) throw ContractError("adam: gradient for unknown parameter '" + name + "'");
        if (!g.same_shape(it->second)) {
            throw DimensionError("adam: gradient shape " + shape_string(g.shape()) + " does not match parameter '" +
                                 name + "' " + shape_string(it->second.shape()));
        }
        if (!g.all_finite()) throw TrainingError("adam: non-finite gradient for parameter '" + name + "'");
    }

    state.step_count += 1;
    const double t = static_cast<double>(state.step_count);
    const double c1 = 1.0 - std::pow(state.beta1, t);
    const double c2 = 1.0 - std::pow(state.beta2, t);

    for (auto& [name, p] : params) {
        auto& m = state.first_moment.try_emplace(name, p.shape(), 0.0).first->second;
        auto& v = state.second_moment.try_emplace(name, p.shape(), 0.0).first->second;
        if (!m.same_shape(p) || !v.same_shape(p)) {
            throw DimensionError("adam: moment shape mismatch for parameter '" + name + "'");
        }
        const auto git = grads.find(name);
        const Tensor* g = git == grads.end() ? nullptr : &git->second;
        auto pd = p.data();
        auto md = m.data();
        auto vd = v.data();
        for (std::size_t i = 0; i < pd.size(); ++i) {
            const double gi = g ? (*g)[i] : 0.0;
            md[i] = state.beta1 * md[i] + (1.0 - state.beta1) * gi;
            vd[i] = state.beta2 * vd[i] + (1.0 - state.beta2) * gi * gi;
            const double mhat = md[i] / c1;
            const double vhat = vd[i] / c2;
            pd[i] -= state.lr * mhat / (std::sqrt(vhat) + state.eps);
        }
    }
}

}  // namespace amortize::diff
