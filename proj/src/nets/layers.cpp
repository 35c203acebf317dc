#include "amortize/nets/layers.hpp"

#include "amortize/errors.hpp"

#include <cmath>

namespace amortize::nets {

const Tensor& require_param(const ParameterSet& params, const std::string& name) {
    auto it = params.find(name);
    if (it == params.end()) throw ConfigError("missing network parameter '" + name + "'");
    return it->second;
}

void init_dense(ParameterSet& params, const std::string& prefix, std::size_t in, std::size_t out, Rng& rng,
                double gain) {
    const double limit = gain * std::sqrt(6.0 / static_cast<double>(in + out));
    Tensor w = Tensor::matrix(in, out);
    for (auto& v : w.data()) v = rng.uniform(-limit, limit);
    params.insert_or_assign(prefix + ".W", std::move(w));
    params.insert_or_assign(prefix + ".b", Tensor::matrix(1, out));
}

Var dense(Graph& g, const ParameterSet& params, const std::string& prefix, Var x) {
    const Var w = g.parameter(prefix + ".W", require_param(params, prefix + ".W"));
    const Var b = g.parameter(prefix + ".b", require_param(params, prefix + ".b"));
    return diff::add_row(diff::matmul(x, w), b);
}

void init_tanh_stack(ParameterSet& params, const std::string& prefix, std::size_t in,
                     const std::vector<std::size_t>& widths, Rng& rng) {
    std::size_t fan_in = in;
    for (std::size_t i = 0; i < widths.size(); ++i) {
        init_dense(params, prefix + ".h" + std::to_string(i), fan_in, widths[i], rng);
        fan_in = widths[i];
    }
}

Var tanh_stack(Graph& g, const ParameterSet& params, const std::string& prefix, Var x, std::size_t depth) {
    for (std::size_t i = 0; i < depth; ++i) x = diff::tanh(dense(g, params, prefix + ".h" + std::to_string(i), x));
    return x;
}

}  // namespace amortize::nets
