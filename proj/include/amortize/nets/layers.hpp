#pragma once

#include "amortize/diff/adam.hpp"
#include "amortize/diff/graph.hpp"
#include "amortize/random.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace amortize::nets {

using diff::Graph;
using diff::ParameterSet;
using diff::Tensor;
using diff::Var;

/// Adds `prefix.W` (in x out, Glorot-uniform scaled by `gain`) and `prefix.b` (zeros).
void init_dense(ParameterSet& params, const std::string& prefix, std::size_t in, std::size_t out, Rng& rng,
                double gain = 1.0);

/// x W + b.
Var dense(Graph& g, const ParameterSet& params, const std::string& prefix, Var x);

/// Stack of tanh layers named prefix.h0, prefix.h1, ...
void init_tanh_stack(ParameterSet& params, const std::string& prefix, std::size_t in,
                     const std::vector<std::size_t>& widths, Rng& rng);
Var tanh_stack(Graph& g, const ParameterSet& params, const std::string& prefix, Var x, std::size_t depth);

/// Parameter lookup that names the missing tensor.
const Tensor& require_param(const ParameterSet& params, const std::string& name);

}  // namespace amortize::nets
