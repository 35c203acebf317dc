#pragma once

#include "amortize/diff/tensor.hpp"
#include "amortize/nets/evidential.hpp"
#include "amortize/nets/posterior.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace amortize::app {

struct InferResult {
    std::vector<nets::PosteriorDraws> draws;  // one per table, same order
    std::vector<double> seconds;              // wall time per table
    double total_seconds = 0.0;
};

/// Posterior draws for every encoded table. Table i uses the stream
/// split_seed(seed, i), so results do not depend on the thread count.
InferResult infer_many(const nets::PosteriorNetwork& net, const diff::ParameterSet& params,
                       std::span<const diff::Tensor> tables, std::size_t draws, std::uint64_t seed,
                       std::size_t threads = 1);

/// Dirichlet outputs of the evidential network for every encoded table.
std::vector<nets::DirichletOutput> compare_many(const nets::EvidentialNet& net, const diff::ParameterSet& params,
                                                std::span<const diff::Tensor> tables, std::size_t threads = 1);

}  // namespace amortize::app
