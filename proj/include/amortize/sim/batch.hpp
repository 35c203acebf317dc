#pragma once

#include "amortize/diff/tensor.hpp"
#include "amortize/random.hpp"
#include "amortize/sim/model.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace amortize::sim {

struct NRange {
    std::size_t lo = 50;
    std::size_t hi = 1000;
};

/// B paired draws (theta, X) sharing one dataset size n.
struct SimBatch {
    std::vector<std::vector<double>> thetas;  // B rows; widths differ only across models
    std::vector<diff::Tensor> data;           // B encoded datasets, each n x input_dim
    std::vector<int> model_index;             // empty unless drawn for model comparison
    std::size_t n = 0;
    SimStats stats;

    std::size_t size() const noexcept { return thetas.size(); }
    /// thetas as a B x D tensor; throws DimensionError if widths differ.
    diff::Tensor theta_matrix() const;
    /// All datasets stacked into one (B * n) x input_dim tensor.
    diff::Tensor stacked_data() const;
};

/// Runs `count` independent jobs on up to `threads` workers. Results are
/// produced by index so the outcome does not depend on scheduling.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& job);

/// Worker count from AMORTIZE_THREADS (default 1).
std::size_t default_threads();

/// Draws one shared n uniformly from `range`, then B independent (theta, X)
/// pairs. With `comparison` set, a model index is drawn uniformly first for
/// each row; otherwise `models` must hold exactly one model.
SimBatch make_batch(std::span<const SimulationModel* const> models, std::size_t batch_size, NRange range,
                    bool comparison, Rng& rng, std::size_t threads = 1);

}  // namespace amortize::sim
