#pragma once

#include "amortize/diff/adam.hpp"
#include "amortize/diff/graph.hpp"
#include "amortize/nets/evidential.hpp"
#include "amortize/nets/posterior.hpp"
#include "amortize/sim/batch.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace amortize::train {

struct TrainConfig {
    std::uint64_t iterations = 50000;
    std::size_t batch_size = 32;
    sim::NRange n_range{50, 1000};
    double lr = 5e-4;
    double lr_decay = 0.95;
    std::uint64_t decay_interval = 1000;
    std::uint64_t seed = 1;
    std::uint64_t checkpoint_every = 0;  // 0: only at the end
    std::size_t threads = 1;
    double max_timeout_fraction = 0.01;

    void validate() const;
    double learning_rate(std::uint64_t iteration) const;
};

/// Everything needed to continue a run bit-exactly: weights, optimizer
/// moments and the iteration counter (batch seeds derive from seed and iteration).
struct TrainingState {
    diff::ParameterSet params;
    diff::AdamState adam;
    std::uint64_t iteration = 0;
    sim::SimStats sim_stats;
};

struct TrainReport {
    std::vector<double> losses;  // one per iteration run in this call
    std::uint64_t first_iteration = 0;
    sim::SimStats sim_stats;
    double wall_seconds = 0.0;
    std::string final_checkpoint;
};

/// Called at the checkpoint cadence and once after the last iteration.
using CheckpointHook = std::function<std::string(const TrainingState&)>;

/// Seed of the batch simulated at `iteration`.
std::uint64_t batch_seed(std::uint64_t seed, std::uint64_t iteration);

/// Mean over the batch of -log p(theta_b | summary(X_b)).
diff::Var flow_loss(diff::Graph& g, const sim::SimBatch& batch, const nets::PosteriorNetwork& net,
                    const diff::ParameterSet& params);

/// Mean over the batch of -log m_{true model}, the log score of the Dirichlet mean.
diff::Var evidential_loss(diff::Graph& g, const sim::SimBatch& batch, const nets::EvidentialNet& net,
                          const diff::ParameterSet& params);

/// Online training of summary + flow: simulate, loss, backprop, Adam; from
/// state.iteration up to config.iterations.
TrainReport train_posterior(const TrainConfig& config, const sim::SimulationModel& model,
                            const nets::PosteriorNetwork& net, TrainingState& state,
                            const CheckpointHook& hook = {});

/// Online training of the evidential classifier over `models` with a uniform model prior.
TrainReport train_comparison(const TrainConfig& config, std::span<const sim::SimulationModel* const> models,
                             const nets::EvidentialNet& net, TrainingState& state, const CheckpointHook& hook = {});

/// Writes {"iterations":..., "final_loss":..., ...} as JSON.
std::string report_json(const TrainReport& report);
/// "iteration,loss" lines.
std::string loss_csv(const TrainReport& report);

}  // namespace amortize::train
