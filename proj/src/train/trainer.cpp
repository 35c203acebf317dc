#include "amortize/train/trainer.hpp"

#include "amortize/errors.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <sstream>

namespace amortize::train {

void TrainConfig::validate() const {
    if (iterations < 1) throw ConfigError("train.iterations must be at least 1");
    if (batch_size < 1) throw ConfigError("train.batch_size must be at least 1");
    if (n_range.lo < 1 || n_range.lo > n_range.hi) throw ConfigError("train.n_range must satisfy 1 <= lo <= hi");
    if (!(lr > 0.0)) throw ConfigError("train.lr must be positive");
    if (!(lr_decay > 0.0 && lr_decay <= 1.0)) throw ConfigError("train.lr_decay must lie in (0, 1]");
    if (decay_interval < 1) throw ConfigError("train.decay_interval must be at least 1");
    if (threads < 1) throw ConfigError("train.threads must be at least 1");
}

double TrainConfig::learning_rate(std::uint64_t iteration) const {
    return lr * std::pow(lr_decay, static_cast<double>(iteration / decay_interval));
}

std::uint64_t batch_seed(std::uint64_t seed, std::uint64_t iteration) { return split_seed(seed, iteration); }

diff::Var flow_loss(diff::Graph& g, const sim::SimBatch& batch, const nets::PosteriorNetwork& net,
                    const diff::ParameterSet& params) {
    const diff::Var rows = g.constant(batch.stacked_data());
    return diff::mean(net.negative_log_posterior(g, params, batch.theta_matrix(), rows, batch.size(), batch.n));
}

diff::Var evidential_loss(diff::Graph& g, const sim::SimBatch& batch, const nets::EvidentialNet& net,
                          const diff::ParameterSet& params) {
    const std::size_t j = net.config().n_models;
    if (batch.model_index.size() != batch.size()) throw ContractError("evidential_loss: batch has no model indices");
    diff::Tensor onehot = diff::Tensor::matrix(batch.size(), j);
    for (std::size_t b = 0; b < batch.size(); ++b) {
        const int m = batch.model_index[b];
        if (m < 0 || static_cast<std::size_t>(m) >= j) throw ContractError("evidential_loss: model index out of range");
        onehot(b, static_cast<std::size_t>(m)) = 1.0;
    }
    const diff::Var alpha = net.concentrations(g, params, g.constant(batch.stacked_data()), batch.size(), batch.n);
    // -log(alpha_true / alpha0) = log alpha0 - log alpha_true
    const diff::Var picked = diff::sum_cols(diff::mul(diff::log(alpha), g.constant(std::move(onehot))));
    const diff::Var log_total = diff::log(diff::sum_cols(alpha));
    return diff::mean(diff::sub(log_total, picked));
}

namespace {

using LossFn = std::function<diff::Var(diff::Graph&, const sim::SimBatch&, const diff::ParameterSet&)>;

TrainReport run_loop(const TrainConfig& config, std::span<const sim::SimulationModel* const> models, bool comparison,
                     const LossFn& loss_fn, TrainingState& state, const CheckpointHook& hook) {
    config.validate();
    const auto start = std::chrono::steady_clock::now();
    TrainReport report;
    report.first_iteration = state.iteration;
    if (state.params.empty()) throw ContractError("training state has no parameters; initialize the network first");

    std::string last_checkpoint;
    while (state.iteration < config.iterations) {
        const std::uint64_t seed = batch_seed(config.seed, state.iteration);
        Rng rng(seed);
        const auto batch = sim::make_batch(models, config.batch_size, config.n_range, comparison, rng, config.threads);
        state.sim_stats += batch.stats;
        report.sim_stats += batch.stats;
        sim::check_timeout_rate(state.sim_stats, config.max_timeout_fraction);

        diff::Graph g;
        const diff::Var loss = loss_fn(g, batch, state.params);
        const double value = loss.value().item();
        if (!std::isfinite(value)) {
            throw TrainingError("non-finite loss at iteration " + std::to_string(state.iteration) +
                                " (batch seed " + std::to_string(seed) + ")");
        }
        const auto grads = g.backward(loss);
        state.adam.lr = config.learning_rate(state.iteration);
        diff::adam_step(state.adam, state.params, grads);
        report.losses.push_back(value);
        ++state.iteration;

        const bool at_cadence = config.checkpoint_every > 0 && state.iteration % config.checkpoint_every == 0;
        if (hook && (at_cadence || state.iteration == config.iterations)) last_checkpoint = hook(state);
    }
    report.final_checkpoint = last_checkpoint;
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

}  // namespace

TrainReport train_posterior(const TrainConfig& config, const sim::SimulationModel& model,
                            const nets::PosteriorNetwork& net, TrainingState& state, const CheckpointHook& hook) {
    if (model.parameter_dim() != net.dim()) throw ConfigError("model parameter count does not match flow.dim");
    if (model.input_dim() != net.summary().config().input_dim) {
        throw ConfigError("model observation width does not match summary.input_dim");
    }
    const sim::SimulationModel* models[] = {&model};
    return run_loop(
        config, models, false,
        [&](diff::Graph& g, const sim::SimBatch& batch, const diff::ParameterSet& params) {
            return flow_loss(g, batch, net, params);
        },
        state, hook);
}

TrainReport train_comparison(const TrainConfig& config, std::span<const sim::SimulationModel* const> models,
                             const nets::EvidentialNet& net, TrainingState& state, const CheckpointHook& hook) {
    if (models.size() != net.config().n_models) throw ConfigError("number of models does not match evidential.n_models");
    for (const auto* m : models) {
        if (m->input_dim() != net.summary().config().input_dim) {
            throw ConfigError("model observation width does not match evidential summary input_dim");
        }
    }
    return run_loop(
        config, models, true,
        [&](diff::Graph& g, const sim::SimBatch& batch, const diff::ParameterSet& params) {
            return evidential_loss(g, batch, net, params);
        },
        state, hook);
}

std::string report_json(const TrainReport& report) {
    nlohmann::json j;
    j["first_iteration"] = report.first_iteration;
    j["iterations_run"] = report.losses.size();
    j["final_loss"] = report.losses.empty() ? nlohmann::json(nullptr) : nlohmann::json(report.losses.back());
    j["simulated_trials"] = report.sim_stats.trials;
    j["timeout_resamples"] = report.sim_stats.timeouts;
    j["timeout_fraction"] = report.sim_stats.timeout_fraction();
    j["wall_seconds"] = report.wall_seconds;
    j["final_checkpoint"] = report.final_checkpoint;
    return j.dump(2);
}

std::string loss_csv(const TrainReport& report) {
    std::ostringstream os;
    os.precision(17);
    os << "iteration,loss\n";
    for (std::size_t i = 0; i < report.losses.size(); ++i) os << report.first_iteration + i << ',' << report.losses[i] << '\n';
    return os.str();
}

}  // namespace amortize::train
