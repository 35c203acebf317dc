#pragma once

#include "amortize/nets/layers.hpp"
#include "amortize/sim/lfm.hpp"

#include <string>
#include <vector>

namespace amortize::nets {

/// rt, signed choice, one-hot condition.
inline constexpr std::size_t kTrialFeatures = 6;

/// One row per trial: [rt, 2 * choice - 1, onehot(condition)].
/// Throws DataError naming the row for conditions outside 1..4 or choices outside {0, 1}.
Tensor encode_trials(const sim::TrialTable& table);

struct SummaryConfig {
    std::size_t input_dim = kTrialFeatures;
    std::vector<std::size_t> encoder_widths{64, 64};
    std::vector<std::size_t> decoder_widths{64, 64};
    std::size_t summary_dim = 32;
    bool include_log_n = true;

    void validate() const;
};

/// Exchangeable set encoder: s = decoder(mean_rows(encoder(x)) ++ [log n / log 1000]).
class SummaryNet {
public:
    explicit SummaryNet(SummaryConfig config, std::string prefix = "summary");

    const SummaryConfig& config() const noexcept { return config_; }
    const std::string& prefix() const noexcept { return prefix_; }

    void initialize(ParameterSet& params, Rng& rng) const;

    /// `rows` stacks `batch` datasets of `n` rows each; returns batch x summary_dim.
    Var forward(Graph& g, const ParameterSet& params, Var rows, std::size_t batch, std::size_t n) const;

    /// Mean-pooled encoder output (batch x last encoder width), before the decoder.
    Var pooled(Graph& g, const ParameterSet& params, Var rows, std::size_t batch) const;

    /// Single-dataset convenience path without gradient use.
    std::vector<double> summarize(const ParameterSet& params, const Tensor& encoded_rows) const;
    std::vector<double> summarize(const ParameterSet& params, const sim::TrialTable& table) const;

private:
    SummaryConfig config_;
    std::string prefix_;
};

/// log n / log 1000: the dataset-size feature appended after pooling.
double log_n_feature(std::size_t n);

}  // namespace amortize::nets
