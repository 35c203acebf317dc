#include "amortize/nets/summary.hpp"

#include "amortize/errors.hpp"

#include <cmath>

namespace amortize::nets {

Tensor encode_trials(const sim::TrialTable& table) {
    if (table.n() == 0) throw DataError("trial table is empty");
    Tensor out = Tensor::matrix(table.n(), kTrialFeatures);
    for (std::size_t i = 0; i < table.n(); ++i) {
        const auto& t = table.trials[i];
        if (t.condition < 1 || t.condition > static_cast<int>(sim::kConditions)) {
            throw DataError("row " + std::to_string(i) + ": unknown condition " + std::to_string(t.condition));
        }
        if (t.choice != 0 && t.choice != 1) {
            throw DataError("row " + std::to_string(i) + ": choice must be 0 or 1, got " + std::to_string(t.choice));
        }
        out(i, 0) = t.rt;
        out(i, 1) = 2.0 * t.choice - 1.0;
        out(i, 1 + static_cast<std::size_t>(t.condition)) = 1.0;
    }
    return out;
}

double log_n_feature(std::size_t n) { return std::log(static_cast<double>(n)) / std::log(1000.0); }

void SummaryConfig::validate() const {
    if (input_dim == 0) throw ConfigError("summary.input_dim must be positive");
    if (encoder_widths.empty()) throw ConfigError("summary.encoder_widths must not be empty");
    if (summary_dim == 0) throw ConfigError("summary.summary_dim must be positive");
    for (auto w : encoder_widths)
        if (w == 0) throw ConfigError("summary.encoder_widths entries must be positive");
    for (auto w : decoder_widths)
        if (w == 0) throw ConfigError("summary.decoder_widths entries must be positive");
}

SummaryNet::SummaryNet(SummaryConfig config, std::string prefix) : config_(std::move(config)), prefix_(std::move(prefix)) {
    config_.validate();
}

void SummaryNet::initialize(ParameterSet& params, Rng& rng) const {
    init_tanh_stack(params, prefix_ + ".enc", config_.input_dim, config_.encoder_widths, rng);
    const std::size_t pooled = config_.encoder_widths.back() + (config_.include_log_n ? 1 : 0);
    init_tanh_stack(params, prefix_ + ".dec", pooled, config_.decoder_widths, rng);
    const std::size_t last = config_.decoder_widths.empty() ? pooled : config_.decoder_widths.back();
    init_dense(params, prefix_ + ".out", last, config_.summary_dim, rng);
}

Var SummaryNet::pooled(Graph& g, const ParameterSet& params, Var rows, std::size_t batch) const {
    if (rows.cols() != config_.input_dim) {
        throw DimensionError("summary: expected rows of width " + std::to_string(config_.input_dim) + ", got " +
                             std::to_string(rows.cols()));
    }
    const Var h = tanh_stack(g, params, prefix_ + ".enc", rows, config_.encoder_widths.size());
    return diff::mean_pool(h, batch);
}

Var SummaryNet::forward(Graph& g, const ParameterSet& params, Var rows, std::size_t batch, std::size_t n) const {
    if (n == 0 || rows.rows() != batch * n) throw DimensionError("summary: row count does not equal batch * n");
    Var x = pooled(g, params, rows, batch);
    if (config_.include_log_n) x = diff::concat(x, g.constant(Tensor::matrix(batch, 1, log_n_feature(n))));
    x = tanh_stack(g, params, prefix_ + ".dec", x, config_.decoder_widths.size());
    return dense(g, params, prefix_ + ".out", x);
}

std::vector<double> SummaryNet::summarize(const ParameterSet& params, const Tensor& encoded_rows) const {
    Graph g;
    const Var s = forward(g, params, g.constant(encoded_rows), 1, encoded_rows.rows());
    auto data = s.value().data();
    return {data.begin(), data.end()};
}

std::vector<double> SummaryNet::summarize(const ParameterSet& params, const sim::TrialTable& table) const {
    return summarize(params, encode_trials(table));
}

}  // namespace amortize::nets
