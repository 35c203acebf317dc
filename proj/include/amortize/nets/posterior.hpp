#pragma once

#include "amortize/nets/flow.hpp"
#include "amortize/nets/summary.hpp"

#include <span>
#include <string>
#include <vector>

namespace amortize::nets {

/// S posterior draws of D parameters, row-major.
struct PosteriorDraws {
    std::vector<std::string> names;
    std::size_t draws = 0;
    std::size_t dim = 0;
    std::vector<double> values;

    double operator()(std::size_t r, std::size_t c) const { return values[r * dim + c]; }
    std::vector<double> column(std::size_t c) const;
};

/// Summary network and conditional flow trained jointly; the pair defines
/// p(theta | summary(X)) in raw parameter space.
class PosteriorNetwork {
public:
    PosteriorNetwork(SummaryConfig summary, FlowConfig flow, Standardizer standardizer,
                     std::vector<std::string> parameter_names = {});

    const SummaryNet& summary() const noexcept { return summary_; }
    const FlowNet& flow() const noexcept { return flow_; }
    const Standardizer& standardizer() const noexcept { return standardizer_; }
    const std::vector<std::string>& parameter_names() const noexcept { return names_; }
    std::size_t dim() const noexcept { return flow_.config().dim; }

    void initialize(ParameterSet& params, Rng& rng) const;

    /// -log p(theta_b | summary(X_b)) per row (batch x 1). `raw_thetas` is
    /// batch x D in raw units; `rows` stacks the batch's encoded datasets.
    Var negative_log_posterior(Graph& g, const ParameterSet& params, const Tensor& raw_thetas, Var rows,
                               std::size_t batch, std::size_t n) const;

    /// log density of raw `theta` given a precomputed summary vector.
    double log_posterior(const ParameterSet& params, std::span<const double> theta,
                         std::span<const double> summary) const;

    PosteriorDraws sample(const ParameterSet& params, std::span<const double> summary, std::size_t n_draws,
                          Rng& rng) const;
    PosteriorDraws sample_for(const ParameterSet& params, const Tensor& encoded_rows, std::size_t n_draws,
                              Rng& rng) const;

private:
    SummaryNet summary_;
    FlowNet flow_;
    Standardizer standardizer_;
    std::vector<std::string> names_;
};

}  // namespace amortize::nets
