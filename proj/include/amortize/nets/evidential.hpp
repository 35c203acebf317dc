#pragma once

#include "amortize/nets/layers.hpp"
#include "amortize/nets/summary.hpp"

#include <span>
#include <string>
#include <vector>

namespace amortize::nets {

struct EvidentialConfig {
    std::size_t n_models = 2;
    SummaryConfig summary{};
    std::vector<std::size_t> head_widths{64};

    void validate() const;
};

/// Dirichlet over model probabilities.
struct DirichletOutput {
    std::vector<double> alpha;

    double total() const;
    /// alpha_j / sum(alpha): the model-posterior estimate.
    std::vector<double> mean() const;
    /// m_j (1 - m_j) / (alpha0 + 1).
    std::vector<double> variance() const;
};

struct ModelPosterior {
    std::vector<double> probabilities;
    std::vector<double> variance;  // epistemic uncertainty per model
};

ModelPosterior model_posterior(const DirichletOutput& output);

/// log Dir(pi | alpha). Throws ContractError unless pi is strictly positive and sums to 1 within 1e-9.
double dirichlet_log_density(std::span<const double> pi, std::span<const double> alpha);

/// Set classifier producing concentrations alpha = 1 + softplus(head(summary(X))).
class EvidentialNet {
public:
    explicit EvidentialNet(EvidentialConfig config, std::string prefix = "evidence");

    const EvidentialConfig& config() const noexcept { return config_; }
    const SummaryNet& summary() const noexcept { return summary_; }

    void initialize(ParameterSet& params, Rng& rng) const;

    /// batch x J concentrations.
    Var concentrations(Graph& g, const ParameterSet& params, Var rows, std::size_t batch, std::size_t n) const;

    DirichletOutput forward(const ParameterSet& params, const Tensor& encoded_rows) const;
    DirichletOutput forward(const ParameterSet& params, const sim::TrialTable& table) const;

private:
    EvidentialConfig config_;
    std::string prefix_;
    SummaryNet summary_;
};

}  // namespace amortize::nets
