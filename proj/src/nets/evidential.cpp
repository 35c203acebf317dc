#include "amortize/nets/evidential.hpp"

#include "amortize/errors.hpp"

#include <cmath>

namespace amortize::nets {

void EvidentialConfig::validate() const {
    if (n_models < 2) throw ConfigError("evidential.n_models must be at least 2");
    summary.validate();
    for (auto w : head_widths)
        if (w == 0) throw ConfigError("evidential.head_widths entries must be positive");
}

double DirichletOutput::total() const {
    double s = 0.0;
    for (double a : alpha) s += a;
    return s;
}

std::vector<double> DirichletOutput::mean() const {
    const double a0 = total();
    std::vector<double> m(alpha.size());
    for (std::size_t j = 0; j < alpha.size(); ++j) m[j] = alpha[j] / a0;
    return m;
}

std::vector<double> DirichletOutput::variance() const {
    const double a0 = total();
    auto m = mean();
    for (auto& v : m) v = v * (1.0 - v) / (a0 + 1.0);
    return m;
}

ModelPosterior model_posterior(const DirichletOutput& output) {
    if (output.alpha.size() < 2) throw ContractError("model_posterior: need at least two models");
    for (double a : output.alpha)
        if (!(a > 0.0) || !std::isfinite(a)) throw ContractError("model_posterior: concentrations must be positive");
    return {output.mean(), output.variance()};
}

double dirichlet_log_density(std::span<const double> pi, std::span<const double> alpha) {
    if (pi.size() != alpha.size() || pi.size() < 2) {
        throw ContractError("dirichlet_log_density: pi and alpha need the same length >= 2");
    }
    double total_pi = 0.0;
    for (double p : pi) {
        if (!(p > 0.0)) throw ContractError("dirichlet_log_density: pi must be strictly positive");
        total_pi += p;
    }
    if (std::abs(total_pi - 1.0) > 1e-9) throw ContractError("dirichlet_log_density: pi is not on the simplex");
    double log_beta = 0.0;
    double a0 = 0.0;
    double kernel = 0.0;
    for (std::size_t j = 0; j < pi.size(); ++j) {
        if (!(alpha[j] > 0.0)) throw ContractError("dirichlet_log_density: alpha must be positive");
        log_beta += std::lgamma(alpha[j]);
        a0 += alpha[j];
        kernel += (alpha[j] - 1.0) * std::log(pi[j]);
    }
    log_beta -= std::lgamma(a0);
    return kernel - log_beta;
}

EvidentialNet::EvidentialNet(EvidentialConfig config, std::string prefix)
    : config_(std::move(config)), prefix_(std::move(prefix)), summary_(config_.summary, prefix_ + ".summary") {
    config_.validate();
}

void EvidentialNet::initialize(ParameterSet& params, Rng& rng) const {
    summary_.initialize(params, rng);
    init_tanh_stack(params, prefix_ + ".head", config_.summary.summary_dim, config_.head_widths, rng);
    const std::size_t last = config_.head_widths.empty() ? config_.summary.summary_dim : config_.head_widths.back();
    init_dense(params, prefix_ + ".out", last, config_.n_models, rng);
}

Var EvidentialNet::concentrations(Graph& g, const ParameterSet& params, Var rows, std::size_t batch,
                                  std::size_t n) const {
    Var h = summary_.forward(g, params, rows, batch, n);
    h = tanh_stack(g, params, prefix_ + ".head", h, config_.head_widths.size());
    return diff::add_scalar(diff::softplus(dense(g, params, prefix_ + ".out", h)), 1.0);
}

DirichletOutput EvidentialNet::forward(const ParameterSet& params, const Tensor& encoded_rows) const {
    Graph g;
    const Var alpha = concentrations(g, params, g.constant(encoded_rows), 1, encoded_rows.rows());
    auto v = alpha.value().data();
    return {{v.begin(), v.end()}};
}

DirichletOutput EvidentialNet::forward(const ParameterSet& params, const sim::TrialTable& table) const {
    return forward(params, encode_trials(table));
}

}  // namespace amortize::nets
