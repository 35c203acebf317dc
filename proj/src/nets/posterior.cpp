#include "amortize/nets/posterior.hpp"

#include "amortize/errors.hpp"

#include <cmath>
#include <numbers>

namespace amortize::nets {

std::vector<double> PosteriorDraws::column(std::size_t c) const {
    std::vector<double> out(draws);
    for (std::size_t r = 0; r < draws; ++r) out[r] = values[r * dim + c];
    return out;
}

PosteriorNetwork::PosteriorNetwork(SummaryConfig summary, FlowConfig flow, Standardizer standardizer,
                                   std::vector<std::string> parameter_names)
    : summary_(std::move(summary)),
      flow_(std::move(flow)),
      standardizer_(std::move(standardizer)),
      names_(std::move(parameter_names)) {
    const auto& fc = flow_.config();
    if (fc.condition_dim != summary_.config().summary_dim) {
        throw ConfigError("flow.condition_dim must equal summary.summary_dim");
    }
    if (summary_.config().summary_dim < fc.dim) throw ConfigError("summary.summary_dim must be >= parameter count");
    if (standardizer_.dim() != fc.dim) throw ConfigError("standardizer width does not match flow.dim");
    standardizer_.validate();
    if (names_.empty()) {
        for (std::size_t d = 0; d < fc.dim; ++d) names_.push_back("theta" + std::to_string(d + 1));
    }
    if (names_.size() != fc.dim) throw ConfigError("parameter names do not match flow.dim");
}

void PosteriorNetwork::initialize(ParameterSet& params, Rng& rng) const {
    summary_.initialize(params, rng);
    flow_.initialize(params, rng);
}

Var PosteriorNetwork::negative_log_posterior(Graph& g, const ParameterSet& params, const Tensor& raw_thetas,
                                             Var rows, std::size_t batch, std::size_t n) const {
    if (raw_thetas.rows() != batch) throw DimensionError("posterior: theta rows do not match batch size");
    const Var s = summary_.forward(g, params, rows, batch, n);
    const Var theta = g.constant(standardizer_.standardize(raw_thetas));
    const auto out = flow_.forward(g, params, theta, s);
    const double d = static_cast<double>(dim());
    const double constant = 0.5 * d * std::log(2.0 * std::numbers::pi) + standardizer_.log_scale_sum();
    // 0.5 |z|^2 - log_det + const
    const Var quad = diff::scale(diff::sum_cols(diff::square(out.z)), 0.5);
    return diff::add_scalar(diff::sub(quad, out.log_det), constant);
}

double PosteriorNetwork::log_posterior(const ParameterSet& params, std::span<const double> theta,
                                       std::span<const double> summary) const {
    if (theta.size() != dim()) throw DimensionError("log_posterior: theta width mismatch");
    Graph g;
    const Tensor raw = Tensor::row(theta);
    const Var s = g.constant(Tensor::row(summary));
    const auto out = flow_.forward(g, params, g.constant(standardizer_.standardize(raw)), s);
    double quad = 0.0;
    for (double z : out.z.value().data()) quad += z * z;
    const double d = static_cast<double>(dim());
    return -0.5 * quad - 0.5 * d * std::log(2.0 * std::numbers::pi) + out.log_det.value().item() -
           standardizer_.log_scale_sum();
}

PosteriorDraws PosteriorNetwork::sample(const ParameterSet& params, std::span<const double> summary,
                                        std::size_t n_draws, Rng& rng) const {
    PosteriorDraws out;
    out.names = names_;
    out.dim = dim();
    out.draws = n_draws;
    if (n_draws == 0) return out;
    Tensor z = Tensor::matrix(n_draws, dim());
    for (auto& v : z.data()) v = rng.normal();
    const Tensor theta = standardizer_.destandardize(flow_.inverse(params, z, repeat_row(summary, n_draws)));
    out.values.assign(theta.data().begin(), theta.data().end());
    return out;
}

PosteriorDraws PosteriorNetwork::sample_for(const ParameterSet& params, const Tensor& encoded_rows,
                                            std::size_t n_draws, Rng& rng) const {
    const auto s = summary_.summarize(params, encoded_rows);
    return sample(params, s, n_draws, rng);
}

}  // namespace amortize::nets
