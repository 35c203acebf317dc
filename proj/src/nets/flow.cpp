#include "amortize/nets/flow.hpp"

#include "amortize/errors.hpp"
#include "amortize/sim/prior.hpp"

#include <cmath>
#include <numbers>

namespace amortize::nets {

void FlowConfig::validate() const {
    if (dim < 2) throw ConfigError("flow.dim must be at least 2");
    if (n_blocks < 1) throw ConfigError("flow.n_blocks must be at least 1");
    if (!(s_max > 0.0)) throw ConfigError("flow.s_max must be positive");
    if (condition_dim == 0) throw ConfigError("flow.condition_dim must be positive");
    for (auto w : hidden_widths)
        if (w == 0) throw ConfigError("flow.hidden_widths entries must be positive");
}

Standardizer Standardizer::from_prior(const sim::PriorSpec& prior, Rng& rng, std::size_t draws) {
    if (draws < 2) throw ContractError("standardizer needs at least two prior draws");
    const std::size_t d = prior.size();
    std::vector<double> sum(d, 0.0), sum_sq(d, 0.0);
    std::vector<std::vector<double>> samples;
    samples.reserve(draws);
    for (std::size_t i = 0; i < draws; ++i) samples.push_back(sim::sample_prior(prior, rng));
    Standardizer out;
    out.location.assign(d, 0.0);
    out.scale.assign(d, 0.0);
    for (const auto& s : samples)
        for (std::size_t j = 0; j < d; ++j) out.location[j] += s[j];
    for (auto& m : out.location) m /= static_cast<double>(draws);
    for (const auto& s : samples)
        for (std::size_t j = 0; j < d; ++j) out.scale[j] += (s[j] - out.location[j]) * (s[j] - out.location[j]);
    for (auto& v : out.scale) v = std::sqrt(v / static_cast<double>(draws - 1));
    out.validate();
    return out;
}

Standardizer Standardizer::identity(std::size_t dim) { return {std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0)}; }

void Standardizer::validate() const {
    if (location.size() != scale.size()) throw ConfigError("standardizer: location/scale size mismatch");
    for (double s : scale)
        if (!(s > 0.0) || !std::isfinite(s)) throw ConfigError("standardizer: scales must be positive and finite");
}

Tensor Standardizer::standardize(const Tensor& raw) const {
    if (raw.cols() != dim()) throw DimensionError("standardize: width mismatch");
    Tensor out({raw.rows(), raw.cols()});
    for (std::size_t r = 0; r < raw.rows(); ++r)
        for (std::size_t c = 0; c < raw.cols(); ++c) out(r, c) = (raw(r, c) - location[c]) / scale[c];
    return out;
}

Tensor Standardizer::destandardize(const Tensor& standardized) const {
    if (standardized.cols() != dim()) throw DimensionError("destandardize: width mismatch");
    Tensor out({standardized.rows(), standardized.cols()});
    for (std::size_t r = 0; r < standardized.rows(); ++r)
        for (std::size_t c = 0; c < standardized.cols(); ++c)
            out(r, c) = location[c] + scale[c] * standardized(r, c);
    return out;
}

double Standardizer::log_scale_sum() const {
    double s = 0.0;
    for (double v : scale) s += std::log(v);
    return s;
}

Tensor repeat_row(std::span<const double> row, std::size_t count) {
    Tensor out = Tensor::matrix(count, row.size());
    for (std::size_t r = 0; r < count; ++r)
        for (std::size_t c = 0; c < row.size(); ++c) out(r, c) = row[c];
    return out;
}

FlowNet::FlowNet(FlowConfig config, std::string prefix) : config_(std::move(config)), prefix_(std::move(prefix)) {
    config_.validate();
}

FlowNet::Halves FlowNet::halves(std::size_t block) const {
    const std::size_t h = config_.dim / 2;
    if (block % 2 == 0) return {0, h, h, config_.dim};
    return {h, config_.dim, 0, h};
}

std::string FlowNet::block_prefix(std::size_t block) const { return prefix_ + ".block" + std::to_string(block); }

void FlowNet::initialize(ParameterSet& params, Rng& rng) const {
    for (std::size_t k = 0; k < config_.n_blocks; ++k) {
        const auto hv = halves(k);
        const std::size_t fixed = hv.fixed_end - hv.fixed_begin;
        const std::size_t changed = hv.changed_end - hv.changed_begin;
        const std::string p = block_prefix(k);
        init_tanh_stack(params, p, fixed + config_.condition_dim, config_.hidden_widths, rng);
        const std::size_t last = config_.hidden_widths.empty() ? fixed + config_.condition_dim
                                                                : config_.hidden_widths.back();
        // Small output heads start every block close to the identity map.
        init_dense(params, p + ".scale", last, changed, rng, 0.1);
        init_dense(params, p + ".shift", last, changed, rng, 0.1);
    }
}

std::pair<Var, Var> FlowNet::coupling(Graph& g, const ParameterSet& params, std::size_t block, Var fixed,
                                      Var condition) const {
    const std::string p = block_prefix(block);
    const Var h = tanh_stack(g, params, p, diff::concat(fixed, condition), config_.hidden_widths.size());
    const Var raw_scale = dense(g, params, p + ".scale", h);
    const Var clamped =
        diff::scale(diff::atan(diff::scale(raw_scale, 1.0 / config_.s_max)), 2.0 * config_.s_max / std::numbers::pi);
    return {clamped, dense(g, params, p + ".shift", h)};
}

FlowOutput FlowNet::forward(Graph& g, const ParameterSet& params, Var theta, Var condition) const {
    if (theta.cols() != config_.dim) throw DimensionError("flow: parameter width mismatch");
    if (condition.cols() != config_.condition_dim) throw DimensionError("flow: condition width mismatch");
    if (theta.rows() != condition.rows()) throw DimensionError("flow: parameter/condition row mismatch");
    if (!theta.value().all_finite() || !condition.value().all_finite()) {
        throw NumericError("flow: non-finite input");
    }
    Var x = theta;
    Var log_det;
    for (std::size_t k = 0; k < config_.n_blocks; ++k) {
        const auto hv = halves(k);
        const Var fixed = diff::split(x, hv.fixed_begin, hv.fixed_end);
        const Var changed = diff::split(x, hv.changed_begin, hv.changed_end);
        const auto [log_scale, shift] = coupling(g, params, k, fixed, condition);
        const Var out = diff::add(diff::mul(changed, diff::exp(log_scale)), shift);
        x = hv.fixed_begin == 0 ? diff::concat(fixed, out) : diff::concat(out, fixed);
        const Var block_det = diff::sum_cols(log_scale);
        log_det = k == 0 ? block_det : diff::add(log_det, block_det);
    }
    return {x, log_det};
}

Tensor FlowNet::inverse(const ParameterSet& params, const Tensor& z, const Tensor& condition,
                        std::vector<double>* log_det) const {
    if (z.cols() != config_.dim) throw DimensionError("flow inverse: latent width mismatch");
    if (condition.cols() != config_.condition_dim || condition.rows() != z.rows()) {
        throw DimensionError("flow inverse: condition shape mismatch");
    }
    if (!z.all_finite() || !condition.all_finite()) throw NumericError("flow inverse: non-finite input");
    Graph g;
    Var x = g.constant(z);
    const Var cond = g.constant(condition);
    Var total;
    for (std::size_t k = config_.n_blocks; k-- > 0;) {
        const auto hv = halves(k);
        const Var fixed = diff::split(x, hv.fixed_begin, hv.fixed_end);
        const Var changed = diff::split(x, hv.changed_begin, hv.changed_end);
        const auto [log_scale, shift] = coupling(g, params, k, fixed, cond);
        const Var original = diff::mul(diff::sub(changed, shift), diff::exp(diff::neg(log_scale)));
        x = hv.fixed_begin == 0 ? diff::concat(fixed, original) : diff::concat(original, fixed);
        const Var block_det = diff::neg(diff::sum_cols(log_scale));
        total = k + 1 == config_.n_blocks ? block_det : diff::add(total, block_det);
    }
    if (log_det) {
        auto v = total.value().data();
        log_det->assign(v.begin(), v.end());
    }
    return x.value();
}

double FlowNet::log_det_bound() const {
    const std::size_t widest = config_.dim - config_.dim / 2;
    return static_cast<double>(config_.n_blocks * widest) * config_.s_max;
}

}  // namespace amortize::nets
