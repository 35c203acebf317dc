#include "amortize/sim/model.hpp"

#include "amortize/errors.hpp"
#include "amortize/nets/summary.hpp"
#include "amortize/sim/gaussian_oracle.hpp"

namespace amortize::sim {

namespace {

PriorComponent uniform(std::string name, double lo, double hi, std::string unit) {
    return {std::move(name), PriorKind::Uniform, lo, hi, std::move(unit)};
}

template <std::size_t K>
std::array<std::size_t, K> resolve(const PriorSpec& prior, const std::array<const char*, K>& names) {
    if (prior.size() != K) {
        throw ConfigError("prior: expected " + std::to_string(K) + " parameters, got " + std::to_string(prior.size()));
    }
    std::array<std::size_t, K> idx{};
    for (std::size_t i = 0; i < K; ++i) idx[i] = prior.index_of(names[i]);
    return idx;
}

void check_width(std::span<const double> theta, std::size_t want, const char* model) {
    if (theta.size() != want) {
        throw DimensionError(std::string(model) + ": expected " + std::to_string(want) + " parameters, got " +
                             std::to_string(theta.size()));
    }
}

constexpr std::array<const char*, 8> kLfmNames = {"v1", "v2", "v3", "v4", "alpha", "a", "zr", "t0"};
constexpr std::array<const char*, 7> kDdmNames = {"v1", "v2", "v3", "v4", "a", "zr", "t0"};

}  // namespace

PriorSpec default_lfm_prior() {
    return PriorSpec({
        uniform("v1", -6.0, 6.0, "evidence/s"),
        uniform("v2", -6.0, 6.0, "evidence/s"),
        uniform("v3", -6.0, 6.0, "evidence/s"),
        uniform("v4", -6.0, 6.0, "evidence/s"),
        uniform("alpha", 1.0, 2.0, ""),
        uniform("a", 0.6, 3.0, "evidence"),
        uniform("zr", 0.3, 0.7, ""),
        uniform("t0", 0.2, 0.6, "s"),
    });
}

PriorSpec default_ddm_prior() {
    return PriorSpec({
        uniform("v1", -6.0, 6.0, "evidence/s"),
        uniform("v2", -6.0, 6.0, "evidence/s"),
        uniform("v3", -6.0, 6.0, "evidence/s"),
        uniform("v4", -6.0, 6.0, "evidence/s"),
        uniform("a", 0.6, 3.0, "evidence"),
        uniform("zr", 0.3, 0.7, ""),
        uniform("t0", 0.2, 0.6, "s"),
    });
}

PriorSpec default_gaussian_prior() {
    return PriorSpec({
        {"mu1", PriorKind::Normal, 0.0, 1.0, ""},
        {"mu2", PriorKind::Normal, 0.0, 1.0, ""},
    });
}

PriorSpec default_prior(const std::string& kind) {
    if (kind == "lfm") return default_lfm_prior();
    if (kind == "ddm") return default_ddm_prior();
    if (kind == "gaussian") return default_gaussian_prior();
    throw ConfigError("unknown model kind '" + kind + "' (expected lfm, ddm or gaussian)");
}

std::unique_ptr<SimulationModel> make_model(const std::string& kind, const PriorSpec& prior,
                                            const SimulatorSettings& settings) {
    if (kind == "lfm") return std::make_unique<LevyFlightModel>(prior, settings);
    if (kind == "ddm") return std::make_unique<DiffusionModel>(prior, settings);
    if (kind == "gaussian") return std::make_unique<GaussianToyModel>(prior);
    throw ConfigError("unknown model kind '" + kind + "' (expected lfm, ddm or gaussian)");
}

LevyFlightModel::LevyFlightModel(PriorSpec prior, SimulatorSettings settings)
    : prior_(std::move(prior)), settings_(settings) {
    prior_.validate();
    index_ = resolve(prior_, kLfmNames);
}

LfmParams LevyFlightModel::params_from(std::span<const double> theta) const {
    check_width(theta, 8, "lfm");
    LfmParams p;
    for (std::size_t c = 0; c < kConditions; ++c) p.v[c] = theta[index_[c]];
    p.alpha = theta[index_[4]];
    p.a = theta[index_[5]];
    p.zr = theta[index_[6]];
    p.t0 = theta[index_[7]];
    return p;
}

TrialTable LevyFlightModel::simulate_table(std::span<const double> theta, std::size_t n, Rng& rng,
                                           SimStats& stats) const {
    return simulate_trials(params_from(theta), n, settings_, rng, stats);
}

diff::Tensor LevyFlightModel::simulate_encoded(std::span<const double> theta, std::size_t n, Rng& rng,
                                               SimStats& stats) const {
    return nets::encode_trials(simulate_table(theta, n, rng, stats));
}

DiffusionModel::DiffusionModel(PriorSpec prior, SimulatorSettings settings)
    : prior_(std::move(prior)), settings_(settings) {
    prior_.validate();
    index_ = resolve(prior_, kDdmNames);
}

LfmParams DiffusionModel::params_from(std::span<const double> theta) const {
    check_width(theta, 7, "ddm");
    LfmParams p;
    for (std::size_t c = 0; c < kConditions; ++c) p.v[c] = theta[index_[c]];
    p.alpha = 2.0;
    p.a = theta[index_[4]];
    p.zr = theta[index_[5]];
    p.t0 = theta[index_[6]];
    return p;
}

TrialTable DiffusionModel::simulate_table(std::span<const double> theta, std::size_t n, Rng& rng,
                                          SimStats& stats) const {
    return simulate_trials(params_from(theta), n, settings_, rng, stats);
}

diff::Tensor DiffusionModel::simulate_encoded(std::span<const double> theta, std::size_t n, Rng& rng,
                                              SimStats& stats) const {
    return nets::encode_trials(simulate_table(theta, n, rng, stats));
}

GaussianToyModel::GaussianToyModel(PriorSpec prior) : prior_(std::move(prior)) {
    prior_.validate();
    if (prior_.size() != 2) throw ConfigError("gaussian: expected 2 parameters");
}

diff::Tensor GaussianToyModel::simulate_encoded(std::span<const double> theta, std::size_t n, Rng& rng,
                                                SimStats& stats) const {
    check_width(theta, 2, "gaussian");
    if (n == 0) throw ContractError("gaussian: a dataset needs at least one observation");
    const auto first = gaussian_oracle_simulate(theta[0], n, rng);
    const auto second = gaussian_oracle_simulate(theta[1], n, rng);
    diff::Tensor out = diff::Tensor::matrix(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
        out(i, 0) = first[i];
        out(i, 1) = second[i];
    }
    stats.trials += n;
    return out;
}

}  // namespace amortize::sim
