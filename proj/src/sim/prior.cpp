#include "amortize/sim/prior.hpp"

#include "amortize/errors.hpp"

#include <cmath>
#include <numbers>
#include <set>

namespace amortize::sim {

double PriorComponent::mean() const { return kind == PriorKind::Uniform ? 0.5 * (first + second) : first; }

double PriorComponent::sd() const {
    return kind == PriorKind::Uniform ? (second - first) / std::sqrt(12.0) : second;
}

PriorSpec::PriorSpec(std::vector<PriorComponent> components) : components_(std::move(components)) { validate(); }

void PriorSpec::validate() const {
    if (components_.empty()) throw ConfigError("prior: no components");
    std::set<std::string> seen;
    for (const auto& c : components_) {
        if (c.name.empty()) throw ConfigError("prior: component with empty name");
        if (!seen.insert(c.name).second) throw ConfigError("prior: duplicate parameter name '" + c.name + "'");
        if (!std::isfinite(c.first) || !std::isfinite(c.second)) {
            throw ConfigError("prior." + c.name + ": bounds must be finite");
        }
        if (c.kind == PriorKind::Uniform && !(c.first < c.second)) {
            throw ConfigError("prior." + c.name + ": uniform lower bound must be below upper bound");
        }
        if (c.kind == PriorKind::Normal && !(c.second > 0.0)) {
            throw ConfigError("prior." + c.name + ": normal sd must be positive");
        }
    }
}

std::vector<std::string> PriorSpec::names() const {
    std::vector<std::string> out;
    for (const auto& c : components_) out.push_back(c.name);
    return out;
}

std::size_t PriorSpec::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < components_.size(); ++i)
        if (components_[i].name == name) return i;
    throw ConfigError("prior: no parameter named '" + name + "'");
}

std::vector<double> sample_prior(const PriorSpec& spec, Rng& rng) {
    std::vector<double> out;
    out.reserve(spec.size());
    for (const auto& c : spec.components()) {
        out.push_back(c.kind == PriorKind::Uniform ? rng.uniform(c.first, c.second) : rng.normal(c.first, c.second));
    }
    return out;
}

}  // namespace amortize::sim
