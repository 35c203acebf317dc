#pragma once

#include "amortize/random.hpp"

#include <string>
#include <vector>

namespace amortize::sim {

enum class PriorKind { Uniform, Normal };

/// One independent prior component. For Uniform, (first, second) = (lower, upper);
/// for Normal, (first, second) = (mean, sd).
struct PriorComponent {
    std::string name;
    PriorKind kind = PriorKind::Uniform;
    double first = 0.0;
    double second = 1.0;
    std::string unit;

    double mean() const;
    double sd() const;
};

class PriorSpec {
public:
    PriorSpec() = default;
    explicit PriorSpec(std::vector<PriorComponent> components);

    /// Throws ConfigError on non-finite bounds, lower >= upper, sd <= 0 or duplicate names.
    void validate() const;

    std::size_t size() const noexcept { return components_.size(); }
    const std::vector<PriorComponent>& components() const noexcept { return components_; }
    std::vector<PriorComponent>& components() noexcept { return components_; }
    const PriorComponent& at(std::size_t i) const { return components_.at(i); }
    std::vector<std::string> names() const;
    /// Index of the component called `name`; throws ConfigError if absent.
    std::size_t index_of(const std::string& name) const;

private:
    std::vector<PriorComponent> components_;
};

/// Independent draw of every component, in declaration order.
std::vector<double> sample_prior(const PriorSpec& spec, Rng& rng);

}  // namespace amortize::sim
