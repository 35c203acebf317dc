#pragma once

#include "amortize/nets/evidential.hpp"
#include "amortize/nets/flow.hpp"
#include "amortize/nets/summary.hpp"
#include "amortize/sim/lfm.hpp"
#include "amortize/sim/model.hpp"
#include "amortize/sim/prior.hpp"
#include "amortize/train/trainer.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace amortize::app {

struct SimulateSettings {
    std::size_t participants = 10;
    std::size_t n_per_condition = 100;
};

/// Complete run configuration. Every field has a default; a JSON document
/// overrides any subset.
struct Config {
    std::string model = "lfm";                          // parameter estimation target
    std::vector<std::string> models{"ddm", "lfm"};      // model comparison candidates
    std::map<std::string, sim::PriorSpec> priors;       // by model kind; defaults filled in
    sim::SimulatorSettings simulator{};
    nets::SummaryConfig summary{};
    nets::FlowConfig flow{};
    nets::SummaryConfig evidential_summary{};
    std::vector<std::size_t> evidential_head{64};
    train::TrainConfig train{};
    SimulateSettings simulate{};
    std::uint64_t seed = 42;
    std::size_t standardizer_draws = 10000;

    const sim::PriorSpec& prior_for(const std::string& kind) const;
    std::unique_ptr<sim::SimulationModel> make_model(const std::string& kind) const;

    /// Summary and flow configs completed with the dimensions implied by `model`.
    nets::SummaryConfig summary_for(const sim::SimulationModel& m) const;
    nets::FlowConfig flow_for(const sim::SimulationModel& m) const;
    nets::EvidentialConfig evidential_config() const;
};

/// Parses and validates a config document; errors name the offending path,
/// e.g. "config.train.batch_size: must be at least 1".
Config parse_config(const nlohmann::json& doc);
Config load_config(const std::filesystem::path& path);
nlohmann::json to_json(const Config& config);

nlohmann::json prior_to_json(const sim::PriorSpec& prior);
sim::PriorSpec prior_from_json(const nlohmann::json& doc, const std::string& path);

/// FNV-1a 64-bit hash.
std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t value);

}  // namespace amortize::app
