#pragma once

#include "amortize/app/config.hpp"
#include "amortize/nets/evidential.hpp"
#include "amortize/nets/posterior.hpp"
#include "amortize/train/trainer.hpp"

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace amortize::app {

inline constexpr std::uint32_t kCheckpointVersion = 1;

enum class CheckpointKind { Posterior, Comparison };

std::string to_string(CheckpointKind kind);

/// Trained networks plus everything needed to rebuild and resume them.
///
/// File layout (all integers little-endian):
///   8 bytes   magic "AMZCKPT\0"
///   u32       format version
///   u64       header length H
///   H bytes   JSON header: kind, config echo, tensor index (name, shape, byte offset)
///   ...       payload: float64 little-endian values of every indexed tensor
///   u64       FNV-1a 64 checksum of all preceding bytes
struct Checkpoint {
    CheckpointKind kind = CheckpointKind::Posterior;
    Config config;
    nets::Standardizer standardizer;  // posterior checkpoints only
    train::TrainingState state;

    /// Model kind(s) the networks were trained on.
    std::vector<std::string> model_kinds() const;

    nets::PosteriorNetwork posterior_network() const;
    nets::EvidentialNet evidential_network() const;
};

std::vector<std::uint8_t> serialize_checkpoint(const Checkpoint& ckpt);
/// Throws CorruptionError on truncation or checksum mismatch and
/// UnsupportedVersionError for other format versions.
Checkpoint deserialize_checkpoint(const std::vector<std::uint8_t>& bytes);

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Throws ConfigError unless the checkpoint holds networks of `want`.
void require_kind(const Checkpoint& ckpt, CheckpointKind want);

/// Fresh posterior checkpoint: standardizer from prior draws and initialized weights.
Checkpoint new_posterior_checkpoint(const Config& config);
Checkpoint new_comparison_checkpoint(const Config& config);

}  // namespace amortize::app
