#include "amortize/app/checkpoint.hpp"

#include "amortize/errors.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace amortize::app {

using nlohmann::json;

namespace {

constexpr char kMagic[8] = {'A', 'M', 'Z', 'C', 'K', 'P', 'T', '\0'};

template <class T>
void put_le(std::vector<std::uint8_t>& out, T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    std::uint8_t buf[sizeof(T)];
    std::memcpy(buf, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(std::begin(buf), std::end(buf));
    out.insert(out.end(), std::begin(buf), std::end(buf));
}

template <class T>
T get_le(const std::uint8_t* p) {
    std::uint8_t buf[sizeof(T)];
    std::memcpy(buf, p, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(std::begin(buf), std::end(buf));
    T value;
    std::memcpy(&value, buf, sizeof(T));
    return value;
}

struct NamedTensor {
    std::string name;
    const diff::Tensor* tensor;
};

}  // namespace

std::string to_string(CheckpointKind kind) { return kind == CheckpointKind::Posterior ? "posterior" : "comparison"; }

std::vector<std::string> Checkpoint::model_kinds() const {
    if (kind == CheckpointKind::Posterior) return {config.model};
    return config.models;
}

nets::PosteriorNetwork Checkpoint::posterior_network() const {
    require_kind(*this, CheckpointKind::Posterior);
    const auto model = config.make_model(config.model);
    return nets::PosteriorNetwork(config.summary_for(*model), config.flow_for(*model), standardizer,
                                  model->prior().names());
}

nets::EvidentialNet Checkpoint::evidential_network() const {
    require_kind(*this, CheckpointKind::Comparison);
    return nets::EvidentialNet(config.evidential_config());
}

void require_kind(const Checkpoint& ckpt, CheckpointKind want) {
    if (ckpt.kind != want) {
        throw ConfigError("checkpoint holds " + to_string(ckpt.kind) + " networks but " + to_string(want) +
                          " networks are required");
    }
}

std::vector<std::uint8_t> serialize_checkpoint(const Checkpoint& ckpt) {
    std::vector<NamedTensor> tensors;
    for (const auto& [name, t] : ckpt.state.params) tensors.push_back({"param/" + name, &t});
    for (const auto& [name, t] : ckpt.state.adam.first_moment) tensors.push_back({"adam.m/" + name, &t});
    for (const auto& [name, t] : ckpt.state.adam.second_moment) tensors.push_back({"adam.v/" + name, &t});
    diff::Tensor loc, scale;
    if (ckpt.kind == CheckpointKind::Posterior) {
        loc = diff::Tensor::row(ckpt.standardizer.location);
        scale = diff::Tensor::row(ckpt.standardizer.scale);
        tensors.push_back({"standardizer/location", &loc});
        tensors.push_back({"standardizer/scale", &scale});
    }
    // Scalars that must survive bit-exactly travel in the payload as well.
    const diff::Tensor adam_scalars({4}, std::vector<double>{ckpt.state.adam.lr, ckpt.state.adam.beta1,
                                                             ckpt.state.adam.beta2, ckpt.state.adam.eps});
    tensors.push_back({"adam/hyper", &adam_scalars});

    json index = json::array();
    std::uint64_t offset = 0;
    for (const auto& nt : tensors) {
        index.push_back({{"name", nt.name}, {"shape", nt.tensor->shape()}, {"offset", offset}});
        offset += nt.tensor->size() * sizeof(double);
    }
    const json header{
        {"kind", to_string(ckpt.kind)},
        {"config", to_json(ckpt.config)},
        {"tensors", index},
        {"payload_bytes", offset},
        {"adam_step", ckpt.state.adam.step_count},
        {"iteration", ckpt.state.iteration},
        {"sim_trials", ckpt.state.sim_stats.trials},
        {"sim_timeouts", ckpt.state.sim_stats.timeouts},
    };
    const std::string header_text = header.dump();

    std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
    put_le<std::uint32_t>(out, kCheckpointVersion);
    put_le<std::uint64_t>(out, header_text.size());
    out.insert(out.end(), header_text.begin(), header_text.end());
    out.reserve(out.size() + offset + 8);
    for (const auto& nt : tensors)
        for (double v : nt.tensor->data()) put_le<double>(out, v);
    put_le<std::uint64_t>(out, fnv1a(out.data(), out.size()));
    return out;
}

Checkpoint deserialize_checkpoint(const std::vector<std::uint8_t>& bytes) {
    constexpr std::size_t kFixed = 8 + 4 + 8;
    if (bytes.size() < kFixed + 8) throw CorruptionError("checkpoint is truncated");
    if (std::memcmp(bytes.data(), kMagic, 8) != 0) throw CorruptionError("not a checkpoint file (bad magic)");
    const std::size_t body = bytes.size() - 8;
    if (get_le<std::uint64_t>(bytes.data() + body) != fnv1a(bytes.data(), body)) {
        throw CorruptionError("checkpoint checksum mismatch (file is corrupted or truncated)");
    }
    const auto version = get_le<std::uint32_t>(bytes.data() + 8);
    if (version != kCheckpointVersion) {
        throw UnsupportedVersionError("checkpoint format version " + std::to_string(version) +
                                      " is not supported (expected " + std::to_string(kCheckpointVersion) + ")");
    }
    const auto header_len = get_le<std::uint64_t>(bytes.data() + 12);
    if (header_len > body - kFixed) throw CorruptionError("checkpoint header length exceeds file size");

    json header;
    try {
        header = json::parse(bytes.begin() + kFixed, bytes.begin() + static_cast<std::ptrdiff_t>(kFixed + header_len));
    } catch (const json::exception& e) {
        throw CorruptionError(std::string("checkpoint header is not valid JSON: ") + e.what());
    }
    const std::uint8_t* payload = bytes.data() + kFixed + header_len;
    const std::size_t payload_size = body - kFixed - header_len;

    Checkpoint ckpt;
    try {
        const auto kind = header.at("kind").get<std::string>();
        if (kind == "posterior") {
            ckpt.kind = CheckpointKind::Posterior;
        } else if (kind == "comparison") {
            ckpt.kind = CheckpointKind::Comparison;
        } else {
            throw CorruptionError("checkpoint has unknown kind '" + kind + "'");
        }
        ckpt.config = parse_config(header.at("config"));
        if (header.at("payload_bytes").get<std::uint64_t>() != payload_size) {
            throw CorruptionError("checkpoint payload size does not match its index");
        }
        ckpt.state.adam.step_count = header.at("adam_step").get<std::uint64_t>();
        ckpt.state.iteration = header.at("iteration").get<std::uint64_t>();
        ckpt.state.sim_stats.trials = header.at("sim_trials").get<std::uint64_t>();
        ckpt.state.sim_stats.timeouts = header.at("sim_timeouts").get<std::uint64_t>();

        for (const auto& entry : header.at("tensors")) {
            const auto name = entry.at("name").get<std::string>();
            const auto shape = entry.at("shape").get<diff::Shape>();
            const auto offset = entry.at("offset").get<std::uint64_t>();
            std::size_t count = 1;
            for (auto e : shape) count *= e;
            if (offset > payload_size || count * sizeof(double) > payload_size - offset) {
                throw CorruptionError("tensor '" + name + "' extends beyond the payload");
            }
            std::vector<double> values(count);
            for (std::size_t i = 0; i < count; ++i) values[i] = get_le<double>(payload + offset + i * sizeof(double));
            diff::Tensor t(shape, std::move(values));
            if (name.starts_with("param/")) {
                ckpt.state.params.emplace(name.substr(6), std::move(t));
            } else if (name.starts_with("adam.m/")) {
                ckpt.state.adam.first_moment.emplace(name.substr(7), std::move(t));
            } else if (name.starts_with("adam.v/")) {
                ckpt.state.adam.second_moment.emplace(name.substr(7), std::move(t));
            } else if (name == "standardizer/location") {
                ckpt.standardizer.location.assign(t.data().begin(), t.data().end());
            } else if (name == "standardizer/scale") {
                ckpt.standardizer.scale.assign(t.data().begin(), t.data().end());
            } else if (name == "adam/hyper") {
                if (t.size() != 4) throw CorruptionError("adam hyperparameters have the wrong size");
                ckpt.state.adam.lr = t[0];
                ckpt.state.adam.beta1 = t[1];
                ckpt.state.adam.beta2 = t[2];
                ckpt.state.adam.eps = t[3];
            } else {
                throw CorruptionError("checkpoint contains unknown tensor '" + name + "'");
            }
        }
    } catch (const json::exception& e) {
        throw CorruptionError(std::string("checkpoint header is malformed: ") + e.what());
    } catch (const DimensionError& e) {
        throw CorruptionError(std::string("checkpoint tensor index is inconsistent: ") + e.what());
    }
    return ckpt;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
    const auto bytes = serialize_checkpoint(ckpt);
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    const auto tmp = std::filesystem::path(path.string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot write checkpoint '" + path.string() + "'");
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw ConfigError("failed writing checkpoint '" + path.string() + "'");
    }
    std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open checkpoint '" + path.string() + "'");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return deserialize_checkpoint(bytes);
}

Checkpoint new_posterior_checkpoint(const Config& config) {
    Checkpoint ckpt;
    ckpt.kind = CheckpointKind::Posterior;
    ckpt.config = config;
    const auto model = config.make_model(config.model);
    Rng rng(split_seed(config.seed, 0x5eed));
    ckpt.standardizer = nets::Standardizer::from_prior(model->prior(), rng, config.standardizer_draws);
    ckpt.state.adam.lr = config.train.lr;
    ckpt.posterior_network().initialize(ckpt.state.params, rng);
    return ckpt;
}

Checkpoint new_comparison_checkpoint(const Config& config) {
    Checkpoint ckpt;
    ckpt.kind = CheckpointKind::Comparison;
    ckpt.config = config;
    Rng rng(split_seed(config.seed, 0xc0de));
    ckpt.state.adam.lr = config.train.lr;
    ckpt.evidential_network().initialize(ckpt.state.params, rng);
    return ckpt;
}

}  // namespace amortize::app
