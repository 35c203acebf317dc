#include "amortize/app/config.hpp"

#include "amortize/errors.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace amortize::app {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) { throw ConfigError(path + ": " + what); }

void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) fail(path, "expected an object");
    const std::set<std::string> keys(allowed.begin(), allowed.end());
    for (const auto& [k, v] : obj.items())
        if (!keys.contains(k)) fail(path + "." + k, "unknown key");
}

double get_number(const json& obj, const char* key, double fallback, const std::string& path) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number()) fail(path + "." + key, "expected a number");
    return v.get<double>();
}

std::uint64_t get_count(const json& obj, const char* key, std::uint64_t fallback, const std::string& path) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0) fail(path + "." + key, "expected a non-negative integer");
    return v.get<std::uint64_t>();
}

bool get_bool(const json& obj, const char* key, bool fallback, const std::string& path) {
    if (!obj.contains(key)) return fallback;
    if (!obj.at(key).is_boolean()) fail(path + "." + key, "expected true or false");
    return obj.at(key).get<bool>();
}

std::vector<std::size_t> get_widths(const json& obj, const char* key, std::vector<std::size_t> fallback,
                                    const std::string& path) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_array()) fail(path + "." + key, "expected an array of positive integers");
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number_integer() || v[i].get<std::int64_t>() <= 0) {
            fail(path + "." + key + "[" + std::to_string(i) + "]", "expected a positive integer");
        }
        out.push_back(v[i].get<std::size_t>());
    }
    return out;
}

nets::SummaryConfig parse_summary(const json& obj, nets::SummaryConfig base, const std::string& path) {
    reject_unknown(obj, path, {"encoder_widths", "decoder_widths", "summary_dim", "include_log_n"});
    base.encoder_widths = get_widths(obj, "encoder_widths", base.encoder_widths, path);
    base.decoder_widths = get_widths(obj, "decoder_widths", base.decoder_widths, path);
    base.summary_dim = get_count(obj, "summary_dim", base.summary_dim, path);
    base.include_log_n = get_bool(obj, "include_log_n", base.include_log_n, path);
    if (base.encoder_widths.empty()) fail(path + ".encoder_widths", "must not be empty");
    if (base.summary_dim == 0) fail(path + ".summary_dim", "must be positive");
    return base;
}

json summary_to_json(const nets::SummaryConfig& s) {
    return {{"encoder_widths", s.encoder_widths},
            {"decoder_widths", s.decoder_widths},
            {"summary_dim", s.summary_dim},
            {"include_log_n", s.include_log_n}};
}

const std::set<std::string> kKinds = {"lfm", "ddm", "gaussian"};

void check_kind(const std::string& kind, const std::string& path) {
    if (!kKinds.contains(kind)) fail(path, "unknown model '" + kind + "' (expected lfm, ddm or gaussian)");
}

}  // namespace

std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t seed) {
    auto h = seed;
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < size; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t value) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

json prior_to_json(const sim::PriorSpec& prior) {
    json out = json::array();
    for (const auto& c : prior.components()) {
        json e{{"name", c.name}, {"unit", c.unit}};
        if (c.kind == sim::PriorKind::Uniform) {
            e["uniform"] = {c.first, c.second};
        } else {
            e["normal"] = {c.first, c.second};
        }
        out.push_back(std::move(e));
    }
    return out;
}

sim::PriorSpec prior_from_json(const json& doc, const std::string& path) {
    if (!doc.is_array()) fail(path, "expected an array of prior components");
    std::vector<sim::PriorComponent> comps;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const std::string p = path + "[" + std::to_string(i) + "]";
        const auto& e = doc[i];
        reject_unknown(e, p, {"name", "unit", "uniform", "normal"});
        if (!e.contains("name") || !e["name"].is_string()) fail(p + ".name", "expected a string");
        sim::PriorComponent c;
        c.name = e["name"].get<std::string>();
        c.unit = e.value("unit", "");
        const bool uni = e.contains("uniform");
        const bool nor = e.contains("normal");
        if (uni == nor) fail(p, "exactly one of 'uniform' or 'normal' is required");
        const auto& bounds = uni ? e["uniform"] : e["normal"];
        if (!bounds.is_array() || bounds.size() != 2 || !bounds[0].is_number() || !bounds[1].is_number()) {
            fail(p + (uni ? ".uniform" : ".normal"), "expected two numbers");
        }
        c.kind = uni ? sim::PriorKind::Uniform : sim::PriorKind::Normal;
        c.first = bounds[0].get<double>();
        c.second = bounds[1].get<double>();
        comps.push_back(std::move(c));
    }
    try {
        return sim::PriorSpec(std::move(comps));
    } catch (const ConfigError& e) {
        fail(path, e.what());
    }
}

const sim::PriorSpec& Config::prior_for(const std::string& kind) const {
    auto it = priors.find(kind);
    if (it == priors.end()) throw ConfigError("config.priors: no prior for model '" + kind + "'");
    return it->second;
}

std::unique_ptr<sim::SimulationModel> Config::make_model(const std::string& kind) const {
    return sim::make_model(kind, prior_for(kind), simulator);
}

nets::SummaryConfig Config::summary_for(const sim::SimulationModel& m) const {
    auto s = summary;
    s.input_dim = m.input_dim();
    return s;
}

nets::FlowConfig Config::flow_for(const sim::SimulationModel& m) const {
    auto f = flow;
    f.dim = m.parameter_dim();
    f.condition_dim = summary.summary_dim;
    return f;
}

nets::EvidentialConfig Config::evidential_config() const {
    nets::EvidentialConfig e;
    e.n_models = models.size();
    e.summary = evidential_summary;
    e.summary.input_dim = nets::kTrialFeatures;
    e.head_widths = evidential_head;
    return e;
}

Config parse_config(const json& doc) {
    const std::string root = "config";
    reject_unknown(doc, root,
                   {"model", "models", "priors", "simulator", "summary", "flow", "evidential", "train", "simulate",
                    "seed", "standardizer_draws"});
    Config c;
    if (doc.contains("model")) {
        if (!doc["model"].is_string()) fail(root + ".model", "expected a string");
        c.model = doc["model"].get<std::string>();
    }
    check_kind(c.model, root + ".model");
    if (doc.contains("models")) {
        const auto& ms = doc["models"];
        if (!ms.is_array() || ms.size() < 2) fail(root + ".models", "expected an array of at least two model names");
        c.models.clear();
        for (std::size_t i = 0; i < ms.size(); ++i) {
            const std::string p = root + ".models[" + std::to_string(i) + "]";
            if (!ms[i].is_string()) fail(p, "expected a string");
            c.models.push_back(ms[i].get<std::string>());
            check_kind(c.models.back(), p);
            if (c.models.back() == "gaussian") fail(p, "model comparison supports response-time models only");
        }
    }
    for (const auto& k : kKinds) c.priors.emplace(k, sim::default_prior(k));
    if (doc.contains("priors")) {
        const auto& pr = doc["priors"];
        if (!pr.is_object()) fail(root + ".priors", "expected an object keyed by model name");
        for (const auto& [kind, spec] : pr.items()) {
            check_kind(kind, root + ".priors." + kind);
            c.priors[kind] = prior_from_json(spec, root + ".priors." + kind);
        }
    }
    if (doc.contains("simulator")) {
        const auto& s = doc["simulator"];
        const std::string p = root + ".simulator";
        reject_unknown(s, p, {"dt", "t_max", "max_timeout_fraction"});
        c.simulator.dt = get_number(s, "dt", c.simulator.dt, p);
        c.simulator.t_max = get_number(s, "t_max", c.simulator.t_max, p);
        c.simulator.max_timeout_fraction = get_number(s, "max_timeout_fraction", c.simulator.max_timeout_fraction, p);
    }
    if (!(c.simulator.dt > 0.0)) fail(root + ".simulator.dt", "must be positive");
    if (!(c.simulator.t_max > c.simulator.dt)) fail(root + ".simulator.t_max", "must exceed dt");
    if (!(c.simulator.max_timeout_fraction >= 0.0 && c.simulator.max_timeout_fraction <= 1.0)) {
        fail(root + ".simulator.max_timeout_fraction", "must lie in [0, 1]");
    }
    if (doc.contains("summary")) c.summary = parse_summary(doc["summary"], c.summary, root + ".summary");
    if (doc.contains("flow")) {
        const auto& f = doc["flow"];
        const std::string p = root + ".flow";
        reject_unknown(f, p, {"n_blocks", "hidden_widths", "s_max"});
        c.flow.n_blocks = get_count(f, "n_blocks", c.flow.n_blocks, p);
        c.flow.hidden_widths = get_widths(f, "hidden_widths", c.flow.hidden_widths, p);
        c.flow.s_max = get_number(f, "s_max", c.flow.s_max, p);
        if (c.flow.n_blocks < 1) fail(p + ".n_blocks", "must be at least 1");
        if (!(c.flow.s_max > 0.0)) fail(p + ".s_max", "must be positive");
    }
    if (doc.contains("evidential")) {
        const auto& e = doc["evidential"];
        const std::string p = root + ".evidential";
        reject_unknown(e, p, {"summary", "head_widths"});
        if (e.contains("summary")) c.evidential_summary = parse_summary(e["summary"], c.evidential_summary, p + ".summary");
        c.evidential_head = get_widths(e, "head_widths", c.evidential_head, p);
    }
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned() && !doc["seed"].is_number_integer()) fail(root + ".seed", "expected an integer");
        c.seed = doc["seed"].get<std::uint64_t>();
    }
    c.train.seed = c.seed;
    if (doc.contains("train")) {
        const auto& t = doc["train"];
        const std::string p = root + ".train";
        reject_unknown(t, p,
                       {"iterations", "batch_size", "n_range", "lr", "lr_decay", "decay_interval", "checkpoint_every",
                        "threads"});
        c.train.iterations = get_count(t, "iterations", c.train.iterations, p);
        c.train.batch_size = get_count(t, "batch_size", c.train.batch_size, p);
        if (t.contains("n_range")) {
            const auto& r = t["n_range"];
            if (!r.is_array() || r.size() != 2 || !r[0].is_number_integer() || !r[1].is_number_integer()) {
                fail(p + ".n_range", "expected [lo, hi]");
            }
            const auto lo = r[0].get<std::int64_t>();
            const auto hi = r[1].get<std::int64_t>();
            if (lo < 1 || lo > hi) fail(p + ".n_range", "must satisfy 1 <= lo <= hi");
            c.train.n_range = {static_cast<std::size_t>(lo), static_cast<std::size_t>(hi)};
        }
        c.train.lr = get_number(t, "lr", c.train.lr, p);
        c.train.lr_decay = get_number(t, "lr_decay", c.train.lr_decay, p);
        c.train.decay_interval = get_count(t, "decay_interval", c.train.decay_interval, p);
        c.train.checkpoint_every = get_count(t, "checkpoint_every", c.train.checkpoint_every, p);
        c.train.threads = get_count(t, "threads", c.train.threads, p);
        if (c.train.iterations < 1) fail(p + ".iterations", "must be at least 1");
        if (c.train.batch_size < 1) fail(p + ".batch_size", "must be at least 1");
        if (!(c.train.lr > 0.0)) fail(p + ".lr", "must be positive");
        if (!(c.train.lr_decay > 0.0 && c.train.lr_decay <= 1.0)) fail(p + ".lr_decay", "must lie in (0, 1]");
        if (c.train.decay_interval < 1) fail(p + ".decay_interval", "must be at least 1");
        if (c.train.threads < 1) fail(p + ".threads", "must be at least 1");
    }
    c.train.max_timeout_fraction = c.simulator.max_timeout_fraction;
    if (doc.contains("simulate")) {
        const auto& s = doc["simulate"];
        const std::string p = root + ".simulate";
        reject_unknown(s, p, {"participants", "n_per_condition"});
        c.simulate.participants = get_count(s, "participants", c.simulate.participants, p);
        c.simulate.n_per_condition = get_count(s, "n_per_condition", c.simulate.n_per_condition, p);
        if (c.simulate.participants < 1) fail(p + ".participants", "must be at least 1");
        if (c.simulate.n_per_condition < 1) fail(p + ".n_per_condition", "must be at least 1");
    }
    c.standardizer_draws = get_count(doc, "standardizer_draws", c.standardizer_draws, root);
    if (c.standardizer_draws < 2) fail(root + ".standardizer_draws", "must be at least 2");

    // Dimension checks that depend on the chosen model.
    const auto model = c.make_model(c.model);
    if (c.summary.summary_dim < model->parameter_dim()) {
        fail(root + ".summary.summary_dim", "must be at least the parameter count (" +
                                                std::to_string(model->parameter_dim()) + ")");
    }
    for (const auto& k : c.models) (void)c.make_model(k);
    return c;
}

Config load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file '" + path.string() + "' is not valid JSON: " + e.what());
    }
    return parse_config(doc);
}

json to_json(const Config& c) {
    json priors = json::object();
    for (const auto& [k, p] : c.priors) priors[k] = prior_to_json(p);
    return {
        {"model", c.model},
        {"models", c.models},
        {"priors", priors},
        {"simulator",
         {{"dt", c.simulator.dt}, {"t_max", c.simulator.t_max}, {"max_timeout_fraction", c.simulator.max_timeout_fraction}}},
        {"summary", summary_to_json(c.summary)},
        {"flow", {{"n_blocks", c.flow.n_blocks}, {"hidden_widths", c.flow.hidden_widths}, {"s_max", c.flow.s_max}}},
        {"evidential", {{"summary", summary_to_json(c.evidential_summary)}, {"head_widths", c.evidential_head}}},
        {"train",
         {{"iterations", c.train.iterations},
          {"batch_size", c.train.batch_size},
          {"n_range", {c.train.n_range.lo, c.train.n_range.hi}},
          {"lr", c.train.lr},
          {"lr_decay", c.train.lr_decay},
          {"decay_interval", c.train.decay_interval},
          {"checkpoint_every", c.train.checkpoint_every},
          {"threads", c.train.threads}}},
        {"simulate", {{"participants", c.simulate.participants}, {"n_per_condition", c.simulate.n_per_condition}}},
        {"seed", c.seed},
        {"standardizer_draws", c.standardizer_draws},
    };
}

}  // namespace amortize::app
