#include "amortize/app/cli.hpp"

#include "amortize/app/checkpoint.hpp"
#include "amortize/app/config.hpp"
#include "amortize/app/csv.hpp"
#include "amortize/app/infer.hpp"
#include "amortize/diag/diagnostics.hpp"
#include "amortize/errors.hpp"
#include "amortize/nets/summary.hpp"
#include "amortize/sim/batch.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <optional>
#include <sstream>

namespace amortize::app {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Options {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::string checkpoint;
    std::vector<std::string> data;
    std::size_t draws = 1000;
    std::optional<std::uint64_t> iterations;
    std::string resume;
    std::size_t replications = 0;
    std::size_t n = 200;
    std::vector<std::size_t> n_grid{50, 200, 800};
    std::size_t threads = 0;
};

struct RunContext {
    std::string command;
    std::vector<std::string> argv;
    Options opt;
    std::ostream& out;
    json outputs = json::array();

    std::size_t threads() const { return opt.threads ? opt.threads : sim::default_threads(); }

    fs::path path(const std::string& name) {
        outputs.push_back(name);
        return fs::path(opt.out_dir) / name;
    }
};

Config resolve_config(const Options& opt) {
    Config c = opt.config_path.empty() ? parse_config(json::object()) : load_config(opt.config_path);
    if (opt.seed) {
        c.seed = *opt.seed;
        c.train.seed = *opt.seed;
    }
    if (opt.iterations) c.train.iterations = *opt.iterations;
    if (c.train.iterations < 1) throw ConfigError("--iterations: must be at least 1");
    return c;
}

void write_manifest(RunContext& ctx, const Config& config, const json& extra) {
    const std::string config_text = to_json(config).dump();
    json m{
        {"command", ctx.command},
        {"argv", ctx.argv},
        {"config", to_json(config)},
        {"config_hash", hex64(fnv1a(config_text.data(), config_text.size()))},
        {"seed", config.seed},
        {"threads", ctx.threads()},
        {"version", "0.1.0"},
        {"checkpoint_format", kCheckpointVersion},
        {"compiler", __VERSION__},
        {"started_utc", static_cast<std::int64_t>(std::time(nullptr))},
        {"outputs", ctx.outputs},
    };
    for (const auto& [k, v] : extra.items()) m[k] = v;
    write_text(fs::path(ctx.opt.out_dir) / "manifest.json", m.dump(2) + "\n");
}

std::vector<std::string> theta_header(const sim::SimulationModel& model) { return model.prior().names(); }

std::string participant_name(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "participant_%04zu.csv", i + 1);
    return buf;
}

int cmd_simulate(RunContext& ctx) {
    const Config config = resolve_config(ctx.opt);
    const auto model = config.make_model(config.model);
    const std::size_t d = model->parameter_dim();
    diff::Tensor truth = diff::Tensor::matrix(config.simulate.participants, d);
    sim::SimStats stats;
    for (std::size_t i = 0; i < config.simulate.participants; ++i) {
        Rng rng(split_seed(config.seed, i));
        const auto theta = sim::sample_prior(model->prior(), rng);
        for (std::size_t k = 0; k < d; ++k) truth(i, k) = theta[k];
        const std::string name = participant_name(i);
        if (const auto* lfm = dynamic_cast<const sim::LevyFlightModel*>(model.get())) {
            write_rt_csv(lfm->simulate_table(theta, sim::kConditions * config.simulate.n_per_condition, rng, stats),
                         ctx.path(name));
        } else if (const auto* ddm = dynamic_cast<const sim::DiffusionModel*>(model.get())) {
            write_rt_csv(ddm->simulate_table(theta, sim::kConditions * config.simulate.n_per_condition, rng, stats),
                         ctx.path(name));
        } else {
            const auto x = model->simulate_encoded(theta, config.simulate.n_per_condition, rng, stats);
            std::vector<std::string> header;
            for (std::size_t c = 0; c < x.cols(); ++c) header.push_back("x" + std::to_string(c + 1));
            write_text(ctx.path(name), format_numeric_csv(header, x));
        }
    }
    write_text(ctx.path("truth.csv"), format_numeric_csv(theta_header(*model), truth));
    ctx.out << "wrote " << config.simulate.participants << " datasets to " << ctx.opt.out_dir << "\n";
    write_manifest(ctx, config,
                   {{"simulated_trials", stats.trials}, {"timeout_resamples", stats.timeouts}, {"model", config.model}});
    return kExitOk;
}

train::CheckpointHook checkpoint_writer(const Checkpoint& base, const fs::path& path) {
    return [base, path](const train::TrainingState& state) {
        Checkpoint c = base;
        c.state = state;
        save_checkpoint(c, path);
        return path.string();
    };
}

int finish_training(RunContext& ctx, const Config& config, const train::TrainReport& report) {
    write_text(ctx.path("losses.csv"), train::loss_csv(report));
    write_text(ctx.path("report.json"), train::report_json(report) + "\n");
    ctx.out << "trained " << report.losses.size() << " iterations in " << report.wall_seconds << " s; checkpoint "
            << report.final_checkpoint << "\n";
    write_manifest(ctx, config, json::parse(train::report_json(report)));
    return kExitOk;
}

Checkpoint start_or_resume(const Options& opt, CheckpointKind kind) {
    if (opt.resume.empty()) {
        const Config config = resolve_config(opt);
        return kind == CheckpointKind::Posterior ? new_posterior_checkpoint(config) : new_comparison_checkpoint(config);
    }
    Checkpoint ckpt = load_checkpoint(opt.resume);
    require_kind(ckpt, kind);
    if (!opt.config_path.empty()) throw ConfigError("--resume uses the configuration stored in the checkpoint; drop --config");
    if (opt.seed && *opt.seed != ckpt.config.seed) throw ConfigError("--seed differs from the checkpoint's seed");
    if (opt.iterations) ckpt.config.train.iterations = *opt.iterations;
    return ckpt;
}

int cmd_train_posterior(RunContext& ctx) {
    Checkpoint ckpt = start_or_resume(ctx.opt, CheckpointKind::Posterior);
    const Config& config = ckpt.config;
    const auto model = config.make_model(config.model);
    const auto net = ckpt.posterior_network();
    auto train_cfg = config.train;
    if (ctx.opt.threads) train_cfg.threads = ctx.opt.threads;
    const auto report =
        train::train_posterior(train_cfg, *model, net, ckpt.state, checkpoint_writer(ckpt, ctx.path("posterior.ckpt")));
    return finish_training(ctx, config, report);
}

int cmd_train_comparison(RunContext& ctx) {
    Checkpoint ckpt = start_or_resume(ctx.opt, CheckpointKind::Comparison);
    const Config& config = ckpt.config;
    std::vector<std::unique_ptr<sim::SimulationModel>> owned;
    std::vector<const sim::SimulationModel*> models;
    for (const auto& k : config.models) {
        owned.push_back(config.make_model(k));
        models.push_back(owned.back().get());
    }
    const auto net = ckpt.evidential_network();
    auto train_cfg = config.train;
    if (ctx.opt.threads) train_cfg.threads = ctx.opt.threads;
    const auto report = train::train_comparison(train_cfg, models, net, ckpt.state,
                                                checkpoint_writer(ckpt, ctx.path("comparison.ckpt")));
    return finish_training(ctx, config, report);
}

diff::Tensor read_dataset(const std::string& path, const sim::SimulationModel& model) {
    if (model.kind() == "gaussian") return ingest_numeric_csv(path, model.input_dim());
    return nets::encode_trials(ingest_csv(path));
}

void require_checkpoint(const Options& opt) {
    if (opt.checkpoint.empty()) throw ConfigError("--checkpoint is required");
}

/// A --config next to --checkpoint must agree with the checkpoint's model.
void check_config_matches(const Options& opt, const Checkpoint& ckpt) {
    if (opt.config_path.empty()) return;
    const Config c = load_config(opt.config_path);
    if (ckpt.kind == CheckpointKind::Posterior && c.model != ckpt.config.model) {
        throw ConfigError("checkpoint was trained for model '" + ckpt.config.model + "' but the config selects '" +
                          c.model + "'");
    }
    if (ckpt.kind == CheckpointKind::Comparison && c.models != ckpt.config.models) {
        throw ConfigError("checkpoint was trained on a different model set than the config lists");
    }
}

json summary_json(const diag::PosteriorSummary& s) {
    json params = json::array();
    for (std::size_t i = 0; i < s.dim; ++i) {
        params.push_back({{"name", s.names[i]},
                          {"mean", s.mean[i]},
                          {"sd", s.sd[i]},
                          {"lower", s.lower[i]},
                          {"upper", s.upper[i]}});
    }
    json corr = json::array();
    for (std::size_t i = 0; i < s.dim; ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < s.dim; ++j) {
            const auto r = s.corr(i, j);
            row.push_back(r ? json(*r) : json(nullptr));
        }
        corr.push_back(row);
    }
    return {{"level", s.level}, {"parameters", params}, {"correlation", corr}};
}

diff::Tensor draws_tensor(const nets::PosteriorDraws& d) {
    return diff::Tensor({std::max<std::size_t>(d.draws, 1), d.dim},
                        d.draws ? d.values : std::vector<double>(d.dim, 0.0));
}

int cmd_infer(RunContext& ctx) {
    require_checkpoint(ctx.opt);
    const Checkpoint ckpt = load_checkpoint(ctx.opt.checkpoint);
    require_kind(ckpt, CheckpointKind::Posterior);
    check_config_matches(ctx.opt, ckpt);
    const auto model = ckpt.config.make_model(ckpt.config.model);
    const auto net = ckpt.posterior_network();
    if (ctx.opt.draws < 2) throw ConfigError("--draws: must be at least 2");
    std::vector<diff::Tensor> tables;
    for (const auto& p : ctx.opt.data) tables.push_back(read_dataset(p, *model));
    const std::uint64_t seed = ctx.opt.seed.value_or(ckpt.config.seed);
    const auto result = infer_many(net, ckpt.state.params, tables, ctx.opt.draws, seed, ctx.threads());
    json timing = json::array();
    for (std::size_t i = 0; i < tables.size(); ++i) {
        const std::string stem = fs::path(ctx.opt.data[i]).stem().string();
        write_text(ctx.path(stem + "_draws.csv"), format_numeric_csv(result.draws[i].names, draws_tensor(result.draws[i])));
        auto summary = summary_json(diag::summarize_posterior(result.draws[i]));
        summary["data"] = ctx.opt.data[i];
        summary["draws"] = ctx.opt.draws;
        summary["seconds"] = result.seconds[i];
        write_text(ctx.path(stem + "_summary.json"), summary.dump(2) + "\n");
        timing.push_back({{"data", ctx.opt.data[i]}, {"seconds", result.seconds[i]}});
    }
    ctx.out << "inferred " << tables.size() << " datasets in " << result.total_seconds << " s\n";
    Config echo = ckpt.config;
    echo.seed = seed;
    write_manifest(ctx, echo, {{"checkpoint", ctx.opt.checkpoint}, {"per_table", timing}, {"total_seconds", result.total_seconds}});
    return kExitOk;
}

int cmd_compare(RunContext& ctx) {
    require_checkpoint(ctx.opt);
    const Checkpoint ckpt = load_checkpoint(ctx.opt.checkpoint);
    require_kind(ckpt, CheckpointKind::Comparison);
    check_config_matches(ctx.opt, ckpt);
    const auto net = ckpt.evidential_network();
    std::vector<diff::Tensor> tables;
    for (const auto& p : ctx.opt.data) tables.push_back(nets::encode_trials(ingest_csv(p)));
    const auto outputs = compare_many(net, ckpt.state.params, tables, ctx.threads());
    const std::size_t j = ckpt.config.models.size();
    const std::vector<double> prior(j, 1.0 / static_cast<double>(j));
    json results = json::array();
    for (std::size_t i = 0; i < tables.size(); ++i) {
        const auto post = nets::model_posterior(outputs[i]);
        results.push_back({{"data", ctx.opt.data[i]},
                           {"models", ckpt.config.models},
                           {"alpha", outputs[i].alpha},
                           {"posterior", post.probabilities},
                           {"variance", post.variance},
                           {"bayes_factors", diag::bayes_factors(post.probabilities, prior)}});
    }
    write_text(ctx.path("comparison.json"), results.dump(2) + "\n");
    ctx.out << "compared " << tables.size() << " datasets\n";
    write_manifest(ctx, ckpt.config, {{"checkpoint", ctx.opt.checkpoint}});
    return kExitOk;
}

diag::Sampler checkpoint_sampler(const nets::PosteriorNetwork& net, const diff::ParameterSet& params) {
    return [&net, &params](const diff::Tensor& data, std::size_t draws, Rng& rng) {
        return net.sample_for(params, data, draws, rng);
    };
}

int cmd_sbc(RunContext& ctx) {
    require_checkpoint(ctx.opt);
    const Checkpoint ckpt = load_checkpoint(ctx.opt.checkpoint);
    require_kind(ckpt, CheckpointKind::Posterior);
    check_config_matches(ctx.opt, ckpt);
    const auto model = ckpt.config.make_model(ckpt.config.model);
    const auto net = ckpt.posterior_network();
    diag::SbcConfig cfg;
    if (ctx.opt.replications) cfg.replications = ctx.opt.replications;
    cfg.n = ctx.opt.n;
    cfg.draws = ctx.opt.draws;
    cfg.threads = ctx.threads();
    const std::uint64_t seed = ctx.opt.seed.value_or(ckpt.config.seed);
    Rng rng(seed);
    const auto result = diag::run_sbc(*model, checkpoint_sampler(net, ckpt.state.params), cfg, rng);

    std::ostringstream hist;
    hist << "parameter,bin,count\n";
    for (std::size_t d = 0; d < result.names.size(); ++d)
        for (std::size_t b = 0; b < result.bins; ++b) hist << result.names[d] << ',' << b << ',' << result.counts[d][b] << '\n';
    write_text(ctx.path("sbc_histogram.csv"), hist.str());
    std::ostringstream ranks;
    ranks << "replication";
    for (const auto& n : result.names) ranks << ',' << n;
    ranks << '\n';
    for (std::size_t m = 0; m < result.replications; ++m) {
        ranks << m;
        for (std::size_t d = 0; d < result.names.size(); ++d) ranks << ',' << result.ranks[d][m];
        ranks << '\n';
    }
    write_text(ctx.path("sbc_ranks.csv"), ranks.str());
    json params = json::array();
    for (std::size_t d = 0; d < result.names.size(); ++d) {
        params.push_back({{"name", result.names[d]},
                          {"tested", static_cast<bool>(result.tested[d])},
                          {"chi_square", result.tested[d] ? json(result.chi_square[d]) : json(nullptr)},
                          {"p_value", result.tested[d] ? json(result.p_value[d]) : json(nullptr)}});
    }
    const json summary{{"replications", result.replications}, {"n", cfg.n},           {"draws", result.draws},
                       {"bins", result.bins},                 {"significance", result.significance},
                       {"passed", result.passed()},           {"rejected", result.rejected()},
                       {"parameters", params}};
    write_text(ctx.path("sbc.json"), summary.dump(2) + "\n");
    ctx.out << "sbc: " << result.passed() << " of " << result.names.size() << " parameters pass\n";
    Config echo = ckpt.config;
    echo.seed = seed;
    write_manifest(ctx, echo, {{"checkpoint", ctx.opt.checkpoint}});
    return kExitOk;
}

int cmd_recover(RunContext& ctx) {
    require_checkpoint(ctx.opt);
    const Checkpoint ckpt = load_checkpoint(ctx.opt.checkpoint);
    require_kind(ckpt, CheckpointKind::Posterior);
    check_config_matches(ctx.opt, ckpt);
    const auto model = ckpt.config.make_model(ckpt.config.model);
    const auto net = ckpt.posterior_network();
    diag::RecoveryConfig cfg;
    cfg.n_grid = ctx.opt.n_grid;
    if (ctx.opt.replications) cfg.replications = ctx.opt.replications;
    cfg.threads = ctx.threads();
    for (auto n : cfg.n_grid)
        if (n < 50 || n > 1000) throw ConfigError("--n-grid: values must lie in [50, 1000]");
    const std::uint64_t seed = ctx.opt.seed.value_or(ckpt.config.seed);
    Rng rng(seed);
    const auto result = diag::run_recovery(
        *model, diag::posterior_mean_estimator(checkpoint_sampler(net, ckpt.state.params), 500), cfg, rng);

    std::ostringstream grid;
    grid.precision(17);
    grid << "n,parameter,r2,ci_low,ci_high\n";
    for (std::size_t g = 0; g < result.n_grid.size(); ++g)
        for (std::size_t d = 0; d < result.names.size(); ++d)
            grid << result.n_grid[g] << ',' << result.names[d] << ',' << result.r2[g][d] << ',' << result.ci_low[g][d]
                 << ',' << result.ci_high[g][d] << '\n';
    write_text(ctx.path("recovery.csv"), grid.str());
    std::ostringstream est;
    est.precision(17);
    est << "n,replication,parameter,truth,estimate\n";
    for (std::size_t g = 0; g < result.n_grid.size(); ++g)
        for (std::size_t r = 0; r < result.truth[g].size(); ++r)
            for (std::size_t d = 0; d < result.names.size(); ++d)
                est << result.n_grid[g] << ',' << r << ',' << result.names[d] << ',' << result.truth[g][r][d] << ','
                    << result.estimate[g][r][d] << '\n';
    write_text(ctx.path("recovery_estimates.csv"), est.str());
    write_text(ctx.path("recovery.json"),
               json{{"n_grid", result.n_grid}, {"names", result.names}, {"r2", result.r2}}.dump(2) + "\n");
    ctx.out << "recovery written to " << ctx.opt.out_dir << "\n";
    Config echo = ckpt.config;
    echo.seed = seed;
    write_manifest(ctx, echo, {{"checkpoint", ctx.opt.checkpoint}});
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Amortized posterior estimation and model comparison for response-time models", "amortize"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&opt](CLI::App* sub, bool needs_out = true) {
        sub->add_option("--config", opt.config_path, "JSON configuration file");
        sub->add_option("--seed", opt.seed, "Seed override");
        auto* o = sub->add_option("--out", opt.out_dir, "Output directory");
        if (needs_out) o->required();
        sub->add_option("--threads", opt.threads, "Worker threads (default: AMORTIZE_THREADS or 1)");
    };

    auto* simulate = app.add_subcommand("simulate", "Simulate synthetic participants as CSV files");
    add_common(simulate);
    auto* train_post = app.add_subcommand("train-posterior", "Train summary and flow networks");
    add_common(train_post);
    train_post->add_option("--resume", opt.resume, "Continue from a checkpoint");
    train_post->add_option("--iterations", opt.iterations, "Total iteration count override");
    auto* train_cmp = app.add_subcommand("train-comparison", "Train the evidential model-comparison network");
    add_common(train_cmp);
    train_cmp->add_option("--resume", opt.resume, "Continue from a checkpoint");
    train_cmp->add_option("--iterations", opt.iterations, "Total iteration count override");
    auto* infer = app.add_subcommand("infer", "Posterior draws for observed datasets");
    add_common(infer);
    infer->add_option("--checkpoint", opt.checkpoint, "Posterior checkpoint")->required();
    infer->add_option("--data", opt.data, "Data CSV file(s)")->required();
    infer->add_option("--draws", opt.draws, "Posterior draws per dataset");
    auto* compare = app.add_subcommand("compare", "Model posterior probabilities for observed datasets");
    add_common(compare);
    compare->add_option("--checkpoint", opt.checkpoint, "Comparison checkpoint")->required();
    compare->add_option("--data", opt.data, "Data CSV file(s)")->required();
    auto* sbc = app.add_subcommand("sbc", "Simulation-based calibration of a posterior checkpoint");
    add_common(sbc);
    sbc->add_option("--checkpoint", opt.checkpoint, "Posterior checkpoint")->required();
    sbc->add_option("--replications", opt.replications, "Simulated datasets (default 1000)");
    sbc->add_option("--n", opt.n, "Observations per dataset");
    sbc->add_option("--draws", opt.draws, "Posterior draws per dataset (default 99)");
    auto* recover = app.add_subcommand("recover", "Parameter recovery across dataset sizes");
    add_common(recover);
    recover->add_option("--checkpoint", opt.checkpoint, "Posterior checkpoint")->required();
    recover->add_option("--replications", opt.replications, "Datasets per grid cell (default 100)");
    recover->add_option("--n-grid", opt.n_grid, "Dataset sizes")->delimiter(',');

    // CLI11 consumes arguments from the back of the vector.
    std::vector<std::string> rev(args.begin() + (args.empty() ? 0 : 1), args.end());
    std::reverse(rev.begin(), rev.end());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }

    CLI::App* chosen = app.get_subcommands().front();
    if (chosen == sbc && sbc->count("--draws") == 0) opt.draws = 99;

    RunContext ctx{chosen->get_name(), args, opt, out};
    try {
        if (chosen == simulate) return cmd_simulate(ctx);
        if (chosen == train_post) return cmd_train_posterior(ctx);
        if (chosen == train_cmp) return cmd_train_comparison(ctx);
        if (chosen == infer) return cmd_infer(ctx);
        if (chosen == compare) return cmd_compare(ctx);
        if (chosen == sbc) return cmd_sbc(ctx);
        if (chosen == recover) return cmd_recover(ctx);
    } catch (const NumericError& e) {
        err << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const TrainingError& e) {
        err << "training error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitData;
    }
    err << "error: unhandled subcommand\n";
    return kExitUsage;
}

}  // namespace amortize::app
