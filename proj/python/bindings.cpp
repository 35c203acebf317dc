#include "amortize/app/checkpoint.hpp"
#include "amortize/app/cli.hpp"
#include "amortize/app/csv.hpp"
#include "amortize/diag/diagnostics.hpp"
#include "amortize/errors.hpp"
#include "amortize/nets/summary.hpp"
#include "amortize/sim/alpha_stable.hpp"
#include "amortize/sim/lfm.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

namespace py = pybind11;
using namespace amortize;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;
using IntArray = py::array_t<int, py::array::c_style | py::array::forcecast>;

sim::TrialTable table_from(const Array& rt, const IntArray& choice, const IntArray& condition) {
    if (rt.ndim() != 1 || choice.ndim() != 1 || condition.ndim() != 1 || rt.size() != choice.size() ||
        rt.size() != condition.size()) {
        throw DimensionError("rt, choice and condition must be 1-d arrays of equal length");
    }
    sim::TrialTable t;
    const auto r = rt.unchecked<1>();
    const auto c = choice.unchecked<1>();
    const auto k = condition.unchecked<1>();
    for (py::ssize_t i = 0; i < rt.size(); ++i) {
        if (!(r(i) > 0.0)) throw DataError("row " + std::to_string(i) + ": rt must be positive");
        t.trials.push_back({r(i), c(i), k(i)});
    }
    return t;
}

py::dict table_to_dict(const sim::TrialTable& t) {
    Array rt(static_cast<py::ssize_t>(t.n()));
    IntArray choice(static_cast<py::ssize_t>(t.n())), condition(static_cast<py::ssize_t>(t.n()));
    auto r = rt.mutable_unchecked<1>();
    auto c = choice.mutable_unchecked<1>();
    auto k = condition.mutable_unchecked<1>();
    for (std::size_t i = 0; i < t.n(); ++i) {
        r(static_cast<py::ssize_t>(i)) = t.trials[i].rt;
        c(static_cast<py::ssize_t>(i)) = t.trials[i].choice;
        k(static_cast<py::ssize_t>(i)) = t.trials[i].condition;
    }
    py::dict d;
    d["rt"] = rt;
    d["choice"] = choice;
    d["condition"] = condition;
    return d;
}

diff::Tensor tensor_from(const Array& a) {
    if (a.ndim() != 2) throw DimensionError("expected a 2-d array");
    const auto rows = static_cast<std::size_t>(a.shape(0)), cols = static_cast<std::size_t>(a.shape(1));
    return diff::Tensor({rows, cols}, std::vector<double>(a.data(), a.data() + a.size()));
}

/// A loaded posterior checkpoint, frozen for inference.
class Posterior {
public:
    explicit Posterior(const std::filesystem::path& path)
        : ckpt_(app::load_checkpoint(path)), net_((app::require_kind(ckpt_, app::CheckpointKind::Posterior), ckpt_.posterior_network())) {}

    std::string model() const { return ckpt_.config.model; }
    std::vector<std::string> parameter_names() const { return net_.parameter_names(); }
    std::uint64_t iteration() const { return ckpt_.state.iteration; }

    Array sample_encoded(const diff::Tensor& rows, std::size_t draws, std::uint64_t seed) const {
        Rng rng(seed);
        const auto d = net_.sample_for(ckpt_.state.params, rows, draws, rng);
        Array out({static_cast<py::ssize_t>(d.draws), static_cast<py::ssize_t>(d.dim)});
        std::copy(d.values.begin(), d.values.end(), out.mutable_data());
        return out;
    }

    Array sample_trials(const Array& rt, const IntArray& choice, const IntArray& condition, std::size_t draws,
                        std::uint64_t seed) const {
        if (ckpt_.config.model == "gaussian") throw ConfigError("this checkpoint expects numeric observations");
        return sample_encoded(nets::encode_trials(table_from(rt, choice, condition)), draws, seed);
    }

    Array sample_numeric(const Array& x, std::size_t draws, std::uint64_t seed) const {
        if (ckpt_.config.model != "gaussian") throw ConfigError("this checkpoint expects response-time trials");
        return sample_encoded(tensor_from(x), draws, seed);
    }

private:
    app::Checkpoint ckpt_;
    nets::PosteriorNetwork net_;
};

/// A loaded model-comparison checkpoint.
class Comparison {
public:
    explicit Comparison(const std::filesystem::path& path)
        : ckpt_(app::load_checkpoint(path)), net_((app::require_kind(ckpt_, app::CheckpointKind::Comparison), ckpt_.evidential_network())) {}

    std::vector<std::string> models() const { return ckpt_.config.models; }

    py::dict evaluate(const Array& rt, const IntArray& choice, const IntArray& condition) const {
        const auto out = net_.forward(ckpt_.state.params, table_from(rt, choice, condition));
        const auto post = nets::model_posterior(out);
        py::dict d;
        d["alpha"] = out.alpha;
        d["probabilities"] = post.probabilities;
        d["variance"] = post.variance;
        return d;
    }

private:
    app::Checkpoint ckpt_;
    nets::EvidentialNet net_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Amortized Bayesian inference for Levy-flight response-time models";

    // Translators run newest first.
    static py::exception<Error> base_error(m, "AmortizeError", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::set_error(base_error, e.what());
        }
    });
    py::register_exception<ConfigError>(m, "ConfigError", base_error.ptr());
    py::register_exception<DataError>(m, "DataError", base_error.ptr());
    py::register_exception<CorruptionError>(m, "CorruptionError", base_error.ptr());
    py::register_exception<NumericError>(m, "NumericError", base_error.ptr());
    py::register_exception<TrainingError>(m, "TrainingError", base_error.ptr());

    m.def(
        "sample_alpha_stable",
        [](double alpha, std::size_t n, std::uint64_t seed) {
            const sim::AlphaStableSampler s(alpha);
            Rng rng(seed);
            Array out(static_cast<py::ssize_t>(n));
            auto v = out.mutable_unchecked<1>();
            for (std::size_t i = 0; i < n; ++i) v(static_cast<py::ssize_t>(i)) = s(rng);
            return out;
        },
        py::arg("alpha"), py::arg("n"), py::arg("seed") = 0,
        "Symmetric standard alpha-stable draws (alpha=2 has variance 2).");

    m.def(
        "simulate_lfm",
        [](std::vector<double> v, double alpha, double a, double zr, double t0, std::size_t n_per_condition,
           double dt, std::uint64_t seed) {
            if (v.size() != sim::kConditions) throw ConfigError("v must hold one drift per condition (4)");
            sim::LfmParams p;
            std::copy(v.begin(), v.end(), p.v.begin());
            p.alpha = alpha;
            p.a = a;
            p.zr = zr;
            p.t0 = t0;
            sim::SimulatorSettings settings;
            settings.dt = dt;
            Rng rng(seed);
            sim::SimStats stats;
            return table_to_dict(sim::simulate_dataset(p, n_per_condition, settings, rng, stats));
        },
        py::arg("v"), py::arg("alpha"), py::arg("a"), py::arg("zr"), py::arg("t0"), py::arg("n_per_condition"),
        py::arg("dt") = 0.001, py::arg("seed") = 0, "Simulate a four-condition dataset; returns rt/choice/condition arrays.");

    m.def(
        "read_rt_csv", [](const std::filesystem::path& path) { return table_to_dict(app::ingest_csv(path)); },
        py::arg("path"));

    m.def(
        "bayes_factors",
        [](std::vector<double> posterior, std::optional<std::vector<double>> prior) {
            const auto p = prior.value_or(std::vector<double>(posterior.size(), 1.0 / static_cast<double>(posterior.size())));
            return diag::bayes_factors(posterior, p);
        },
        py::arg("posterior"), py::arg("prior") = py::none());

    m.def(
        "run_cli",
        [](std::vector<std::string> args) {
            args.insert(args.begin(), "amortize");
            std::ostringstream out, err;
            int code;
            {
                py::gil_scoped_release release;
                code = app::run_cli(args, out, err);
            }
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Run one command-line invocation; returns (exit_code, stdout, stderr).");

    py::class_<Posterior>(m, "Posterior")
        .def(py::init<const std::filesystem::path&>(), py::arg("path"))
        .def_property_readonly("model", &Posterior::model)
        .def_property_readonly("parameter_names", &Posterior::parameter_names)
        .def_property_readonly("iteration", &Posterior::iteration)
        .def("sample", &Posterior::sample_trials, py::arg("rt"), py::arg("choice"), py::arg("condition"),
             py::arg("draws") = 1000, py::arg("seed") = 0, "Posterior draws (draws x parameters) for one dataset.")
        .def("sample_numeric", &Posterior::sample_numeric, py::arg("x"), py::arg("draws") = 1000, py::arg("seed") = 0);

    py::class_<Comparison>(m, "Comparison")
        .def(py::init<const std::filesystem::path&>(), py::arg("path"))
        .def_property_readonly("models", &Comparison::models)
        .def("evaluate", &Comparison::evaluate, py::arg("rt"), py::arg("choice"), py::arg("condition"));
}
