#include "support.hpp"

#include "amortize/errors.hpp"
#include "amortize/nets/evidential.hpp"
#include "amortize/nets/flow.hpp"
#include "amortize/nets/layers.hpp"
#include "amortize/nets/posterior.hpp"
#include "amortize/nets/summary.hpp"
#include "amortize/sim/model.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <numeric>

using namespace amortize;
using namespace amortize::nets;
using diff::ParameterSet;

namespace {

sim::TrialTable random_table(Rng& rng, std::size_t n) {
    sim::TrialTable t;
    for (std::size_t i = 0; i < n; ++i)
        t.trials.push_back({rng.uniform(0.2, 2.0), static_cast<int>(rng.uniform_int(0, 1)),
                            static_cast<int>(rng.uniform_int(1, 4))});
    return t;
}

SummaryConfig small_summary(std::size_t input_dim = 6, bool log_n = true) {
    SummaryConfig c;
    c.input_dim = input_dim;
    c.encoder_widths = {8, 8};
    c.decoder_widths = {8};
    c.summary_dim = 4;
    c.include_log_n = log_n;
    return c;
}

void zero_prefix(ParameterSet& p, const std::string& prefix) {
    for (auto& [name, t] : p)
        if (name.rfind(prefix, 0) == 0) t.fill(0.0);
}

void scale_prefix(ParameterSet& p, const std::string& prefix, double factor) {
    for (auto& [name, t] : p)
        if (name.rfind(prefix, 0) == 0)
            for (auto& v : t.data()) v *= factor;
}

double rel_diff(std::span<const double> a, std::span<const double> b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]) / (std::abs(a[i]) + 1e-8));
    return worst;
}

FlowConfig flow2(std::size_t blocks, std::size_t cond) {
    FlowConfig f;
    f.dim = 2;
    f.n_blocks = blocks;
    f.hidden_widths = {8};
    f.condition_dim = cond;
    return f;
}

}  // namespace

TEST_CASE("encode_trials") {
    sim::TrialTable t;
    t.trials = {{0.5, 1, 2}, {0.7, 0, 4}};
    const auto x = encode_trials(t);
    CHECK(x.shape() == diff::Shape{2, 6});
    const std::vector<double> row0{0.5, 1, 0, 1, 0, 0};
    const std::vector<double> row1{0.7, -1, 0, 0, 0, 1};
    for (std::size_t c = 0; c < 6; ++c) {
        CHECK(x(0, c) == row0[c]);
        CHECK(x(1, c) == row1[c]);
    }
    sim::TrialTable one;
    one.trials = {{1.0, 1, 1}};
    CHECK(encode_trials(one).shape() == diff::Shape{1, 6});
    sim::TrialTable bad;
    bad.trials = {{1.0, 1, 1}, {1.0, 1, 1}, {1.0, 0, 5}};
    try {
        encode_trials(bad);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("row 2") != std::string::npos);
    }
    bad.trials = {{1.0, 2, 1}};
    CHECK_THROWS_AS(encode_trials(bad), DataError);
}

TEST_CASE("summary: identical rows pool to the encoder output") {
    Rng rng(1);
    const SummaryNet net(small_summary());
    ParameterSet p;
    net.initialize(p, rng);
    sim::TrialTable one;
    one.trials = {{0.8, 1, 3}};
    sim::TrialTable many;
    for (int i = 0; i < 17; ++i) many.trials.push_back(one.trials[0]);
    diff::Graph g;
    const auto a = net.pooled(g, p, g.constant(encode_trials(one)), 1).value();
    const auto b = net.pooled(g, p, g.constant(encode_trials(many)), 1).value();
    CHECK(rel_diff(a.data(), b.data()) < 1e-12);
}

TEST_CASE("summary: permutation invariance over 100 random tables") {
    Rng rng(2);
    const SummaryNet net(small_summary());
    ParameterSet p;
    net.initialize(p, rng);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        auto t = random_table(rng, 1 + rng.uniform_int(0, 200));
        const auto s = net.summarize(p, t);
        for (std::size_t i = t.trials.size(); i > 1; --i) std::swap(t.trials[i - 1], t.trials[rng.uniform_int(0, i - 1)]);
        const auto sp = net.summarize(p, t);
        worst = std::max(worst, rel_diff(s, sp));
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("summary: duplicating trials changes only the log n input") {
    Rng rng(3);
    for (bool log_n : {false, true}) {
        const SummaryNet net(small_summary(6, log_n));
        ParameterSet p;
        net.initialize(p, rng);
        const auto t = random_table(rng, 40);
        auto twice = t;
        twice.trials.insert(twice.trials.end(), t.trials.begin(), t.trials.end());
        diff::Graph g;
        const auto pa = net.pooled(g, p, g.constant(encode_trials(t)), 1).value();
        const auto pb = net.pooled(g, p, g.constant(encode_trials(twice)), 1).value();
        CHECK(rel_diff(pa.data(), pb.data()) < 1e-12);
        const auto sa = net.summarize(p, t);
        const auto sb = net.summarize(p, twice);
        if (log_n) {
            CHECK(rel_diff(sa, sb) > 1e-6);
        } else {
            CHECK(rel_diff(sa, sb) < 1e-12);
        }
    }
    CHECK(log_n_feature(1000) == doctest::Approx(1.0));
    CHECK(log_n_feature(1) == 0.0);
}

TEST_CASE("summary: accepts N from 1 to 10000") {
    Rng rng(4);
    const SummaryNet net(small_summary());
    ParameterSet p;
    net.initialize(p, rng);
    for (std::size_t n : {1u, 2u, 999u, 10000u}) {
        const auto s = net.summarize(p, random_table(rng, n));
        CHECK(s.size() == 4);
        for (double v : s) CHECK(std::isfinite(v));
    }
}

TEST_CASE("summary: gradient of a summary component matches finite differences") {
    Rng rng(5);
    const SummaryNet net(small_summary());
    ParameterSet p;
    net.initialize(p, rng);
    const auto x = encode_trials(random_table(rng, 12));
    const testing::LossBuilder f = [&](diff::Graph& g, const ParameterSet& ps) {
        for (const auto& [name, t] : ps) g.parameter(name, t);
        const auto s = net.forward(g, ps, g.constant(x), 2, 6);
        return diff::sum(diff::split(s, 1, 2));
    };
    CHECK(testing::gradient_error(f, p) < 1e-4);
}

TEST_CASE("flow: zero weights are the identity") {
    Rng rng(6);
    const FlowNet flow(flow2(3, 3));
    ParameterSet p;
    flow.initialize(p, rng);
    zero_prefix(p, "flow");
    const auto theta = testing::random_tensor(rng, 5, 2);
    const auto cond = testing::random_tensor(rng, 5, 3);
    diff::Graph g;
    const auto out = flow.forward(g, p, g.constant(theta), g.constant(cond));
    for (std::size_t i = 0; i < theta.size(); ++i) CHECK(out.z.value()[i] == theta[i]);
    for (double v : out.log_det.value().data()) CHECK(v == 0.0);
    std::vector<double> inv_det;
    const auto back = flow.inverse(p, theta, cond, &inv_det);
    for (std::size_t i = 0; i < theta.size(); ++i) CHECK(back[i] == theta[i]);
}

TEST_CASE("flow: log det matches a numeric Jacobian (D=2, one block)") {
    Rng rng(7);
    const FlowNet flow(flow2(1, 2));
    ParameterSet p;
    flow.initialize(p, rng);
    scale_prefix(p, "flow.block0.scale", 10.0);
    const auto cond = testing::random_tensor(rng, 1, 2);
    auto map = [&](double a, double b) {
        diff::Graph g;
        const auto out = flow.forward(g, p, g.constant(diff::Tensor::from_rows({{a, b}})), g.constant(cond));
        return std::pair{out.z.value()[0], out.z.value()[1]};
    };
    for (int k = 0; k < 10; ++k) {
        const double a = rng.uniform(-2, 2), b = rng.uniform(-2, 2), h = 1e-6;
        const auto [za1, zb1] = map(a + h, b);
        const auto [za0, zb0] = map(a - h, b);
        const auto [za3, zb3] = map(a, b + h);
        const auto [za2, zb2] = map(a, b - h);
        const double j00 = (za1 - za0) / (2 * h), j10 = (zb1 - zb0) / (2 * h);
        const double j01 = (za3 - za2) / (2 * h), j11 = (zb3 - zb2) / (2 * h);
        const double numeric = std::log(std::abs(j00 * j11 - j01 * j10));
        diff::Graph g;
        const auto out = flow.forward(g, p, g.constant(diff::Tensor::from_rows({{a, b}})), g.constant(cond));
        CHECK(std::abs(out.log_det.value().item() - numeric) < 1e-4);
    }
}

TEST_CASE("flow: round trip, reciprocal log det and the clamp bound") {
    Rng rng(8);
    FlowConfig cfg;
    cfg.dim = 8;
    cfg.n_blocks = 6;
    cfg.condition_dim = 5;
    cfg.hidden_widths = {16, 16};
    const FlowNet flow(cfg);
    ParameterSet p;
    flow.initialize(p, rng);
    scale_prefix(p, "flow", 3.0);
    const auto theta = testing::random_tensor(rng, 1000, 8, -3, 3);
    const auto cond = testing::random_tensor(rng, 1000, 5);
    diff::Graph g;
    const auto out = flow.forward(g, p, g.constant(theta), g.constant(cond));
    std::vector<double> inv_det;
    const auto back = flow.inverse(p, out.z.value(), cond, &inv_det);
    double worst = 0.0, worst_det = 0.0, biggest = 0.0;
    for (std::size_t i = 0; i < theta.size(); ++i) worst = std::max(worst, std::abs(back[i] - theta[i]));
    for (std::size_t r = 0; r < 1000; ++r) {
        worst_det = std::max(worst_det, std::abs(out.log_det.value()[r] + inv_det[r]));
        biggest = std::max(biggest, std::abs(out.log_det.value()[r]));
    }
    CHECK(worst < 1e-10);
    CHECK(worst_det < 1e-10);
    CHECK(biggest <= flow.log_det_bound());
    CHECK(flow.log_det_bound() <= 6 * (8.0 / 2) * 1.9 * std::numbers::pi / 2);

    auto bad = theta;
    bad[3] = std::nan("");
    diff::Graph g2;
    CHECK_THROWS_AS(flow.forward(g2, p, g2.constant(bad), g2.constant(cond)), NumericError);
    CHECK_THROWS_AS(flow.inverse(p, bad, cond), NumericError);
    CHECK_THROWS_AS(FlowNet(flow2(1, 2)).inverse(p, theta, cond), DimensionError);
    FlowConfig one_d;
    one_d.dim = 1;
    CHECK_THROWS_AS(FlowNet{one_d}, ConfigError);
}

TEST_CASE("posterior: standard normal density at the origin for a zero-weight flow") {
    Rng rng(9);
    const PosteriorNetwork net(small_summary(2), flow2(2, 4), Standardizer::identity(2), {"mu1", "mu2"});
    ParameterSet p;
    net.initialize(p, rng);
    zero_prefix(p, "flow");
    const std::vector<double> s{0.1, 0.2, 0.3, 0.4};
    const std::vector<double> origin{0.0, 0.0};
    CHECK(net.log_posterior(p, origin, s) == doctest::Approx(-std::log(2 * std::numbers::pi)).epsilon(1e-14));

    Standardizer shifted{{1.0, -2.0}, {2.0, 0.5}};
    const PosteriorNetwork net2(small_summary(2), flow2(2, 4), shifted);
    const std::vector<double> at_loc{1.0, -2.0};
    CHECK(net2.log_posterior(p, at_loc, s) ==
          doctest::Approx(-std::log(2 * std::numbers::pi) - std::log(2.0) - std::log(0.5)).epsilon(1e-14));
}

TEST_CASE("posterior: density integrates to one (importance estimate over prior draws)") {
    Rng rng(10);
    const PosteriorNetwork net(small_summary(2), flow2(4, 4), Standardizer::identity(2));
    ParameterSet p;
    net.initialize(p, rng);
    scale_prefix(p, "flow", 4.0);
    const std::vector<double> s{0.3, -0.2, 0.5, 0.1};
    // Proposal N(0, 2^2 I); weights p(theta)/q(theta), evaluated in one batch.
    const std::size_t m = 100000;
    diff::Tensor theta = diff::Tensor::matrix(m, 2);
    std::vector<double> log_q(m);
    for (std::size_t i = 0; i < m; ++i) {
        double lq = 0.0;
        for (std::size_t d = 0; d < 2; ++d) {
            const double x = 2.0 * rng.normal();
            theta(i, d) = x;
            lq += -0.5 * (x / 2.0) * (x / 2.0) - std::log(2.0) - 0.5 * std::log(2 * std::numbers::pi);
        }
        log_q[i] = lq;
    }
    diff::Graph g;
    const auto out = net.flow().forward(g, p, g.constant(theta), g.constant(repeat_row(s, m)));
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double z0 = out.z.value()(i, 0), z1 = out.z.value()(i, 1);
        const double lp = -0.5 * (z0 * z0 + z1 * z1) - std::log(2 * std::numbers::pi) + out.log_det.value()[i];
        total += std::exp(lp - log_q[i]);
    }
    const double estimate = total / static_cast<double>(m);
    CHECK(estimate > 0.9);
    CHECK(estimate < 1.1);
}

TEST_CASE("posterior: samples agree with the density (marginal KS)") {
    Rng rng(11);
    const PosteriorNetwork net(small_summary(2), flow2(4, 4), Standardizer::identity(2), {"a", "b"});
    ParameterSet p;
    net.initialize(p, rng);
    scale_prefix(p, "flow", 4.0);
    const std::vector<double> s{-0.4, 0.2, 0.0, 0.7};
    // Grid density, then cumulative marginals.
    const std::size_t k = 600;
    const double lo = -10.0, hi = 10.0, step = (hi - lo) / static_cast<double>(k - 1);
    diff::Tensor grid = diff::Tensor::matrix(k * k, 2);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            grid(i * k + j, 0) = lo + step * static_cast<double>(i);
            grid(i * k + j, 1) = lo + step * static_cast<double>(j);
        }
    diff::Graph g;
    const auto out = net.flow().forward(g, p, g.constant(grid), g.constant(repeat_row(s, k * k)));
    std::vector<double> m0(k, 0.0), m1(k, 0.0);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            const std::size_t r = i * k + j;
            const double z0 = out.z.value()(r, 0), z1 = out.z.value()(r, 1);
            const double dens = std::exp(-0.5 * (z0 * z0 + z1 * z1) + out.log_det.value()[r]) / (2 * std::numbers::pi);
            m0[i] += dens * step;
            m1[j] += dens * step;
        }
    auto cdf_from = [&](const std::vector<double>& marg) {
        std::vector<double> c(k, 0.0);
        double acc = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            acc += marg[i] * step;
            c[i] = acc;
        }
        for (auto& v : c) v /= acc;
        return [c, lo, step, k](double x) {
            // cell i covers (x_i - step/2, x_i + step/2]
            const double pos = (x - lo) / step + 0.5;
            if (pos <= 0) return 0.0;
            const auto i = static_cast<std::size_t>(pos);
            if (i >= k) return 1.0;
            const double before = i ? c[i - 1] : 0.0;
            return before + (c[i] - before) * (pos - static_cast<double>(i));
        };
    };
    const auto draws = net.sample(p, s, 10000, rng);
    CHECK(testing::ks_one_sample(draws.column(0), cdf_from(m0)) > 0.01);
    CHECK(testing::ks_one_sample(draws.column(1), cdf_from(m1)) > 0.01);
}

TEST_CASE("posterior: sampling contract") {
    Rng rng(12);
    const PosteriorNetwork net(small_summary(2), flow2(2, 4), Standardizer::identity(2), {"a", "b"});
    ParameterSet p;
    net.initialize(p, rng);
    zero_prefix(p, "flow");
    const std::vector<double> s{0.0, 0.0, 0.0, 0.0};
    const auto draws = net.sample(p, s, 10000, rng);
    CHECK(draws.draws == 10000);
    CHECK(draws.names == std::vector<std::string>{"a", "b"});
    CHECK(testing::ks_one_sample(draws.column(0), testing::normal_cdf) > 0.01);
    CHECK(testing::ks_one_sample(draws.column(1), testing::normal_cdf) > 0.01);

    Rng a(3), b(3);
    CHECK(net.sample(p, s, 20, a).values == net.sample(p, s, 20, b).values);
    const auto none = net.sample(p, s, 0, a);
    CHECK(none.draws == 0);
    CHECK(none.values.empty());

    // zero weights with a non-trivial standardizer: draws are destandardized z
    Standardizer st{{5.0, -1.0}, {2.0, 0.1}};
    const PosteriorNetwork shifted(small_summary(2), flow2(2, 4), st);
    Rng c(4), d(4);
    const auto sd = shifted.sample(p, s, 5, c);
    for (std::size_t i = 0; i < 5; ++i) {
        const double z0 = d.normal(), z1 = d.normal();
        CHECK(sd(i, 0) == doctest::Approx(5.0 + 2.0 * z0).epsilon(1e-14));
        CHECK(sd(i, 1) == doctest::Approx(-1.0 + 0.1 * z1).epsilon(1e-14));
    }
}

TEST_CASE("posterior: joint gradient through flow and summary (D=2, one block)") {
    Rng rng(13);
    const PosteriorNetwork net(small_summary(2), flow2(1, 4), Standardizer::identity(2));
    ParameterSet p;
    net.initialize(p, rng);
    scale_prefix(p, "flow", 5.0);
    const auto thetas = testing::random_tensor(rng, 3, 2);
    const auto rows = testing::random_tensor(rng, 3 * 5, 2);
    const testing::LossBuilder f = [&](diff::Graph& g, const ParameterSet& ps) {
        for (const auto& [name, t] : ps) g.parameter(name, t);
        return diff::mean(net.negative_log_posterior(g, ps, thetas, g.constant(rows), 3, 5));
    };
    CHECK(testing::gradient_error(f, p) < 1e-4);
}

TEST_CASE("posterior: construction checks") {
    CHECK_THROWS_AS(PosteriorNetwork(small_summary(2), flow2(1, 3), Standardizer::identity(2)), ConfigError);
    auto tiny = small_summary(2);
    tiny.summary_dim = 1;
    CHECK_THROWS_AS(PosteriorNetwork(tiny, flow2(1, 1), Standardizer::identity(2)), ConfigError);
    CHECK_THROWS_AS(PosteriorNetwork(small_summary(2), flow2(1, 4), Standardizer::identity(3)), ConfigError);
}

TEST_CASE("standardizer from prior draws") {
    Rng rng(14);
    const auto st = Standardizer::from_prior(sim::default_lfm_prior(), rng, 10000);
    CHECK(std::abs(st.location[0]) < 0.15);
    CHECK(st.scale[0] == doctest::Approx(12.0 / std::sqrt(12.0)).epsilon(0.02));
    CHECK(st.location[7] == doctest::Approx(0.4).epsilon(0.01));
    const auto raw = diff::Tensor::from_rows({{1, 2, 3, 4, 1.5, 1.0, 0.5, 0.3}});
    const auto back = st.destandardize(st.standardize(raw));
    for (std::size_t i = 0; i < raw.size(); ++i) CHECK(back[i] == doctest::Approx(raw[i]).epsilon(1e-14));
    Standardizer bad{{0.0}, {0.0}};
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("dirichlet output arithmetic") {
    const DirichletOutput a{{2, 1, 1}};
    CHECK(a.mean() == std::vector<double>{0.5, 0.25, 0.25});
    const DirichletOutput b{{20, 10, 10}};
    for (std::size_t j = 0; j < 3; ++j) {
        CHECK(b.mean()[j] == doctest::Approx(a.mean()[j]).epsilon(1e-15));
        CHECK(b.variance()[j] < a.variance()[j]);
        CHECK(a.variance()[j] == doctest::Approx(a.mean()[j] * (1 - a.mean()[j]) / 5.0));
    }
    CHECK(model_posterior({{1, 1}}).probabilities == std::vector<double>{0.5, 0.5});
    CHECK(model_posterior({{3, 1}}).probabilities == std::vector<double>{0.75, 0.25});
    const auto fwd = model_posterior({{1.5, 4.0, 2.5}});
    const auto rev = model_posterior({{2.5, 4.0, 1.5}});
    CHECK(fwd.probabilities[0] == rev.probabilities[2]);
    CHECK(fwd.probabilities[1] == rev.probabilities[1]);
    CHECK(std::abs(std::accumulate(fwd.probabilities.begin(), fwd.probabilities.end(), 0.0) - 1.0) < 1e-12);
    double prev = 1.0;
    for (double scale : {1.0, 2.0, 5.0, 50.0}) {
        const auto v = DirichletOutput{{3 * scale, 1 * scale}}.variance()[0];
        CHECK(v < prev);
        prev = v;
    }
}

TEST_CASE("dirichlet log density") {
    for (std::size_t j = 2; j <= 5; ++j) {
        const std::vector<double> alpha(j, 1.0);
        const std::vector<double> pi(j, 1.0 / static_cast<double>(j));
        CHECK(dirichlet_log_density(pi, alpha) == doctest::Approx(std::lgamma(static_cast<double>(j))).epsilon(1e-12));
    }
    const std::vector<double> half{0.5, 0.5};
    const std::vector<double> two{2.0, 2.0};
    CHECK(dirichlet_log_density(half, two) == doctest::Approx(std::log(1.5)).epsilon(1e-12));
    Rng rng(15);
    const std::vector<double> alpha{2.5, 1.5};
    double total = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double u = rng.uniform();
        const std::vector<double> pi{u, 1 - u};
        total += std::exp(dirichlet_log_density(pi, alpha));
    }
    CHECK(total / 100000 > 0.9);
    CHECK(total / 100000 < 1.1);
    const std::vector<double> off{0.5, 0.6};
    CHECK_THROWS_AS(dirichlet_log_density(off, two), ContractError);
    const std::vector<double> zero{0.0, 1.0};
    CHECK_THROWS_AS(dirichlet_log_density(zero, two), ContractError);
}

TEST_CASE("evidential net: zero head gives uniform concentrations 1 + ln 2") {
    Rng rng(16);
    EvidentialConfig cfg;
    cfg.n_models = 3;
    cfg.summary = small_summary();
    cfg.head_widths = {8};
    const EvidentialNet net(cfg);
    ParameterSet p;
    net.initialize(p, rng);
    zero_prefix(p, "evidence.out");
    const auto out = net.forward(p, random_table(rng, 30));
    for (double a : out.alpha) CHECK(a == doctest::Approx(1.0 + std::log(2.0)).epsilon(1e-15));
    for (double m : out.mean()) CHECK(m == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("evidential net: concentrations at least one and trial-order invariant") {
    Rng rng(17);
    EvidentialConfig cfg;
    cfg.summary = small_summary();
    cfg.head_widths = {8};
    const EvidentialNet net(cfg);
    ParameterSet p;
    net.initialize(p, rng);
    scale_prefix(p, "evidence", 30.0);
    for (int k = 0; k < 20; ++k) {
        auto t = random_table(rng, 50);
        const auto a = net.forward(p, t);
        for (double v : a.alpha) CHECK(v >= 1.0);
        std::reverse(t.trials.begin(), t.trials.end());
        const auto b = net.forward(p, t);
        CHECK(rel_diff(a.alpha, b.alpha) < 1e-9);
    }
    EvidentialConfig one = cfg;
    one.n_models = 1;
    CHECK_THROWS_AS(EvidentialNet{one}, ConfigError);
}

TEST_CASE("layers: dense initialization and missing parameters") {
    Rng rng(18);
    ParameterSet p;
    init_dense(p, "x", 3, 4, rng);
    CHECK(p.at("x.W").shape() == diff::Shape{3, 4});
    CHECK(p.at("x.b").shape() == diff::Shape{1, 4});
    const double limit = std::sqrt(6.0 / 7.0);
    for (double w : p.at("x.W").data()) CHECK(std::abs(w) <= limit);
    for (double b : p.at("x.b").data()) CHECK(b == 0.0);
    try {
        require_param(p, "y.W");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("y.W") != std::string::npos);
    }
}
