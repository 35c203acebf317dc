#include "support.hpp"

#include "amortize/diag/diagnostics.hpp"
#include "amortize/errors.hpp"
#include "amortize/sim/model.hpp"

#include <doctest.h>

#include <cmath>

using namespace amortize;

namespace {

/// Exact conjugate posterior of the two-mean Gaussian model, with its sd scaled by `widen`.
diag::Sampler gaussian_sampler(double widen = 1.0) {
    return [widen](const diff::Tensor& data, std::size_t n_draws, Rng& rng) {
        const auto n = static_cast<double>(data.rows());
        nets::PosteriorDraws out;
        out.names = {"mu1", "mu2"};
        out.dim = 2;
        out.draws = n_draws;
        double mean[2] = {0.0, 0.0};
        for (std::size_t r = 0; r < data.rows(); ++r)
            for (std::size_t c = 0; c < 2; ++c) mean[c] += data(r, c);
        const double sd = widen / std::sqrt(n + 1.0);
        for (std::size_t s = 0; s < n_draws; ++s)
            for (std::size_t c = 0; c < 2; ++c) out.values.push_back(mean[c] / (n + 1.0) + sd * rng.normal());
        return out;
    };
}

nets::PosteriorDraws draws_from(std::vector<std::vector<double>> rows, std::vector<std::string> names) {
    nets::PosteriorDraws d;
    d.names = std::move(names);
    d.draws = rows.size();
    d.dim = rows.empty() ? d.names.size() : rows[0].size();
    for (const auto& r : rows) d.values.insert(d.values.end(), r.begin(), r.end());
    return d;
}

}  // namespace

TEST_CASE("chi-square uniformity oracle values") {
    const std::vector<std::size_t> flat(20, 50);
    const auto [s0, p0] = diag::chi_square_uniform(flat);
    CHECK(s0 == 0.0);
    CHECK(p0 == doctest::Approx(1.0));
    // 2 bins, counts (60, 40): stat = 4, p = erfc(sqrt(2)) for one degree of freedom.
    const std::vector<std::size_t> two{60, 40};
    const auto [s1, p1] = diag::chi_square_uniform(two);
    CHECK(s1 == doctest::Approx(4.0));
    CHECK(p1 == doctest::Approx(std::erfc(std::sqrt(2.0))).epsilon(1e-10));
    // 3 bins: survival of chi2(2) is exp(-x/2).
    const std::vector<std::size_t> three{10, 20, 30};
    const auto [s2, p2] = diag::chi_square_uniform(three);
    CHECK(s2 == doctest::Approx(10.0));
    CHECK(p2 == doctest::Approx(std::exp(-5.0)).epsilon(1e-10));
}

TEST_CASE("sbc accepts the exact posterior") {
    const sim::GaussianToyModel model;
    diag::SbcConfig cfg;
    cfg.replications = 1000;
    cfg.n = 20;
    Rng rng(101);
    const auto res = diag::run_sbc(model, gaussian_sampler(), cfg, rng);
    CHECK(res.names == std::vector<std::string>{"mu1", "mu2"});
    for (std::size_t j = 0; j < 2; ++j) {
        CHECK(res.tested[j]);
        CHECK(res.p_value[j] >= 0.01);
        std::size_t total = 0;
        for (auto c : res.counts[j]) total += c;
        CHECK(total == 1000);
        for (auto r : res.ranks[j]) CHECK(r <= cfg.draws);
    }
    CHECK(res.passed() == 2);
    CHECK(res.rejected() == 0);
}

TEST_CASE("sbc rejects an over-dispersed posterior") {
    const sim::GaussianToyModel model;
    diag::SbcConfig cfg;
    cfg.replications = 1000;
    cfg.n = 20;
    Rng rng(102);
    const auto res = diag::run_sbc(model, gaussian_sampler(3.0), cfg, rng);
    CHECK(res.rejected() == 2);
    CHECK(res.p_value[0] < 1e-6);
    Rng rng2(103);
    CHECK(diag::run_sbc(model, gaussian_sampler(0.3), cfg, rng2).rejected() == 2);
}

TEST_CASE("sbc with a single replication reports ranks but no test") {
    const sim::GaussianToyModel model;
    diag::SbcConfig cfg;
    cfg.replications = 1;
    Rng rng(104);
    const auto res = diag::run_sbc(model, gaussian_sampler(), cfg, rng);
    CHECK(res.ranks[0].size() == 1);
    CHECK_FALSE(res.tested[0]);
    CHECK(std::isnan(res.p_value[0]));
    CHECK(res.passed() == 0);
    CHECK(res.rejected() == 0);
}

TEST_CASE("sbc contract errors") {
    const sim::GaussianToyModel model;
    Rng rng(105);
    diag::SbcConfig cfg;
    cfg.replications = 0;
    CHECK_THROWS_AS(diag::run_sbc(model, gaussian_sampler(), cfg, rng), ContractError);
    cfg.replications = 10;
    cfg.draws = 100;
    CHECK_THROWS_AS(diag::run_sbc(model, gaussian_sampler(), cfg, rng), ContractError);
    cfg.draws = 99;
    const diag::Sampler wrong = [](const diff::Tensor&, std::size_t, Rng&) {
        return draws_from({{1.0}}, {"x"});
    };
    CHECK_THROWS_AS(diag::run_sbc(model, wrong, cfg, rng), ConfigError);
}

TEST_CASE("sbc is deterministic and independent of threads") {
    const sim::GaussianToyModel model;
    diag::SbcConfig cfg;
    cfg.replications = 60;
    Rng a(7), b(7);
    const auto r1 = diag::run_sbc(model, gaussian_sampler(), cfg, a);
    cfg.threads = 3;
    const auto r2 = diag::run_sbc(model, gaussian_sampler(), cfg, b);
    CHECK(r1.ranks == r2.ranks);
    CHECK(r1.counts == r2.counts);
}

TEST_CASE("r squared examples") {
    const std::vector<double> t{1, 2, 3, 4};
    CHECK(diag::r_squared(t, t) == 1.0);
    const std::vector<double> flat{2.5, 2.5, 2.5, 2.5};
    CHECK(diag::r_squared(t, flat) == doctest::Approx(0.0));
    const std::vector<double> off{2, 2, 3, 5};
    // ss_res = 1 + 0 + 0 + 1 = 2, ss_tot = 5
    CHECK(diag::r_squared(t, off) == doctest::Approx(0.6));
    const std::vector<double> one{1};
    CHECK_THROWS_AS(diag::r_squared(one, one), ContractError);
}

TEST_CASE("recovery with exact and constant estimators") {
    const sim::GaussianToyModel model;
    diag::RecoveryConfig cfg;
    cfg.n_grid = {10, 40};
    cfg.replications = 50;
    cfg.bootstrap = 200;
    const diag::Estimator exact = [](const diff::Tensor&, std::span<const double> truth, Rng&) {
        return std::vector<double>(truth.begin(), truth.end());
    };
    Rng rng(201);
    const auto res = diag::run_recovery(model, exact, cfg, rng);
    REQUIRE(res.r2.size() == 2);
    for (std::size_t g = 0; g < 2; ++g)
        for (std::size_t j = 0; j < 2; ++j) {
            CHECK(res.r2[g][j] == 1.0);
            CHECK(res.ci_low[g][j] == 1.0);
            CHECK(res.ci_high[g][j] == 1.0);
        }

    const diag::Estimator constant = [](const diff::Tensor&, std::span<const double>, Rng&) {
        return std::vector<double>{0.0, 0.0};
    };
    Rng rng2(202);
    const auto flat = diag::run_recovery(model, constant, cfg, rng2);
    for (std::size_t j = 0; j < 2; ++j) {
        CHECK(flat.r2[0][j] <= 0.0);
        CHECK(flat.ci_low[0][j] <= flat.r2[0][j]);
        CHECK(flat.r2[0][j] <= flat.ci_high[0][j]);
    }
}

TEST_CASE("recovery with the exact posterior mean improves with n") {
    const sim::GaussianToyModel model;
    diag::RecoveryConfig cfg;
    cfg.n_grid = {2, 200};
    cfg.replications = 200;
    cfg.bootstrap = 200;
    Rng rng(203);
    const auto res = diag::run_recovery(model, diag::posterior_mean_estimator(gaussian_sampler(), 400), cfg, rng);
    for (std::size_t j = 0; j < 2; ++j) {
        // Var(post mean) / Var(mu) = n / (n + 1) for the conjugate model.
        CHECK(res.r2[0][j] == doctest::Approx(2.0 / 3.0).epsilon(0.15));
        CHECK(res.r2[1][j] > 0.98);
        CHECK(res.r2[1][j] > res.r2[0][j]);
    }
    Rng a(9), b(9);
    cfg.replications = 20;
    const auto e1 = diag::run_recovery(model, diag::posterior_mean_estimator(gaussian_sampler(), 50), cfg, a);
    cfg.threads = 2;
    const auto e2 = diag::run_recovery(model, diag::posterior_mean_estimator(gaussian_sampler(), 50), cfg, b);
    CHECK(e1.estimate == e2.estimate);
    CHECK(e1.r2 == e2.r2);
}

TEST_CASE("posterior summary") {
    Rng rng(301);
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < 20000; ++i) {
        const double x = rng.normal(), y = rng.normal(3.0, 2.0);
        rows.push_back({x, y, 2.0 * x + 1.0, 5.0});
    }
    const auto s = diag::summarize_posterior(draws_from(rows, {"x", "y", "x2", "c"}));
    CHECK(s.mean[0] == doctest::Approx(0.0).scale(1.0).epsilon(0.03));
    CHECK(s.sd[1] == doctest::Approx(2.0).epsilon(0.03));
    CHECK(s.lower[0] == doctest::Approx(-1.96).epsilon(0.05));
    CHECK(s.upper[0] == doctest::Approx(1.96).epsilon(0.05));
    CHECK(std::abs(*s.corr(0, 1)) < 0.03);
    CHECK(*s.corr(0, 2) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(*s.corr(1, 1) == 1.0);
    CHECK_FALSE(s.corr(3, 0).has_value());
    CHECK_FALSE(s.corr(3, 3).has_value());
    CHECK(s.sd[3] == 0.0);
    CHECK(s.lower[3] == 5.0);

    CHECK_THROWS_AS(diag::summarize_posterior(draws_from({{1.0}}, {"x"})), ContractError);
    const std::vector<double> sorted{1, 2, 3, 4, 5};
    CHECK(diag::quantile_sorted(sorted, 0.5) == 3.0);
    CHECK(diag::quantile_sorted(sorted, 0.1) == doctest::Approx(1.4));
}

TEST_CASE("bayes factors") {
    const std::vector<double> uniform2{0.5, 0.5};
    const std::vector<double> post{0.8, 0.2};
    const auto bf = diag::bayes_factors(post, uniform2);
    CHECK(bf[0][1] == doctest::Approx(4.0));
    CHECK(bf[1][0] == doctest::Approx(0.25));
    CHECK(bf[0][0] == 1.0);
    const std::vector<double> skew_prior{0.2, 0.8};
    CHECK(diag::bayes_factors(post, skew_prior)[0][1] == doctest::Approx(16.0));

    const std::vector<double> p3{0.5, 0.3, 0.2};
    const std::vector<double> prior3{0.2, 0.3, 0.5};
    const auto b3 = diag::bayes_factors(p3, prior3);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
            CHECK(b3[i][j] * b3[j][i] == doctest::Approx(1.0).epsilon(1e-12));
            for (std::size_t k = 0; k < 3; ++k) CHECK(b3[i][k] == doctest::Approx(b3[i][j] * b3[j][k]).epsilon(1e-12));
        }
    const std::vector<double> bad{0.7, 0.7};
    CHECK_THROWS_AS(diag::bayes_factors(bad, uniform2), ContractError);
    const std::vector<double> zero_prior{1.0, 0.0};
    CHECK_THROWS_AS(diag::bayes_factors(post, zero_prior), ContractError);
}
