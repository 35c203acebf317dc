#pragma once

// Independent reference computations used as test oracles.

#include "amortize/diff/adam.hpp"
#include "amortize/diff/graph.hpp"
#include "amortize/random.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace testing {

using amortize::diff::Graph;
using amortize::diff::ParameterSet;
using amortize::diff::Tensor;
using amortize::diff::Var;

/// Builds a scalar loss from parameters registered on the given graph.
using LossBuilder = std::function<Var(Graph&, const ParameterSet&)>;

inline double evaluate(const LossBuilder& f, const ParameterSet& params) {
    Graph g;
    return f(g, params).value().item();
}

/// Central-difference gradient of f with respect to every parameter entry.
inline ParameterSet numeric_gradient(const LossBuilder& f, ParameterSet params, double h = 1e-5) {
    ParameterSet out;
    for (auto& [name, t] : params) {
        Tensor grad(t.shape());
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double keep = t[i];
            t[i] = keep + h;
            const double up = evaluate(f, params);
            t[i] = keep - h;
            const double down = evaluate(f, params);
            t[i] = keep;
            grad[i] = (up - down) / (2.0 * h);
        }
        out.emplace(name, std::move(grad));
    }
    return out;
}

inline ParameterSet analytic_gradient(const LossBuilder& f, const ParameterSet& params) {
    Graph g;
    const Var loss = f(g, params);
    return g.backward(loss);
}

/// max over parameters of ||a - n||_inf / max(||a||_inf, ||n||_inf, floor).
inline double gradient_error(const LossBuilder& f, const ParameterSet& params, double h = 1e-5,
                             double floor = 1e-8) {
    const auto a = analytic_gradient(f, params);
    const auto n = numeric_gradient(f, params, h);
    double worst = 0.0;
    for (const auto& [name, na] : n) {
        const Tensor& an = a.at(name);
        double diff = 0.0, scale = floor;
        for (std::size_t i = 0; i < na.size(); ++i) {
            diff = std::max(diff, std::abs(an[i] - na[i]));
            scale = std::max({scale, std::abs(an[i]), std::abs(na[i])});
        }
        worst = std::max(worst, diff / scale);
    }
    return worst;
}

inline Tensor random_tensor(amortize::Rng& rng, std::size_t rows, std::size_t cols, double lo = -2.0,
                            double hi = 2.0) {
    Tensor t = Tensor::matrix(rows, cols);
    for (auto& v : t.data()) v = rng.uniform(lo, hi);
    return t;
}

/// Every differentiable op of the tape.
inline std::vector<amortize::diff::OpKind> all_ops() {
    using amortize::diff::OpKind;
    return {OpKind::MatMul, OpKind::Add,      OpKind::Sub,    OpKind::Mul,     OpKind::Scale,
            OpKind::AddScalar, OpKind::AddRow, OpKind::Concat, OpKind::Split,   OpKind::Tanh,
            OpKind::Softplus, OpKind::Atan,    OpKind::Exp,    OpKind::Log,     OpKind::Square,
            OpKind::Neg,    OpKind::Sum,       OpKind::Mean,   OpKind::SumCols, OpKind::MeanPool};
}

/// Worst gradient error of sum(op(inputs) * R) over `trials` random shapes and inputs.
inline double op_gradient_error(amortize::diff::OpKind kind, int trials, amortize::Rng& rng) {
    using amortize::diff::OpArgs;
    using amortize::diff::OpKind;
    double worst = 0.0;
    for (int trial = 0; trial < trials; ++trial) {
        const std::size_t r = 1 + rng.uniform_int(0, 3);
        const std::size_t c = 1 + rng.uniform_int(0, 3);
        const bool positive = kind == OpKind::Log;
        std::vector<Tensor> inputs{random_tensor(rng, r, c, positive ? 0.1 : -2.0, 2.0)};
        OpArgs args;
        switch (kind) {
            case OpKind::MatMul:
                inputs.push_back(random_tensor(rng, c, 1 + rng.uniform_int(0, 3)));
                break;
            case OpKind::Add:
            case OpKind::Sub:
            case OpKind::Mul:
                inputs.push_back(random_tensor(rng, r, c));
                break;
            case OpKind::AddRow:
                inputs.push_back(random_tensor(rng, 1, c));
                break;
            case OpKind::Concat:
                inputs.push_back(random_tensor(rng, r, 1 + rng.uniform_int(0, 2)));
                break;
            case OpKind::Scale:
            case OpKind::AddScalar:
                args.scalar = rng.uniform(-2, 2);
                break;
            case OpKind::Split:
                args.begin = rng.uniform_int(0, static_cast<std::int64_t>(c) - 1);
                args.end = args.begin + 1 + rng.uniform_int(0, static_cast<std::int64_t>(c - args.begin) - 1);
                break;
            case OpKind::MeanPool: {
                const std::size_t groups = 1 + rng.uniform_int(0, 2);
                inputs[0] = random_tensor(rng, groups * r, c);
                args.groups = groups;
                break;
            }
            default:
                break;
        }
        Graph probe;
        std::vector<Var> pv;
        for (const auto& t : inputs) pv.push_back(probe.constant(t));
        const Tensor out = apply(kind, pv, args).value();
        const Tensor weights = random_tensor(rng, out.rows(), out.cols());
        ParameterSet ps;
        for (std::size_t i = 0; i < inputs.size(); ++i) ps.emplace("x" + std::to_string(i), inputs[i]);
        const std::size_t n = inputs.size();
        const LossBuilder f = [kind, n, weights, args](Graph& g, const ParameterSet& params) {
            std::vector<Var> ins;
            for (std::size_t i = 0; i < n; ++i) {
                const std::string name = "x" + std::to_string(i);
                ins.push_back(g.parameter(name, params.at(name)));
            }
            return sum(mul(apply(kind, ins, args), g.constant(weights)));
        };
        worst = std::max(worst, gradient_error(f, ps));
    }
    return worst;
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// Asymptotic Kolmogorov survival function with the Stephens small-sample correction.
inline double kolmogorov_p(double d, double n_eff) {
    const double sq = std::sqrt(n_eff);
    const double lambda = (sq + 0.12 + 0.11 / sq) * d;
    if (lambda < 1e-3) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 200; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 ? 1.0 : -1.0) * term;
        if (term < 1e-16) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

/// One-sample KS p-value of `xs` against `cdf`.
inline double ks_one_sample(std::vector<double> xs, const std::function<double(double)>& cdf) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = cdf(xs[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return kolmogorov_p(d, n);
}

/// Two-sample KS p-value.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return kolmogorov_p(d, na * nb / (na + nb));
}

/// Probability that a Brownian motion with drift v and diffusion coefficient
/// sigma, started at z in (0, a), exits through a before 0.
inline double diffusion_upper_probability(double v, double sigma, double a, double z) {
    if (std::abs(v) < 1e-12) return z / a;
    const double k = 2.0 * v / (sigma * sigma);
    return std::expm1(-k * z) / std::expm1(-k * a);
}

/// Gaussian-increment random walk coded from scratch: returns the boundary hit
/// (1 upper, 0 lower) or -1 on timeout.
inline int gaussian_walk(double v, double a, double z, double dt, double t_max, amortize::Rng& rng) {
    const double noise = std::sqrt(2.0 * dt);
    double x = z;
    const auto steps = static_cast<long>(t_max / dt);
    for (long s = 0; s < steps; ++s) {
        x += v * dt + noise * rng.normal();
        if (x >= a) return 1;
        if (x <= 0.0) return 0;
    }
    return -1;
}

inline double mean_of(std::span<const double> xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

inline double sd_of(std::span<const double> xs) {
    const double m = mean_of(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

}  // namespace testing
