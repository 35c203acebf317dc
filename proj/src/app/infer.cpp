#include "amortize/app/infer.hpp"

#include "amortize/random.hpp"
#include "amortize/sim/batch.hpp"

#include <chrono>

namespace amortize::app {

InferResult infer_many(const nets::PosteriorNetwork& net, const diff::ParameterSet& params,
                       std::span<const diff::Tensor> tables, std::size_t draws, std::uint64_t seed,
                       std::size_t threads) {
    using clock = std::chrono::steady_clock;
    InferResult result;
    result.draws.resize(tables.size());
    result.seconds.assign(tables.size(), 0.0);
    const auto start = clock::now();
    sim::parallel_for(tables.size(), threads, [&](std::size_t i) {
        const auto t0 = clock::now();
        Rng rng(split_seed(seed, i));
        result.draws[i] = net.sample_for(params, tables[i], draws, rng);
        result.seconds[i] = std::chrono::duration<double>(clock::now() - t0).count();
    });
    result.total_seconds = std::chrono::duration<double>(clock::now() - start).count();
    return result;
}

std::vector<nets::DirichletOutput> compare_many(const nets::EvidentialNet& net, const diff::ParameterSet& params,
                                                std::span<const diff::Tensor> tables, std::size_t threads) {
    std::vector<nets::DirichletOutput> out(tables.size());
    sim::parallel_for(tables.size(), threads, [&](std::size_t i) { out[i] = net.forward(params, tables[i]); });
    return out;
}

}  // namespace amortize::app
