#include "amortize/sim/batch.hpp"

#include "amortize/errors.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <thread>

namespace amortize::sim {

diff::Tensor SimBatch::theta_matrix() const {
    if (thetas.empty()) throw ContractError("empty batch");
    const std::size_t d = thetas.front().size();
    std::vector<double> flat;
    flat.reserve(thetas.size() * d);
    for (const auto& t : thetas) {
        if (t.size() != d) throw DimensionError("batch mixes parameter vectors of different widths");
        flat.insert(flat.end(), t.begin(), t.end());
    }
    return diff::Tensor({thetas.size(), d}, std::move(flat));
}

diff::Tensor SimBatch::stacked_data() const {
    if (data.empty()) throw ContractError("empty batch");
    const std::size_t cols = data.front().cols();
    std::vector<double> flat;
    flat.reserve(data.size() * n * cols);
    for (const auto& d : data) {
        if (d.rows() != n || d.cols() != cols) throw DimensionError("batch datasets differ in shape");
        flat.insert(flat.end(), d.data().begin(), d.data().end());
    }
    return diff::Tensor({data.size() * n, cols}, std::move(flat));
}

std::size_t default_threads() {
    if (const char* env = std::getenv("AMORTIZE_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<std::size_t>(v);
    }
    return 1;
}

void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& job) {
    threads = std::max<std::size_t>(1, std::min(threads, count));
    if (threads == 1) {
        for (std::size_t i = 0; i < count; ++i) job(i);
        return;
    }
    std::vector<std::exception_ptr> errors(threads);
    {
        std::vector<std::jthread> workers;
        for (std::size_t w = 0; w < threads; ++w) {
            workers.emplace_back([&, w] {
                try {
                    for (std::size_t i = w; i < count; i += threads) job(i);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

SimBatch make_batch(std::span<const SimulationModel* const> models, std::size_t batch_size, NRange range,
                    bool comparison, Rng& rng, std::size_t threads) {
    if (batch_size == 0) throw ContractError("make_batch: batch size must be at least 1");
    if (models.empty()) throw ContractError("make_batch: no models");
    if (!comparison && models.size() != 1) throw ContractError("make_batch: parameter batches use a single model");
    if (range.lo == 0 || range.lo > range.hi) throw ContractError("make_batch: invalid n range");

    SimBatch batch;
    batch.n = static_cast<std::size_t>(
        rng.uniform_int(static_cast<std::int64_t>(range.lo), static_cast<std::int64_t>(range.hi)));
    if (comparison) {
        batch.model_index.resize(batch_size);
        for (auto& m : batch.model_index) m = static_cast<int>(rng.uniform_int(0, std::int64_t(models.size()) - 1));
    }
    std::vector<std::uint64_t> seeds(batch_size);
    for (auto& s : seeds) s = rng.next_u64();

    batch.thetas.resize(batch_size);
    batch.data.resize(batch_size);
    std::vector<SimStats> stats(batch_size);
    parallel_for(batch_size, threads, [&](std::size_t b) {
        const SimulationModel& model = *models[comparison ? static_cast<std::size_t>(batch.model_index[b]) : 0];
        Rng local(seeds[b]);
        batch.thetas[b] = sample_prior(model.prior(), local);
        batch.data[b] = model.simulate_encoded(batch.thetas[b], batch.n, local, stats[b]);
    });
    for (const auto& s : stats) batch.stats += s;
    return batch;
}

}  // namespace amortize::sim
