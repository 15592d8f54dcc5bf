#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace mdmkit {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// mt19937_64 with a portable double conversion; uniform_real_distribution is
// implementation-defined, so results would otherwise differ across stdlibs.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    std::uint64_t bits() { return eng_(); }

  private:
    std::mt19937_64 eng_;
};

// Stream seed for batch `index` of a run with master `seed`.
inline std::uint64_t batch_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t s = seed ^ (0x5851f42d4c957f2dULL * (index + 1));
    return splitmix64(s);
}

// Worker cap from MDMKIT_WORKERS (default: hardware concurrency).
int worker_count();

// Runs `fn(batch_index, samples_in_batch, rng)` for every fixed-size batch,
// possibly on several workers, and returns the partial results in batch
// order. The caller folds them sequentially, so the reduction is identical
// for every worker count.
template <typename R, typename Fn>
std::vector<R> map_batches(std::uint64_t seed, std::uint64_t samples, std::uint64_t batch_size,
                           Fn&& fn);

}  // namespace mdmkit

#include <atomic>
#include <thread>

namespace mdmkit {

template <typename R, typename Fn>
std::vector<R> map_batches(std::uint64_t seed, std::uint64_t samples, std::uint64_t batch_size,
                           Fn&& fn) {
    std::uint64_t n_batches = (samples + batch_size - 1) / batch_size;
    std::vector<R> partials(n_batches);
    int workers = worker_count();
    if (workers > 1 && n_batches > 1) {
        std::atomic<std::uint64_t> next{0};
        auto run = [&]() {
            for (;;) {
                std::uint64_t b = next.fetch_add(1);
                if (b >= n_batches) break;
                std::uint64_t count = std::min(batch_size, samples - b * batch_size);
                Rng rng(batch_seed(seed, b));
                partials[b] = fn(b, count, rng);
            }
        };
        std::vector<std::thread> pool;
        int n_threads = std::min<int>(workers, static_cast<int>(n_batches));
        pool.reserve(static_cast<size_t>(n_threads));
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(run);
        for (auto& th : pool) th.join();
    } else {
        for (std::uint64_t b = 0; b < n_batches; ++b) {
            std::uint64_t count = std::min(batch_size, samples - b * batch_size);
            Rng rng(batch_seed(seed, b));
            partials[b] = fn(b, count, rng);
        }
    }
    return partials;
}

}  // namespace mdmkit
