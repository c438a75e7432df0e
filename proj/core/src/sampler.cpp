#include "conewalk/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <thread>
#include <vector>

#include "conewalk/error.hpp"
#include "conewalk/rational.hpp"

namespace conewalk {

namespace {

constexpr int64_t kBlock = 4096;

struct SplitMix {
    uint64_t state;
    uint64_t next() {
        state += 0x9e3779b97f4a7c15ull;
        uint64_t z = state;
        z = (z ^ (z >> 30u)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27u)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31u);
    }
    double unit() {
        constexpr double kScale = 1.0 / 9007199254740992.0;
        return double(next() >> 11u) * kScale;
    }
};

SplitMix block_rng(uint64_t seed, int64_t block) {
    SplitMix warm{seed ^ (uint64_t(block) * 0xd1b54a32d192ed03ull)};
    return SplitMix{warm.next()};
}

struct Sampler {
    std::vector<Point> steps;
    std::vector<double> cum;  // cumulative probabilities, last entry 1

    explicit Sampler(const WalkModel& model) {
        double acc = 0.0;
        for (const Atom& a : model.effective_atoms()) {
            steps.push_back(a.step);
            acc += to_double(a.prob);
            cum.push_back(acc);
        }
        cum.back() = 1.0;
    }

    const Point& draw(SplitMix& rng) const {
        const double u = rng.unit();
        size_t i = 0;
        while (i + 1 < cum.size() && u >= cum[i]) ++i;
        return steps[i];
    }
};

// Runs `body(block_index)` over all blocks, single- or multi-threaded; the
// caller reduces per-block tallies in index order, so results do not depend
// on the thread count.
void run_blocks(int64_t blocks, int threads, const std::function<void(int64_t)>& body) {
    if (threads <= 1) {
        for (int64_t b = 0; b < blocks; ++b) body(b);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(size_t(threads));
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&, t] {
            for (int64_t b = t; b < blocks; b += threads) body(b);
        });
    for (auto& th : pool) th.join();
}

}  // namespace

McEstimate mc_survival(const WalkModel& model, Point x, int64_t n, int64_t samples,
                       uint64_t seed, int threads) {
    if (n < 0) fail("sampler", "BadParameter", "n must be >= 0");
    if (samples < 1) fail("sampler", "BadParameter", "samples must be >= 1");
    if (!model.cone.contains(x))
        fail("sampler", "OutsideCone", "start point " + x.str() + " is not in the open cone");
    const Sampler law(model);
    const int64_t blocks = (samples + kBlock - 1) / kBlock;
    std::vector<int64_t> alive(size_t(blocks), 0);
    run_blocks(blocks, threads, [&](int64_t b) {
        SplitMix rng = block_rng(seed, b);
        const int64_t in_block = std::min(kBlock, samples - b * kBlock);
        int64_t count = 0;
        for (int64_t s = 0; s < in_block; ++s) {
            Point pos = x;
            bool ok = true;
            for (int64_t step = 0; step < n; ++step) {
                pos = pos + law.draw(rng);
                if (!model.cone.contains(pos)) {
                    ok = false;
                    break;
                }
            }
            count += ok;
        }
        alive[size_t(b)] = count;
    });
    int64_t total = 0;
    for (int64_t c : alive) total += c;
    McEstimate e;
    e.n_samples = samples;
    e.rng_seed = seed;
    e.mean = double(total) / double(samples);
    e.std_error = std::sqrt(e.mean * (1.0 - e.mean) / double(samples));
    return e;
}

McEstimate mc_green(const WalkModel& model, Point x, Point y, int64_t horizon,
                    int64_t samples, uint64_t seed, int threads) {
    if (samples < 1) fail("sampler", "BadParameter", "samples must be >= 1");
    if (horizon < 1) fail("sampler", "BadParameter", "horizon must be >= 1");
    if (!model.cone.contains(x))
        fail("sampler", "OutsideCone", "start point " + x.str() + " is not in the open cone");
    const Sampler law(model);
    const int64_t blocks = (samples + kBlock - 1) / kBlock;
    std::vector<int64_t> vsum(size_t(blocks), 0), vsq(size_t(blocks), 0);
    run_blocks(blocks, threads, [&](int64_t b) {
        SplitMix rng = block_rng(seed, b);
        const int64_t in_block = std::min(kBlock, samples - b * kBlock);
        int64_t bs = 0, bq = 0;
        for (int64_t s = 0; s < in_block; ++s) {
            Point pos = x;
            int64_t visits = pos == y ? 1 : 0;
            for (int64_t step = 1; step < horizon; ++step) {
                pos = pos + law.draw(rng);
                if (!model.cone.contains(pos)) break;
                visits += pos == y;
            }
            bs += visits;
            bq += visits * visits;
        }
        vsum[size_t(b)] = bs;
        vsq[size_t(b)] = bq;
    });
    int64_t total = 0, total_sq = 0;
    for (size_t b = 0; b < vsum.size(); ++b) {
        total += vsum[b];
        total_sq += vsq[b];
    }
    McEstimate e;
    e.n_samples = samples;
    e.rng_seed = seed;
    e.mean = double(total) / double(samples);
    if (samples > 1) {
        const double var =
            (double(total_sq) - double(total) * double(total) / double(samples)) /
            double(samples - 1);
        e.std_error = std::sqrt(std::max(var, 0.0) / double(samples));
    }
    return e;
}

}  // namespace conewalk
