#pragma once

#include <cstdint>

#include "conewalk/model.hpp"
#include "conewalk/point.hpp"

namespace conewalk {

// Monte Carlo estimate; reproducible bit-for-bit for a given seed and any
// thread count (per-block integer tallies, reduced in block order).
struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    int64_t n_samples = 0;
    uint64_t rng_seed = 0;
};

// Fraction of sampled paths with x + S(1..n) all inside the cone.
McEstimate mc_survival(const WalkModel& model, Point x, int64_t n, int64_t samples,
                       uint64_t seed, int threads = 1);

// Mean number of visits to y at times 0 <= n < horizon before exit (the
// n = 0 visit counts when x == y).
McEstimate mc_green(const WalkModel& model, Point x, Point y, int64_t horizon,
                    int64_t samples, uint64_t seed, int threads = 1);

}  // namespace conewalk
