#include <cmath>

#include "conewalk/error.hpp"
#include "conewalk/kernel.hpp"
#include "conewalk/rational.hpp"
#include "conewalk/sampler.hpp"
#include "doctest.h"
#include "support/models.hpp"
#include "support/oracle.hpp"

using namespace conewalk;

TEST_CASE("same seed reproduces bit for bit, new seed does not") {
    WalkModel m = corpus::quadrant_srw();
    McEstimate a = mc_survival(m, {1, 1}, 64, 20000, 7);
    McEstimate b = mc_survival(m, {1, 1}, 64, 20000, 7);
    CHECK(a.mean == b.mean);
    CHECK(a.std_error == b.std_error);
    CHECK(a.n_samples == 20000);
    CHECK(a.rng_seed == 7);
    McEstimate c = mc_survival(m, {1, 1}, 64, 20000, 8);
    CHECK(a.mean != c.mean);
}

TEST_CASE("thread count does not change the estimate") {
    WalkModel m = corpus::quadrant_srw();
    McEstimate t1 = mc_survival(m, {2, 3}, 128, 30000, 424242, 1);
    McEstimate t4 = mc_survival(m, {2, 3}, 128, 30000, 424242, 4);
    CHECK(t1.mean == t4.mean);
    CHECK(t1.std_error == t4.std_error);

    McEstimate g1 = mc_green(m, {1, 1}, {2, 2}, 64, 30000, 99, 1);
    McEstimate g3 = mc_green(m, {1, 1}, {2, 2}, 64, 30000, 99, 3);
    CHECK(g1.mean == g3.mean);
    CHECK(g1.std_error == g3.std_error);
}

TEST_CASE("mc_survival agrees with the exact slices") {
    WalkModel m = corpus::halfline_srw();
    const double exact = to_double(oracle::survival(m, {1}, 9));
    McEstimate est = mc_survival(m, {1}, 9, 200000, 20240815, 2);
    CHECK(est.std_error > 0.0);
    CHECK(std::abs(est.mean - exact) < 4.0 * est.std_error);
}

TEST_CASE("mc_green agrees with the truncated series") {
    WalkModel m = corpus::quadrant_srw();
    GreenResult dp = green(m, {1, 1}, {2, 1}, 256, false);
    McEstimate est = mc_green(m, {1, 1}, {2, 1}, 256, 200000, 31337, 2);
    CHECK(std::abs(est.mean - dp.truncated_sum) < 4.0 * est.std_error);

    // n = 0 self-visit counts: from x = y the mean is at least 1
    McEstimate self = mc_green(m, {1, 1}, {1, 1}, 256, 20000, 5);
    CHECK(self.mean >= 1.0);
}

TEST_CASE("asymmetric law is sampled with the right weights") {
    WalkModel m = corpus::asymmetric_1d();
    const double exact = to_double(oracle::survival(m, {1}, 6));
    McEstimate est = mc_survival(m, {1}, 6, 200000, 1729, 2);
    CHECK(std::abs(est.mean - exact) < 4.0 * est.std_error);
}

TEST_CASE("parameter validation") {
    WalkModel m = corpus::quadrant_srw();
    CHECK_THROWS_AS(mc_survival(m, {1, 1}, 16, 0, 1), Error);
    CHECK_THROWS_AS(mc_survival(m, {0, 1}, 16, 100, 1), Error);  // start outside
    CHECK_THROWS_AS(mc_green(m, {1, 1}, {1, 1}, 0, 100, 1), Error);
    CHECK_THROWS_AS(mc_survival(m, {1, 1}, -1, 100, 1), Error);
}

TEST_CASE("single-step survival isolates each atom weight") {
    // survival after one step is the total weight of non-killing atoms, so a
    // miscoded sampling table shows up immediately
    WalkModel quad = corpus::quadrant_srw();
    McEstimate q = mc_survival(quad, {1, 1}, 1, 200000, 11);
    CHECK(std::abs(q.mean - 0.5) < 4.0 * q.std_error);

    WalkModel asym = corpus::asymmetric_1d();
    McEstimate a = mc_survival(asym, {1}, 1, 200000, 12);
    CHECK(std::abs(a.mean - 1.0 / 3.0) < 4.0 * a.std_error);
}
