#include <cmath>
#include <cstdlib>

#include "conewalk/error.hpp"
#include "conewalk/kernel.hpp"
#include "doctest.h"
#include "support/models.hpp"
#include "support/oracle.hpp"

using namespace conewalk;

namespace {

Point start_point(const WalkModel& m) {
    return m.cone.interior_witness();
}

// splitmix64, kept local so test randomness is reproducible and self-contained
struct Rng {
    uint64_t s;
    uint64_t next() {
        s += 0x9e3779b97f4a7c15ull;
        uint64_t z = s;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    int64_t uniform(int64_t lo, int64_t hi) { return lo + int64_t(next() % uint64_t(hi - lo + 1)); }
};

}  // namespace

TEST_CASE("exact evolution equals path enumeration on the corpus") {
    for (const auto& m : corpus::all()) {
        Point x = start_point(m);
        auto dp = evolve_exact(m, x, 6);
        auto ref = oracle::enumerate(m, x, 6);
        REQUIRE(dp.size() == 7);
        for (int n = 0; n <= 6; ++n) {
            CAPTURE(n);
            CHECK(dp[size_t(n)].killed == ref[size_t(n)].killed);
            REQUIRE(dp[size_t(n)].mass.size() == ref[size_t(n)].mass.size());
            for (const auto& [p, mass] : ref[size_t(n)].mass) {
                auto it = dp[size_t(n)].mass.find(p);
                REQUIRE(it != dp[size_t(n)].mass.end());
                CHECK(it->second == mass);  // exact rational equality
            }
        }
    }
}

TEST_CASE("float engines match the exact slices") {
    for (const auto& m : corpus::all()) {
        Point x = start_point(m);
        auto ref = oracle::enumerate(m, x, 6);
        for (bool sparse : {false, true}) {
            CAPTURE(sparse);
            WindowPolicy policy;
            policy.force_sparse = sparse;
            Evolution ev(m, x, policy);
            for (int n = 0; n <= 6; ++n) {
                CAPTURE(n);
                for (const auto& [p, mass] : ref[size_t(n)].mass)
                    CHECK(ev.value_at(p) == doctest::Approx(to_double(mass)).epsilon(1e-12));
                CHECK(ev.killed_mass() ==
                      doctest::Approx(to_double(ref[size_t(n)].killed)).epsilon(1e-12));
                if (n < 6) ev.advance();
            }
        }
    }
}

TEST_CASE("dense and sparse engines agree cell by cell") {
    WalkModel m = corpus::quadrant_srw();
    WindowPolicy sp;
    sp.force_sparse = true;
    Evolution dense(m, {2, 1});
    Evolution sparse(m, {2, 1}, sp);
    for (int n = 0; n < 40; ++n) {
        dense.advance();
        sparse.advance();
    }
    CHECK(dense.total_mass() == doctest::Approx(sparse.total_mass()).epsilon(1e-13));
    sparse.for_each([&](const Point& p, double v) {
        CHECK(dense.value_at(p) == doctest::Approx(v).epsilon(1e-12));
    });
}

TEST_CASE("conservation: stored + killed = 1") {
    for (const auto& m : corpus::all()) {
        Evolution ev(m, start_point(m));
        for (int n = 1; n <= 500; ++n) {
            ev.advance();
            double total = ev.total_mass() + ev.killed_mass() + ev.dropped_mass();
            REQUIRE(std::abs(total - 1.0) < 1e-12);
        }
    }
}

TEST_CASE("frozen survival oracles") {
    // half-line SRW from 1: paths of length 3 staying positive
    CHECK(oracle::survival(corpus::halfline_srw(), {1}, 3) == Rational(3, 8));
    CHECK(survival(corpus::halfline_srw(), {1}, 3) == doctest::Approx(0.375));
    // quadrant SRW from (1,1)
    CHECK(oracle::survival(corpus::quadrant_srw(), {1, 1}, 2) == Rational(3, 8));
    CHECK(survival(corpus::quadrant_srw(), {1, 1}, 2) == doctest::Approx(0.375));
}

TEST_CASE("survival series matches single calls and decreases") {
    WalkModel m = corpus::asymmetric_1d();
    std::vector<int64_t> cp = {1, 2, 4, 8, 16, 32};
    auto series = survival_series(m, {2}, cp);
    REQUIRE(series.size() == cp.size());
    for (size_t i = 0; i < cp.size(); ++i)
        CHECK(series[i] == doctest::Approx(survival(m, {2}, cp[i])).epsilon(1e-14));
    for (size_t i = 1; i < series.size(); ++i) CHECK(series[i] <= series[i - 1]);
    CHECK_THROWS_AS(survival_series(m, {2}, {8, 4}), Error);
}

TEST_CASE("time reversal identity on random triples") {
    Rng rng{20240817ull};
    for (const auto& m : corpus::all()) {
        const int d = m.dim();
        int checked = 0;
        while (checked < 25) {
            Point x = Point::zero(d), y = Point::zero(d);
            for (int i = 0; i < d; ++i) x[i] = rng.uniform(1, 5);
            for (int i = 0; i < d; ++i) y[i] = rng.uniform(1, 7);
            if (!m.cone.contains(x) || !m.cone.contains(y)) continue;
            int64_t n = rng.uniform(1, 24);
            auto [fwd, bwd] = time_reversal_check(m, x, y, n);
            CAPTURE(x.str());
            CAPTURE(y.str());
            CAPTURE(n);
            CHECK(std::abs(fwd - bwd) < 1e-12);
            ++checked;
        }
    }
}

TEST_CASE("frozen green oracles on the half-line") {
    WalkModel m = corpus::halfline_srw();
    // truncated sum at horizon 3: n=0 contributes 1, n=2 contributes 1/4
    CHECK(oracle::green_truncated(m, {1}, {1}, 3) == Rational(5, 4));
    GreenResult g3 = green(m, {1}, {1}, 3, false);
    CHECK(g3.truncated_sum == doctest::Approx(1.25).epsilon(1e-14));
    CHECK(g3.tail_method == GreenResult::TailMethod::None);

    // closed form G(1,y) = 2 min(1,y) = 2 with tail extrapolation
    GreenResult g = green(m, {1}, {4}, 30000, true);
    CHECK(g.tail_method == GreenResult::TailMethod::PowerLaw);
    CHECK(g.fitted_decay_exponent == doctest::Approx(-1.5).epsilon(0.01));
    CHECK(g.value() == doctest::Approx(2.0).epsilon(0.005));
}

TEST_CASE("green against enumeration at small horizon") {
    WalkModel m = corpus::quadrant_srw();
    Point x{1, 1};
    std::vector<Point> targets = {{1, 1}, {2, 2}, {1, 3}};
    auto many = green_many(m, x, targets, 7, false);
    for (size_t t = 0; t < targets.size(); ++t) {
        CAPTURE(targets[t].str());
        Rational ref = oracle::green_truncated(m, x, targets[t], 7);
        CHECK(many[t].truncated_sum == doctest::Approx(to_double(ref)).epsilon(1e-13));
    }
}

TEST_CASE("green outside the cone is zero") {
    WalkModel m = corpus::quadrant_srw();
    GreenResult g = green(m, {1, 1}, {0, 3}, 100, true);
    CHECK(g.value() == 0.0);
    CHECK(g.error_flag == GreenResult::Flag::Converged);
}

TEST_CASE("local_prob and local_series agree") {
    WalkModel m = corpus::halfplane_srw();
    Point x{0, 1}, y{2, 3};
    auto series = local_series(m, x, {y}, 16);
    REQUIRE(series.size() == 1);
    REQUIRE(series[0].size() == 16);
    for (int64_t n : {1, 5, 10, 15})
        CHECK(series[0][size_t(n)] == doctest::Approx(local_prob(m, x, y, n)).epsilon(1e-14));
}

TEST_CASE("window overflow refuses silent truncation") {
    WalkModel m = corpus::quadrant_srw();
    WindowPolicy tight;
    tight.max_cells = 8;
    Evolution ev(m, {3, 3}, tight);
    CHECK_THROWS_WITH_AS(
        [&] {
            for (int i = 0; i < 12; ++i) ev.advance();
        }(),
        doctest::Contains("WindowOverflow"), Error);

    // a clip budget makes the same run legal, and the clipped mass is tracked
    WindowPolicy lossy;
    lossy.force_sparse = true;  // the dense engine thins by drop_eps instead of clipping
    lossy.max_cells = 8;
    lossy.clip_tolerance = 2.0;
    Evolution ok(m, {3, 3}, lossy);
    for (int i = 0; i < 12; ++i) ok.advance();
    CHECK(ok.dropped_mass() > 0.0);
    CHECK(ok.total_mass() + ok.killed_mass() + ok.dropped_mass() ==
          doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("stopped functional matches enumeration") {
    WalkModel m = corpus::quadrant_srw();
    WalkModel rev = reverse(m);
    auto u = [](const Point& p) { return double(p[0] * p[1]); };
    const double R = 1.0, rho = 0.25;
    auto ref = oracle::stopped_functional(rev, {5, 1}, R, rho, u, 10);
    StoppedFunctionalResult sf = stopped_functional(rev, {5, 1}, R, rho, u, 10);
    CHECK(sf.value == doctest::Approx(ref.value).epsilon(1e-12));
    CHECK(sf.stopped_mass == doctest::Approx(to_double(ref.stopped)).epsilon(1e-12));
    CHECK(sf.unstopped_mass == doctest::Approx(to_double(ref.unstopped)).epsilon(1e-12));
}

TEST_CASE("frozen stopped oracle on the half-line") {
    WalkModel rev = reverse(corpus::halfline_srw());
    auto u = [](const Point& p) { return double(p[0]); };
    // R=2, rho=1/2: z is absorbed iff z >= 2 sqrt(z), i.e. z >= 4. From y=1
    // within 6 steps the first entry is always at 4: one path of length 3 and
    // two of length 5, so value = 4 * (1/8 + 2/32) = 3/4; 8 length-6 paths
    // confined to {1,2,3} remain unstopped: 8/64 = 1/8.
    auto ref = oracle::stopped_functional(rev, {1}, 2.0, 0.5, u, 6);
    StoppedFunctionalResult sf = stopped_functional(rev, {1}, 2.0, 0.5, u, 6);
    CHECK(sf.value == doctest::Approx(ref.value).epsilon(1e-12));
    CHECK(sf.value == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(sf.stopped_mass == doctest::Approx(3.0 / 16.0).epsilon(1e-12));
    CHECK(sf.unstopped_mass == doctest::Approx(0.125).epsilon(1e-12));
}

TEST_CASE("evolution accessors and validation") {
    WalkModel m = corpus::quadrant_srw();
    Evolution ev(m, {2, 3});
    CHECK(ev.n() == 0);
    CHECK(ev.origin() == Point{2, 3});
    CHECK(ev.value_at(Point{2, 3}) == 1.0);
    CHECK(ev.total_mass() == 1.0);
    ev.advance_to(5);
    CHECK(ev.n() == 5);
    CHECK_THROWS_AS(ev.advance_to(3), Error);
    CHECK_THROWS_AS(Evolution(m, {0, 3}), Error);  // start outside the open cone

    MassTable t = ev.snapshot();
    CHECK(t.n == 5);
    CHECK(t.total() == doctest::Approx(ev.total_mass()));
    for (size_t i = 1; i < t.entries.size(); ++i) CHECK(t.entries[i - 1].first < t.entries[i].first);
}

TEST_CASE("evolve streams every step and stops on demand") {
    WalkModel m = corpus::halfline_srw();
    int64_t seen = 0;
    evolve(m, {1}, 10, [&](const Evolution& ev) {
        CHECK(ev.n() == seen);
        ++seen;
        return ev.n() < 7;
    });
    CHECK(seen == 8);  // visited n = 0..7, stopped by the callback

    auto tables = evolve_tables(m, {1}, 4);
    REQUIRE(tables.size() == 5);
    CHECK(tables[0].value_at(Point{1}) == 1.0);
    CHECK(tables[2].value_at(Point{1}) == doctest::Approx(0.25));
}

TEST_CASE("truncated green sums grow with the horizon") {
    WalkModel m = corpus::halfline_srw();
    double prev = 0.0;
    for (int64_t h : {8, 16, 32, 64}) {
        GreenResult g = green(m, {1}, {3}, h, false);
        CHECK(g.truncated_sum >= prev - 1e-15);
        prev = g.truncated_sum;
    }
    CHECK(prev > 0.0);
    // and the infinite sum dominates every truncation: G(1,3) = 2*min(1,3) = 2
    CHECK(prev < 2.0);
}

TEST_CASE("local probabilities obey the n^{-p-d/2} ceiling") {
    // p = 2 for the quadrant, d = 2, so n^3 * P(x+S(n)=y, tau>n) stays bounded;
    // we track max n^2 * P as a cruder monotone witness that extending the
    // horizon never inflates the bound already certified on a prefix.
    WalkModel m = corpus::quadrant_srw();
    auto bound_up_to = [&m](int64_t horizon) {
        auto series = local_series(m, {1, 1}, {Point{2, 1}}, horizon)[0];
        double b = 0.0;
        for (int64_t n = 10; n < horizon; ++n)
            b = std::max(b, double(n) * double(n) * series[size_t(n)]);
        return b;
    };
    double b256 = bound_up_to(256);
    double b512 = bound_up_to(512);
    CHECK(b256 > 0.0);
    CHECK(b512 <= b256 + 1e-12);
}
