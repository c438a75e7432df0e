// Acceptance gate: one wall-clock-budgeted line per criterion, tolerances
// pinned below, nonzero exit when anything fails. Run via ctest or directly.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "conewalk/asymptotics.hpp"
#include "conewalk/geometry.hpp"
#include "conewalk/harmonic.hpp"
#include "conewalk/kernel.hpp"
#include "conewalk/model.hpp"
#include "conewalk/sampler.hpp"
#include "support/models.hpp"
#include "support/oracle.hpp"

using namespace conewalk;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string num(double v, int prec = 4) {
    std::ostringstream os;
    os << std::setprecision(prec) << v;
    return os.str();
}

const char* kModelNames[] = {"half-line", "quadrant", "half-plane", "asymmetric"};

// splitmix64; fixed seeds keep every run identical
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

// 1. Exact DP slices equal exhaustive path enumeration, n <= 6, all walks.
Outcome exact_vs_enumeration() {
    int slices = 0;
    auto models = corpus::all();
    for (size_t mi = 0; mi < models.size(); ++mi) {
        const WalkModel& m = models[mi];
        Point x = m.cone.interior_witness();
        auto got = evolve_exact(m, x, 6);
        auto want = oracle::enumerate(m, x, 6);
        for (int n = 0; n <= 6; ++n) {
            if (got[size_t(n)].mass != want[size_t(n)].mass)
                return {false, std::string(kModelNames[mi]) + ": slice differs at n=" +
                                   std::to_string(n)};
            if (got[size_t(n)].killed != want[size_t(n)].killed)
                return {false, std::string(kModelNames[mi]) + ": killed mass differs at n=" +
                                   std::to_string(n)};
            ++slices;
        }
    }
    return {true, std::to_string(slices) + " slices bit-exact across 4 walks"};
}

// 2. stored + killed + dropped = 1 within 1e-12 at every step to n = 1e4,
//    and the dropped share itself stays below 1e-12.
Outcome conservation() {
    double worst_gap = 0.0, worst_drop = 0.0;
    for (const WalkModel& m : corpus::all()) {
        evolve(m, m.cone.interior_witness(), 10000, [&](const Evolution& ev) {
            double gap =
                std::fabs(ev.total_mass() + ev.killed_mass() + ev.dropped_mass() - 1.0);
            if (gap > worst_gap) worst_gap = gap;
            if (ev.dropped_mass() > worst_drop) worst_drop = ev.dropped_mass();
            return gap <= 1e-12;
        });
        if (worst_gap > 1e-12) break;
    }
    if (worst_gap > 1e-12) return {false, "mass gap " + num(worst_gap, 3)};
    if (worst_drop > 1e-12) return {false, "dropped mass " + num(worst_drop, 3)};
    return {true, "max gap " + num(worst_gap, 3) + ", max dropped " + num(worst_drop, 3)};
}

// 3. local_prob(x,y,n) equals the reversed walk's local_prob(y,x,n) within
//    1e-12 on 200 random triples per walk.
Outcome time_reversal() {
    Rng rng{0x7bd5c8d85f3aa11cull};
    double worst = 0.0;
    auto models = corpus::all();
    for (size_t mi = 0; mi < models.size(); ++mi) {
        const WalkModel& m = models[mi];
        const WalkModel rev = reverse(m);
        const int d = m.dim();
        int done = 0;
        while (done < 200) {
            Point x = Point::zero(d), y = Point::zero(d);
            for (int i = 0; i < d; ++i) {
                x.c[i] = rng.uniform(-2, 8);
                y.c[i] = rng.uniform(-2, 8);
            }
            if (!m.cone.contains(x) || !m.cone.contains(y)) continue;
            int64_t n = rng.uniform(1, 24);
            double fwd = local_prob(m, x, y, n);
            double bwd = local_prob(rev, y, x, n);
            double diff = std::fabs(fwd - bwd);
            if (diff > worst) worst = diff;
            if (diff > 1e-12)
                return {false, std::string(kModelNames[mi]) + ": |fwd-bwd| = " + num(diff, 3) +
                                   " at n=" + std::to_string(n)};
            ++done;
        }
    }
    return {true, "800 triples, max gap " + num(worst, 3)};
}

// 4. Half-line SRW Green function: G(1,y) = 2 min(1,y) = 2. The formula is
//    first re-validated at horizon 1e6 (0.1%), then every y <= 50 is checked
//    at horizon 1e5 within 0.5%.
Outcome halfline_green_closed_form() {
    WalkModel m = corpus::halfline_srw();
    std::vector<Point> ref_ys = {{1}, {10}, {50}};
    auto ref = green_many(m, {1}, ref_ys, 1000000, true);
    for (size_t i = 0; i < ref.size(); ++i)
        if (std::fabs(ref[i].value() - 2.0) > 0.001 * 2.0)
            return {false, "reference run drifted: G(1," + ref_ys[i].str() +
                               ") = " + num(ref[i].value(), 6) + " at horizon 1e6"};

    std::vector<Point> ys;
    for (int64_t y = 1; y <= 50; ++y) ys.push_back({y});
    auto gs = green_many(m, {1}, ys, 100000, true);
    double worst = 0.0;
    for (size_t i = 0; i < gs.size(); ++i) {
        double rel = std::fabs(gs[i].value() - 2.0) / 2.0;
        if (rel > worst) worst = rel;
        if (rel > 0.005)
            return {false, "G(1," + ys[i].str() + ") = " + num(gs[i].value(), 6) + ", off by " +
                               num(rel * 100, 3) + "%"};
    }
    return {true, "y = 1..50 within 0.5% (worst " + num(worst * 100, 3) + "%)"};
}

// 5. u = x1*x2 has exactly zero discrete-harmonic residual on the whole
//    [1,50]^2 window, and estimate_V ratios reproduce u ratios within 1%.
Outcome quadrant_harmonicity() {
    WalkModel m = corpus::quadrant_srw();
    auto u = [](const Point& p) { return double(p[0] * p[1]); };
    for (int64_t a = 1; a <= 50; ++a)
        for (int64_t b = 1; b <= 50; ++b) {
            double r = harmonic_residual(m, u, {a, b});
            if (r != 0.0)
                return {false, "residual " + num(r, 3) + " at (" + std::to_string(a) + "," +
                                   std::to_string(b) + ")"};
        }

    std::vector<int64_t> sched = {0, 1, 2, 4, 8, 16, 32};
    std::vector<Point> pts = {{1, 1}, {2, 3}, {5, 5}, {10, 1}};
    double base = estimate_V(m, pts[0], u, sched, 1e-9).limit;
    if (base <= 0.0) return {false, "V(1,1) estimate not positive"};
    for (const Point& p : pts) {
        double est = estimate_V(m, p, u, sched, 1e-9).limit / base;
        double want = u(p) / u(pts[0]);
        if (std::fabs(est - want) > 0.01 * want)
            return {false, "V ratio at " + p.str() + " = " + num(est, 6) + ", want " +
                               num(want, 6)};
    }
    return {true, "2500 residuals exactly zero; V ratios within 1%"};
}

// 6. Interior regime: quadrant, y = (k,k), k = 10..40. The rescaled Green
//    ratio G |y|^4 / (V(x) u(y)) must plateau with spread < 10%.
Outcome interior_plateau() {
    WalkModel m = corpus::quadrant_srw();
    std::vector<int64_t> scales;
    for (int64_t k = 10; k <= 40; k += 2) scales.push_back(k);
    RatioSeries rs = verify_interior(m, {1, 1}, Vecd{1.0, 1.0}, scales, 0.2);
    if (rs.plateau_spread >= 0.10)
        return {false, "spread " + num(rs.plateau_spread * 100, 3) + "%"};
    return {true, "limit " + num(rs.fitted_limit) + ", spread " +
                      num(rs.plateau_spread * 100, 3) + "%"};
}

// 7. Half-space regime: half-plane, y = (k, ceil(sqrt(k))), k = 16..64.
//    G |y|^2 / (V(x) V'(y)) must plateau with spread < 15%.
Outcome halfspace_plateau() {
    WalkModel m = corpus::halfplane_srw();
    std::vector<int64_t> scales;
    for (int64_t k = 16; k <= 64; k += 8) scales.push_back(k);
    RatioSeries rs = verify_halfspace(m, {0, 1}, scales);
    if (rs.plateau_spread >= 0.15)
        return {false, "spread " + num(rs.plateau_spread * 100, 3) + "%"};
    return {true, "limit " + num(rs.fitted_limit) + ", spread " +
                      num(rs.plateau_spread * 100, 3) + "%"};
}

// 8. Boundary regime: quadrant, y = (k,1), k = 8..48, R = 1, rho = 0.25.
//    G |y|^3 / (V(x) E[u_sigma(y_rho); stopped]) must plateau with spread
//    < 20% and at most 5% unstopped mass at every point.
Outcome boundary_plateau() {
    WalkModel m = corpus::quadrant_srw();
    std::vector<int64_t> scales;
    for (int64_t k = 8; k <= 48; k += 4) scales.push_back(k);
    RatioSeries rs = verify_boundary(m, {1, 1}, Vecd{1.0, 0.0}, scales, 1.0, 0.25);
    if (rs.plateau_spread >= 0.20)
        return {false, "spread " + num(rs.plateau_spread * 100, 3) + "%"};
    for (const auto& col : rs.aux)
        if (col.first == "unstopped_frac")
            for (size_t i = 0; i < col.second.size(); ++i)
                if (col.second[i] >= 0.05)
                    return {false, "unstopped fraction " + num(col.second[i], 3) + " at " +
                                       rs.points[i].str()};
    return {true, "limit " + num(rs.fitted_limit) + ", spread " +
                      num(rs.plateau_spread * 100, 3) + "%"};
}

// 9. Martin kernel: quadrant G((2,3),y)/G((1,1),y) -> 6 within 2% along the
//    diagonal to (40,40); half-line G(3,y)/G(1,y) -> 3 within 1% by y = 50.
Outcome martin_limits() {
    {
        WalkModel m = corpus::quadrant_srw();
        std::vector<Point> path;
        for (int64_t k = 10; k <= 40; k += 5) path.push_back({k, k});
        RatioSeries rs = martin_kernel(m, {2, 3}, {1, 1}, path);
        double want = 6.0;
        if (std::fabs(rs.fitted_limit - want) > 0.02 * want)
            return {false, "quadrant limit " + num(rs.fitted_limit, 6)};
        if (std::fabs(rs.ratios.back() - want) > 0.02 * want)
            return {false, "quadrant endpoint ratio " + num(rs.ratios.back(), 6)};
    }
    WalkModel m = corpus::halfline_srw();
    std::vector<Point> path;
    for (int64_t y = 5; y <= 50; y += 5) path.push_back({y});
    RatioSeries rs = martin_kernel(m, {3}, {1}, path);
    double want = 3.0;
    if (std::fabs(rs.fitted_limit - want) > 0.01 * want)
        return {false, "half-line limit " + num(rs.fitted_limit, 6)};
    if (std::fabs(rs.ratios.back() - want) > 0.01 * want)
        return {false, "half-line endpoint ratio " + num(rs.ratios.back(), 6)};
    return {true, "6.000 and 3.000 within tolerance"};
}

// 10. Survival exponents over n in [1e3, 1e4]: fitted slope within 5% of
//     -1/2 (half-line) and -1 (quadrant); n^{p/2} P(tau > n) bounded below
//     and flat within a factor of 2 across the range.
Outcome survival_exponents() {
    std::vector<int64_t> cps = {1000, 2000, 4000, 8000, 10000};
    struct Case {
        WalkModel m;
        Point x;
        double slope;
        double p;
        const char* name;
    };
    std::vector<Case> cases = {{corpus::halfline_srw(), {1}, -0.5, 1.0, "half-line"},
                               {corpus::quadrant_srw(), {1, 1}, -1.0, 2.0, "quadrant"}};
    std::string note;
    for (const Case& c : cases) {
        double s = survival_slope(c.m, c.x, cps);
        if (std::fabs(s - c.slope) > 0.05 * std::fabs(c.slope))
            return {false, std::string(c.name) + " slope " + num(s, 4)};
        auto sv = survival_series(c.m, c.x, cps);
        double lo = 1e300, hi = 0.0;
        for (size_t i = 0; i < cps.size(); ++i) {
            double scaled = std::pow(double(cps[i]), c.p / 2.0) * sv[i];
            lo = std::min(lo, scaled);
            hi = std::max(hi, scaled);
        }
        if (lo <= 0.05) return {false, std::string(c.name) + " scaled survival " + num(lo, 4)};
        if (hi / lo >= 2.0)
            return {false, std::string(c.name) + " scaled survival wanders: " + num(lo, 4) +
                               ".." + num(hi, 4)};
        note += std::string(c.name) + " slope " + num(s, 4) + "  ";
    }
    return {true, note};
}

// 11. Monte Carlo vs dynamic programming: 20 queries, 1e5 samples each,
//     agreement within 4 standard errors at matched truncation.
Outcome monte_carlo_agreement() {
    auto models = corpus::all();
    uint64_t seed = 0xacce9700ull;
    int checked = 0;
    double worst_sigmas = 0.0;
    for (size_t mi = 0; mi < models.size(); ++mi) {
        const WalkModel& m = models[mi];
        Point x = m.cone.interior_witness();
        for (int64_t n : {16, 64, 256}) {
            McEstimate e = mc_survival(m, x, n, 100000, seed++);
            double dp = survival(m, x, n);
            double gap = std::fabs(e.mean - dp);
            if (gap > 4.0 * e.std_error + 1e-12)
                return {false, std::string(kModelNames[mi]) + " survival n=" +
                                   std::to_string(n) + ": mc " + num(e.mean, 5) + " vs dp " +
                                   num(dp, 5)};
            if (e.std_error > 0) worst_sigmas = std::max(worst_sigmas, gap / e.std_error);
            ++checked;
        }
        Point y = x;
        y.c[0] += 1;
        for (int64_t h : {128, 512}) {
            McEstimate e = mc_green(m, x, y, h, 100000, seed++);
            double dp = green(m, x, y, h, false).truncated_sum;
            double gap = std::fabs(e.mean - dp);
            if (gap > 4.0 * e.std_error + 1e-12)
                return {false, std::string(kModelNames[mi]) + " green h=" + std::to_string(h) +
                                   ": mc " + num(e.mean, 5) + " vs dp " + num(dp, 5)};
            if (e.std_error > 0) worst_sigmas = std::max(worst_sigmas, gap / e.std_error);
            ++checked;
        }
    }
    return {true, std::to_string(checked) + " queries, worst gap " + num(worst_sigmas, 3) +
                      " sigma"};
}

struct Criterion {
    const char* name;
    double budget_s;
    Outcome (*fn)();
};

}  // namespace

int main() {
    const Criterion criteria[] = {
        {"exact kernel matches path enumeration", 10, exact_vs_enumeration},
        {"mass conservation to n = 10^4", 60, conservation},
        {"time reversal identity", 60, time_reversal},
        {"half-line Green closed form", 120, halfline_green_closed_form},
        {"quadrant harmonicity and V ratios", 60, quadrant_harmonicity},
        {"interior Green plateau", 300, interior_plateau},
        {"half-space Green plateau", 300, halfspace_plateau},
        {"boundary-ray Green plateau", 600, boundary_plateau},
        {"Martin kernel limits", 300, martin_limits},
        {"survival exponents", 300, survival_exponents},
        {"Monte Carlo vs dynamic programming", 300, monte_carlo_agreement},
    };

    int failures = 0;
    int id = 0;
    for (const Criterion& c : criteria) {
        ++id;
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (o.pass && secs > c.budget_s) {
            o.pass = false;
            o.detail += " [over budget]";
        }
        std::printf("[%s] %2d. %s (%.1fs < %.0fs) -- %s\n", o.pass ? "PASS" : "FAIL", id, c.name,
                    secs, c.budget_s, o.detail.c_str());
        std::fflush(stdout);
        if (!o.pass) ++failures;
    }
    std::printf("acceptance: %d/11 criteria passed\n", 11 - failures);
    return failures == 0 ? 0 : 1;
}
