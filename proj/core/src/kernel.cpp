#include "conewalk/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>
#include <set>

#include "conewalk/compensated.hpp"
#include "conewalk/error.hpp"

namespace conewalk {

double MassTable::total() const {
    Kahan k;
    for (const auto& e : entries) k.add(e.second);
    return k.value();
}

double MassTable::value_at(const Point& p) const {
    auto it = std::lower_bound(entries.begin(), entries.end(), p,
                               [](const auto& e, const Point& q) { return e.first < q; });
    if (it != entries.end() && it->first == p) return it->second;
    return 0.0;
}

const char* flag_name(GreenResult::Flag f) {
    switch (f) {
        case GreenResult::Flag::Converged: return "converged";
        case GreenResult::Flag::TailDominated: return "tail-dominated";
        case GreenResult::Flag::HorizonTooSmall: return "horizon-too-small";
    }
    return "?";
}

namespace detail {

class EngineBase {
public:
    EngineBase(const WalkModel& model, Point x, WindowPolicy policy)
        : model_(model), origin_(x), policy_(policy) {
        if (!model_.cone.contains(x))
            fail("kernel", "OutsideCone", "start point " + x.str() + " is not in the open cone");
        for (const Atom& a : model_.effective_atoms())
            atoms_.push_back({a.step, to_double(a.prob)});
    }
    virtual ~EngineBase() = default;
    virtual void advance() = 0;
    virtual double value_at(const Point& p) const = 0;
    virtual void for_each(const std::function<void(const Point&, double)>& fn) const = 0;

    WalkModel model_;
    Point origin_;
    WindowPolicy policy_;
    struct DAtom {
        Point step;
        double p;
    };
    std::vector<DAtom> atoms_;
    int64_t n_ = 0;
    Kahan killed_, dropped_, absorbed_;
    double total_ = 1.0;
    std::function<bool(const Point&)> absorb_pred_;
    std::function<void(const Point&, double)> absorb_fn_;
};

namespace {

constexpr int64_t kFar = std::numeric_limits<int64_t>::max() / 4;

struct RowInterval {
    int64_t lo = 1;
    int64_t hi = 0;
    bool empty() const { return lo > hi; }
};

RowInterval intersect(RowInterval a, int64_t lo, int64_t hi) {
    a.lo = std::max(a.lo, lo);
    a.hi = std::min(a.hi, hi);
    return a;
}

// Columns c0 with (c0, c1) in the open cone (c1 ignored for d = 1), without
// any box clamp; sides may extend to +-kFar. Face bounds are computed in
// floating point and then corrected against the authoritative membership
// test, so the dense engine kills exactly the same lattice points as the
// sparse one.
RowInterval cone_row_interval(const ConeSpec& cone, int64_t c1) {
    const int d = cone.dim();
    RowInterval iv;
    iv.lo = -kFar;
    iv.hi = kFar;
    for (const auto& nrm : cone.base_normals()) {
        double n0 = nrm.c[0];
        double n1 = d == 2 ? nrm.c[1] : 0.0;
        double rhs = -n1 * double(c1);
        if (n0 == 0.0) {
            if (!(n1 * double(c1) > 0.0)) return RowInterval{};
        } else if (n0 > 0.0) {
            iv.lo = std::max(iv.lo, int64_t(std::floor(rhs / n0)) + 1);
        } else {
            iv.hi = std::min(iv.hi, int64_t(std::ceil(rhs / n0)) - 1);
        }
    }
    if (iv.empty()) return RowInterval{};
    auto inside = [&](int64_t c0) {
        Point p = Point::zero(d);
        p.c[0] = c0;
        if (d == 2) p.c[1] = c1;
        return cone.contains(p);
    };
    const bool lo_finite = iv.lo > -kFar / 2;
    const bool hi_finite = iv.hi < kFar / 2;
    if (lo_finite) {
        int fix = 0;
        while (iv.lo <= iv.hi && !inside(iv.lo) && fix++ < 4) ++iv.lo;
        while (inside(iv.lo - 1) && fix++ < 8) --iv.lo;
    }
    if (hi_finite) {
        int fix = 0;
        while (iv.hi >= iv.lo && !inside(iv.hi) && fix++ < 4) --iv.hi;
        while (inside(iv.hi + 1) && fix++ < 8) ++iv.hi;
    }
    if (iv.empty()) return RowInterval{};
    if ((lo_finite && (!inside(iv.lo) || inside(iv.lo - 1))) ||
        (hi_finite && (!inside(iv.hi) || inside(iv.hi + 1))))
        fail("kernel", "IntervalProbeFailed",
             "row " + std::to_string(c1) + ": face bounds disagree with membership");
    return iv;
}

}  // namespace

// Dense windowed engine for d <= 2 over cones cut out by half-planes. Rows
// are indexed by the second coordinate; within a row the open cone is an
// interval of columns. The window tracks the numerically live support: cells
// below drop_eps are zeroed (and accounted in dropped), so the box grows
// like sqrt(n) instead of n.
class DenseEngine final : public EngineBase {
public:
    DenseEngine(const WalkModel& model, Point x, WindowPolicy policy)
        : EngineBase(model, x, policy), d_(model.dim()) {
        for (const auto& a : atoms_) {
            min0_ = std::min(min0_, a.step.c[0]);
            max0_ = std::max(max0_, a.step.c[0]);
            if (d_ == 2) {
                min1_ = std::min(min1_, a.step.c[1]);
                max1_ = std::max(max1_, a.step.c[1]);
            }
        }
        lo_[0] = hi_[0] = col0_ = x.c[0];
        lo_[1] = hi_[1] = row0_ = d_ == 2 ? x.c[1] : 0;
        width_ = 1;
        buf_.assign(1, 1.0);
        row_iv_.assign(1, RowInterval{x.c[0], x.c[0]});
        eff_drop_ = policy_.drop_eps;
    }

    void advance() override {
        ++n_;
        if (dead_) return;
        const double total_old = total_;

        int64_t nlo0 = lo_[0] + min0_, nhi0 = hi_[0] + max0_;
        int64_t nlo1 = lo_[1] + min1_, nhi1 = hi_[1] + max1_;
        if (d_ == 1) nlo1 = nhi1 = 0;

        // Candidate rows: cached cone intervals clamped to the candidate
        // box; empty rows can only sit at the edges (convexity), trim them.
        std::vector<RowInterval> niv;
        niv.reserve(size_t(nhi1 - nlo1 + 1));
        for (int64_t r = nlo1; r <= nhi1; ++r)
            niv.push_back(intersect(cached_interval(r), nlo0, nhi0));
        while (!niv.empty() && niv.front().empty()) {
            niv.erase(niv.begin());
            ++nlo1;
        }
        while (!niv.empty() && niv.back().empty()) {
            niv.pop_back();
            --nhi1;
        }
        if (niv.empty()) {
            die(total_old);
            return;
        }
        int64_t cmin = kFar, cmax = -kFar;
        for (const auto& iv : niv) {
            if (iv.empty()) continue;
            cmin = std::min(cmin, iv.lo);
            cmax = std::max(cmax, iv.hi);
        }
        nlo0 = cmin;
        nhi0 = cmax;
        const int64_t nw = nhi0 - nlo0 + 1;
        const uint64_t cells = uint64_t(nw) * uint64_t(nhi1 - nlo1 + 1);
        if (policy_.max_cells && cells > policy_.max_cells) {
            if (policy_.clip_tolerance <= 0.0 || dropped_.value() > policy_.clip_tolerance)
                fail("kernel", "WindowOverflow",
                     "window needs " + std::to_string(cells) + " cells at step " +
                         std::to_string(n_) + ", cap is " + std::to_string(policy_.max_cells));
            eff_drop_ = std::min(eff_drop_ * 16.0, 1e-12);
        }
        next_.assign(size_t(cells), 0.0);

        // Gather: next[c] = sum_a p_a * cur[c - a]; ranges are clamped so
        // only cells inside the source row's valid interval are read.
        for (const auto& a : atoms_) {
            const int64_t off = a.step.c[0];
            const int64_t voff = d_ == 2 ? a.step.c[1] : 0;
            const double p = a.p;
            for (int64_t r = nlo1; r <= nhi1; ++r) {
                const RowInterval& dst = niv[size_t(r - nlo1)];
                if (dst.empty()) continue;
                const int64_t sr = r - voff;
                if (sr < lo_[1] || sr > hi_[1]) continue;
                const RowInterval& src = row_iv_[size_t(sr - row0_)];
                if (src.empty()) continue;
                const int64_t jlo = std::max(dst.lo, src.lo + off);
                const int64_t jhi = std::min(dst.hi, src.hi + off);
                if (jlo > jhi) continue;
                double* outb = &next_[size_t(r - nlo1) * size_t(nw)];
                const double* inb = &buf_[size_t(sr - row0_) * size_t(width_)];
                const int64_t so = -nlo0;
                const int64_t si = -off - col0_;
                for (int64_t j = jlo; j <= jhi; ++j) outb[j + so] += p * inb[j + si];
            }
        }

        // Absorb, drop, sum and find the tight nonzero box in one pass.
        Kahan tot;
        int64_t bmin0 = kFar, bmax0 = -kFar, bmin1 = kFar, bmax1 = -kFar;
        const bool absorbing = static_cast<bool>(absorb_pred_);
        for (int64_t r = nlo1; r <= nhi1; ++r) {
            const RowInterval& iv = niv[size_t(r - nlo1)];
            if (iv.empty()) continue;
            double* row = &next_[size_t(r - nlo1) * size_t(nw)];
            for (int64_t j = iv.lo; j <= iv.hi; ++j) {
                double& cell = row[j - nlo0];
                const double v = cell;
                if (v <= 0.0) continue;
                if (absorbing) {
                    Point p = Point::zero(d_);
                    p.c[0] = j;
                    if (d_ == 2) p.c[1] = r;
                    if (absorb_pred_(p)) {
                        absorbed_.add(v);
                        if (absorb_fn_) absorb_fn_(p, v);
                        cell = 0.0;
                        continue;
                    }
                }
                if (v < eff_drop_) {
                    dropped_.add(v);
                    cell = 0.0;
                    continue;
                }
                tot.add(v);
                bmin0 = std::min(bmin0, j);
                bmax0 = std::max(bmax0, j);
                bmin1 = std::min(bmin1, r);
                bmax1 = std::max(bmax1, r);
            }
        }

        buf_.swap(next_);
        width_ = nw;
        col0_ = nlo0;
        row0_ = nlo1;
        row_iv_ = std::move(niv);

        if (bmin0 > bmax0) {
            die(total_old);
            return;
        }
        killed_.add(total_old - absorbed_delta() - dropped_delta() - tot.value());
        total_ = tot.value();

        // Tighten the logical bounds to the observed support (metadata only;
        // cells outside hold zeros and are skipped through the intervals).
        lo_[0] = bmin0;
        hi_[0] = bmax0;
        lo_[1] = bmin1;
        hi_[1] = bmax1;
        for (auto& iv : row_iv_) {
            iv.lo = std::max(iv.lo, bmin0);
            iv.hi = std::min(iv.hi, bmax0);
        }
    }

    double value_at(const Point& p) const override {
        if (dead_) return 0.0;
        const int64_t c1 = d_ == 2 ? p.c[1] : 0;
        if (p.c[0] < lo_[0] || p.c[0] > hi_[0] || c1 < lo_[1] || c1 > hi_[1]) return 0.0;
        const RowInterval& iv = row_iv_[size_t(c1 - row0_)];
        if (p.c[0] < iv.lo || p.c[0] > iv.hi) return 0.0;
        return buf_[size_t(c1 - row0_) * size_t(width_) + size_t(p.c[0] - col0_)];
    }

    void for_each(const std::function<void(const Point&, double)>& fn) const override {
        if (dead_) return;
        for (int64_t r = lo_[1]; r <= hi_[1]; ++r) {
            const RowInterval& iv = row_iv_[size_t(r - row0_)];
            const double* row = &buf_[size_t(r - row0_) * size_t(width_)];
            for (int64_t j = iv.lo; j <= iv.hi; ++j) {
                const double v = row[j - col0_];
                if (v > 0.0) {
                    Point p = Point::zero(d_);
                    p.c[0] = j;
                    if (d_ == 2) p.c[1] = r;
                    fn(p, v);
                }
            }
        }
    }

private:
    const RowInterval& cached_interval(int64_t r) {
        if (cache_.empty()) {
            cache_base_ = r;
            cache_.push_back(cone_row_interval(model_.cone, r));
        }
        while (r < cache_base_) {
            cache_.insert(cache_.begin(), cone_row_interval(model_.cone, cache_base_ - 1));
            --cache_base_;
        }
        while (r >= cache_base_ + int64_t(cache_.size()))
            cache_.push_back(cone_row_interval(model_.cone, cache_base_ + int64_t(cache_.size())));
        return cache_[size_t(r - cache_base_)];
    }

    double absorbed_delta() {
        const double cur = absorbed_.value();
        const double d = cur - absorbed_mark_;
        absorbed_mark_ = cur;
        return d;
    }
    double dropped_delta() {
        const double cur = dropped_.value();
        const double d = cur - dropped_mark_;
        dropped_mark_ = cur;
        return d;
    }

    void die(double total_old) {
        killed_.add(total_old - absorbed_delta() - dropped_delta());
        total_ = 0.0;
        dead_ = true;
    }

    int d_;
    int64_t min0_ = 0, max0_ = 0, min1_ = 0, max1_ = 0;
    int64_t lo_[2] = {0, 0}, hi_[2] = {0, 0};  // tight logical bounds
    int64_t col0_ = 0, row0_ = 0;              // coordinates of buffer cell (0, 0)
    int64_t width_ = 1;
    std::vector<double> buf_, next_;
    std::vector<RowInterval> row_iv_;  // valid data region, indexed by r - row0_
    std::vector<RowInterval> cache_;   // cone intervals, indexed by r - cache_base_
    int64_t cache_base_ = 0;
    double eff_drop_ = 0.0;
    double absorbed_mark_ = 0.0, dropped_mark_ = 0.0;
    bool dead_ = false;
};

// Sorted-vector sparse engine: any dimension, any cone, including wedges
// with opening over pi. Deterministic by construction (emission in key
// order, merge by key).
class SparseEngine final : public EngineBase {
public:
    SparseEngine(const WalkModel& model, Point x, WindowPolicy policy)
        : EngineBase(model, x, policy) {
        entries_.push_back({x, 1.0});
    }

    void advance() override {
        ++n_;
        emitted_.clear();
        emitted_.reserve(entries_.size() * atoms_.size());
        for (const auto& e : entries_) {
            for (const auto& a : atoms_) {
                const Point dst = e.first + a.step;
                const double w = e.second * a.p;
                if (!model_.cone.contains(dst)) {
                    killed_.add(w);
                    continue;
                }
                emitted_.push_back({dst, w});
            }
        }
        std::sort(emitted_.begin(), emitted_.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        entries_.clear();
        Kahan tot;
        const bool absorbing = static_cast<bool>(absorb_pred_);
        size_t i = 0;
        while (i < emitted_.size()) {
            const Point p = emitted_[i].first;
            double v = 0.0;
            while (i < emitted_.size() && emitted_[i].first == p) v += emitted_[i++].second;
            if (absorbing && absorb_pred_(p)) {
                absorbed_.add(v);
                if (absorb_fn_) absorb_fn_(p, v);
                continue;
            }
            if (v < policy_.drop_eps) {
                dropped_.add(v);
                continue;
            }
            tot.add(v);
            entries_.push_back({p, v});
        }
        if (policy_.max_cells && entries_.size() > policy_.max_cells) clip(tot);
        total_ = tot.value();
    }

    double value_at(const Point& p) const override {
        auto it = std::lower_bound(entries_.begin(), entries_.end(), p,
                                   [](const auto& e, const Point& q) { return e.first < q; });
        if (it != entries_.end() && it->first == p) return it->second;
        return 0.0;
    }

    void for_each(const std::function<void(const Point&, double)>& fn) const override {
        for (const auto& e : entries_) fn(e.first, e.second);
    }

private:
    void clip(Kahan& tot) {
        auto byweight = entries_;
        std::sort(byweight.begin(), byweight.end(),
                  [](const auto& a, const auto& b) { return a.second < b.second; });
        const size_t excess = entries_.size() - policy_.max_cells;
        std::set<Point> clipped;
        for (size_t k = 0; k < excess; ++k) {
            dropped_.add(byweight[k].second);
            clipped.insert(byweight[k].first);
        }
        if (policy_.clip_tolerance <= 0.0 || dropped_.value() > policy_.clip_tolerance)
            fail("kernel", "WindowOverflow",
                 "support of " + std::to_string(entries_.size()) +
                     " cells exceeds cap at step " + std::to_string(n_));
        std::vector<std::pair<Point, double>> kept;
        kept.reserve(policy_.max_cells);
        tot.reset();
        for (const auto& e : entries_) {
            if (clipped.count(e.first)) continue;
            tot.add(e.second);
            kept.push_back(e);
        }
        entries_.swap(kept);
    }

    std::vector<std::pair<Point, double>> entries_;  // sorted by point
    std::vector<std::pair<Point, double>> emitted_;
};

}  // namespace detail

Evolution::Evolution(const WalkModel& model, Point x, WindowPolicy policy) {
    const bool wide_wedge =
        model.cone.variant() == ConeVariant::Wedge2D && model.cone.base_normals().empty();
    if (model.dim() <= 2 && !policy.force_sparse && !wide_wedge)
        impl_ = std::make_unique<detail::DenseEngine>(model, x, policy);
    else
        impl_ = std::make_unique<detail::SparseEngine>(model, x, policy);
}

Evolution::~Evolution() = default;
Evolution::Evolution(Evolution&&) noexcept = default;
Evolution& Evolution::operator=(Evolution&&) noexcept = default;

void Evolution::advance() { impl_->advance(); }

void Evolution::advance_to(int64_t n) {
    if (n < impl_->n_) fail("kernel", "BadParameter", "cannot advance backwards");
    while (impl_->n_ < n) impl_->advance();
}

int64_t Evolution::n() const { return impl_->n_; }
Point Evolution::origin() const { return impl_->origin_; }
double Evolution::killed_mass() const { return impl_->killed_.value(); }
double Evolution::dropped_mass() const { return impl_->dropped_.value(); }
double Evolution::absorbed_mass() const { return impl_->absorbed_.value(); }
double Evolution::total_mass() const { return impl_->total_; }
double Evolution::value_at(const Point& p) const { return impl_->value_at(p); }

void Evolution::for_each(const std::function<void(const Point&, double)>& fn) const {
    impl_->for_each(fn);
}

MassTable Evolution::snapshot() const {
    MassTable t;
    t.n = impl_->n_;
    t.origin = impl_->origin_;
    t.killed_mass = killed_mass();
    t.dropped_mass = dropped_mass();
    impl_->for_each([&](const Point& p, double v) { t.entries.push_back({p, v}); });
    std::sort(t.entries.begin(), t.entries.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return t;
}

void Evolution::set_absorber(std::function<bool(const Point&)> pred,
                             std::function<void(const Point&, double)> on_absorb) {
    impl_->absorb_pred_ = std::move(pred);
    impl_->absorb_fn_ = std::move(on_absorb);
}

void evolve(const WalkModel& model, Point x, int64_t n_max,
            const std::function<bool(const Evolution&)>& visit, WindowPolicy policy) {
    Evolution ev(model, x, policy);
    if (!visit(ev)) return;
    for (int64_t n = 1; n <= n_max; ++n) {
        ev.advance();
        if (!visit(ev)) return;
    }
}

std::vector<MassTable> evolve_tables(const WalkModel& model, Point x, int64_t n_max,
                                     WindowPolicy policy) {
    std::vector<MassTable> out;
    evolve(
        model, x, n_max,
        [&](const Evolution& ev) {
            out.push_back(ev.snapshot());
            return true;
        },
        policy);
    return out;
}

double survival(const WalkModel& model, Point x, int64_t n, WindowPolicy policy) {
    Evolution ev(model, x, policy);
    ev.advance_to(n);
    return ev.total_mass();
}

std::vector<double> survival_series(const WalkModel& model, Point x,
                                    const std::vector<int64_t>& checkpoints,
                                    WindowPolicy policy) {
    for (size_t i = 1; i < checkpoints.size(); ++i)
        if (checkpoints[i] < checkpoints[i - 1])
            fail("kernel", "BadParameter", "checkpoints must be nondecreasing");
    std::vector<double> out;
    out.reserve(checkpoints.size());
    Evolution ev(model, x, policy);
    for (int64_t n : checkpoints) {
        ev.advance_to(n);
        out.push_back(ev.total_mass());
    }
    return out;
}

double local_prob(const WalkModel& model, Point x, Point y, int64_t n, WindowPolicy policy) {
    Evolution ev(model, x, policy);
    ev.advance_to(n);
    return ev.value_at(y);
}

std::pair<double, double> time_reversal_check(const WalkModel& model, Point x, Point y,
                                              int64_t n, WindowPolicy policy) {
    const double fwd = local_prob(model, x, y, n, policy);
    const double bwd = local_prob(reverse(model), y, x, n, policy);
    return {fwd, bwd};
}

namespace {

struct SeriesAccum {
    Kahan truncated;
    std::vector<std::pair<int64_t, double>> fit;  // nonzero samples past fit_from
    int64_t last_nonzero = -1;
    int64_t gap_gcd = 0;

    void record(int64_t n, double v, int64_t fit_from) {
        if (v <= 0.0) return;
        truncated.add(v);
        if (last_nonzero >= 0) gap_gcd = std::gcd(gap_gcd, n - last_nonzero);
        last_nonzero = n;
        if (n > fit_from) {
            fit.push_back({n, v});
            if (fit.size() > 4096) {
                std::vector<std::pair<int64_t, double>> half;
                half.reserve(fit.size() / 2 + 1);
                for (size_t i = (fit.size() - 1) % 2; i < fit.size(); i += 2)
                    half.push_back(fit[i]);
                fit.swap(half);
            }
        }
    }
};

// Least-squares fit of log P_n against log n over the window, with a
// quadratic term to absorb the finite-n bend of the local limit factor
// exp(-|y|^2/2n). The exponent that matters for continuation past the
// horizon is the slope at the window end, so log n is centered there and
// the linear coefficient is read off directly. Falls back to the plain
// linear slope on short windows or runaway curvature.
double fit_end_slope(const std::vector<std::pair<int64_t, double>>& fit) {
    const double x0 = std::log(double(fit.back().first));
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [n, v] : fit) {
        const double lx = std::log(double(n)) - x0, ly = std::log(v);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double m = double(fit.size());
    const double lin = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    if (fit.size() < 12) return lin;
    double a[3][4] = {};
    for (const auto& [n, v] : fit) {
        const double lx = std::log(double(n)) - x0, ly = std::log(v);
        const double b[3] = {1.0, lx, lx * lx};
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) a[i][j] += b[i] * b[j];
            a[i][3] += b[i] * ly;
        }
    }
    for (int c = 0; c < 3; ++c) {
        int piv = c;
        for (int r = c + 1; r < 3; ++r)
            if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
        if (std::fabs(a[piv][c]) < 1e-12) return lin;
        for (int j = 0; j < 4; ++j) std::swap(a[c][j], a[piv][j]);
        for (int r = 0; r < 3; ++r) {
            if (r == c) continue;
            const double f = a[r][c] / a[c][c];
            for (int j = c; j < 4; ++j) a[r][j] -= f * a[c][j];
        }
    }
    const double end_slope = a[1][3] / a[1][1];
    if (std::fabs(end_slope - lin) > 0.75) return lin;
    return end_slope;
}

GreenResult finish_green(const SeriesAccum& acc, int64_t horizon, bool tail) {
    GreenResult g;
    g.truncated_sum = acc.truncated.value();
    g.horizon = horizon;
    g.fitted_decay_exponent = std::numeric_limits<double>::quiet_NaN();
    if (!tail) return g;
    if (acc.fit.size() < 8) {
        g.error_flag = GreenResult::Flag::HorizonTooSmall;
        return g;
    }
    const double s = fit_end_slope(acc.fit);
    g.fitted_decay_exponent = s;
    if (s > -1.0)
        fail("kernel", "NonSummableTailFit",
             "fitted decay exponent " + std::to_string(s) + " is not summable");
    g.tail_method = GreenResult::TailMethod::PowerLaw;
    const double h = double(acc.gap_gcd > 0 ? acc.gap_gcd : 1);
    const double n0 = double(acc.last_nonzero);
    const double C = acc.fit.back().second / std::pow(n0, s);
    // Euler-Maclaurin for sum_{m >= 1} C (n0 + m h)^s
    const double tailv = (C / h) * std::pow(n0, s + 1) / (-1.0 - s) -
                         C * std::pow(n0, s) / 2.0 - (h / 12.0) * C * s * std::pow(n0, s - 1);
    g.tail_estimate = std::max(tailv, 0.0);
    constexpr double kDelta = 0.05;
    if (s > -(1.0 + kDelta))
        g.error_flag = GreenResult::Flag::HorizonTooSmall;
    else if (g.tail_estimate > 0.05 * g.truncated_sum)
        g.error_flag = GreenResult::Flag::TailDominated;
    return g;
}

}  // namespace

std::vector<GreenResult> green_many(const WalkModel& model, Point x,
                                    const std::vector<Point>& targets, int64_t horizon,
                                    bool tail, WindowPolicy policy) {
    if (horizon < 1) fail("kernel", "BadParameter", "horizon must be >= 1");
    std::vector<SeriesAccum> acc(targets.size());
    const int64_t fit_from = (horizon - 1) / 10;
    Evolution ev(model, x, policy);
    for (int64_t n = 0; n < horizon; ++n) {
        if (n > 0) {
            ev.advance();
            if (ev.total_mass() <= 0.0) break;
        }
        for (size_t t = 0; t < targets.size(); ++t)
            acc[t].record(n, ev.value_at(targets[t]), fit_from);
    }
    std::vector<GreenResult> out;
    out.reserve(targets.size());
    for (size_t t = 0; t < targets.size(); ++t) {
        if (!model.cone.contains(targets[t])) {
            GreenResult zero;
            zero.horizon = horizon;
            zero.fitted_decay_exponent = std::numeric_limits<double>::quiet_NaN();
            out.push_back(zero);
        } else {
            out.push_back(finish_green(acc[t], horizon, tail));
        }
    }
    return out;
}

GreenResult green(const WalkModel& model, Point x, Point y, int64_t horizon, bool tail,
                  WindowPolicy policy) {
    return green_many(model, x, {y}, horizon, tail, policy).front();
}

std::vector<std::vector<double>> local_series(const WalkModel& model, Point x,
                                              const std::vector<Point>& targets,
                                              int64_t horizon, WindowPolicy policy) {
    if (horizon < 1) fail("kernel", "BadParameter", "horizon must be >= 1");
    std::vector<std::vector<double>> out(targets.size());
    for (auto& v : out) v.reserve(size_t(horizon));
    Evolution ev(model, x, policy);
    for (int64_t n = 0; n < horizon; ++n) {
        if (n > 0) ev.advance();
        for (size_t t = 0; t < targets.size(); ++t) out[t].push_back(ev.value_at(targets[t]));
    }
    return out;
}

StoppedFunctionalResult stopped_functional(const WalkModel& reversed_model, Point y, double R,
                                           double rho,
                                           const std::function<double(const Point&)>& u,
                                           int64_t horizon, WindowPolicy policy) {
    const ConeSpec& cone = reversed_model.cone;
    Evolution ev(reversed_model, y, policy);
    Kahan value;
    ev.set_absorber([&cone, R, rho](const Point& p) { return cone.in_K_rho(p, R, rho); },
                    [&](const Point& p, double m) { value.add(u(p) * m); });
    for (int64_t n = 0; n < horizon; ++n) {
        ev.advance();
        if (ev.total_mass() <= 0.0) break;
    }
    StoppedFunctionalResult r;
    r.value = value.value();
    r.unstopped_mass = ev.total_mass();
    r.stopped_mass = ev.absorbed_mass();
    r.horizon = horizon;
    return r;
}

std::vector<ExactSlice> evolve_exact(const WalkModel& model, Point x, int64_t n_max) {
    if (!model.cone.contains(x))
        fail("kernel", "OutsideCone", "start point " + x.str() + " is not in the open cone");
    const auto atoms = model.effective_atoms();
    std::vector<ExactSlice> out;
    out.reserve(size_t(n_max) + 1);
    ExactSlice first;
    first.n = 0;
    first.killed = 0;
    first.mass[x] = 1;
    out.push_back(std::move(first));
    for (int64_t n = 1; n <= n_max; ++n) {
        const ExactSlice& prev = out.back();
        ExactSlice nxt;
        nxt.n = n;
        nxt.killed = prev.killed;
        for (const auto& [p, v] : prev.mass) {
            for (const Atom& a : atoms) {
                const Point dst = p + a.step;
                Rational w = v * a.prob;
                if (model.cone.contains(dst))
                    nxt.mass[dst] += w;
                else
                    nxt.killed += w;
            }
        }
        out.push_back(std::move(nxt));
    }
    return out;
}

}  // namespace conewalk
