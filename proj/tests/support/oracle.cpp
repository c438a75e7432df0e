#include "oracle.hpp"

#include "conewalk/geometry.hpp"

namespace oracle {

namespace {

// Depth-first over atom sequences; prob is exact at every node.
template <typename Visit>
void walk_paths(const WalkModel& model, Point pos, Rational prob, int depth, int n_max,
                Visit&& visit) {
    if (depth == n_max) return;
    for (const auto& a : model.effective_atoms()) {
        Point next = pos + a.step;
        Rational p = prob * a.prob;
        visit(next, p, depth + 1);
        if (model.cone.contains(next)) walk_paths(model, next, p, depth + 1, n_max, visit);
    }
}

}  // namespace

std::vector<Slice> enumerate(const WalkModel& model, Point x, int n_max) {
    std::vector<Slice> out(size_t(n_max) + 1);
    out[0].mass[x] = 1;
    walk_paths(model, x, Rational(1), 0, n_max, [&](const Point& pos, const Rational& p, int n) {
        if (model.cone.contains(pos))
            out[size_t(n)].mass[pos] += p;
        else
            for (int k = n; k <= n_max; ++k) out[size_t(k)].killed += p;
    });
    return out;
}

Rational survival(const WalkModel& model, Point x, int n) {
    auto slices = enumerate(model, x, n);
    Rational s = 0;
    for (const auto& [p, m] : slices[size_t(n)].mass) s += m;
    return s;
}

Rational green_truncated(const WalkModel& model, Point x, Point y, int horizon) {
    auto slices = enumerate(model, x, horizon - 1);
    Rational g = 0;
    for (int n = 0; n < horizon; ++n) {
        auto it = slices[size_t(n)].mass.find(y);
        if (it != slices[size_t(n)].mass.end()) g += it->second;
    }
    return g;
}

Stopped stopped_functional(const WalkModel& model, Point y, double R, double rho,
                           const std::function<double(const Point&)>& u, int n_max) {
    Stopped out;
    std::function<void(Point, Rational, int)> rec = [&](Point pos, Rational prob, int depth) {
        if (depth == n_max) {
            out.unstopped += prob;
            return;
        }
        for (const auto& a : model.effective_atoms()) {
            Point next = pos + a.step;
            Rational p = prob * a.prob;
            if (!model.cone.contains(next)) continue;  // killed: contributes nothing
            if (model.cone.in_K_rho(next, R, rho)) {
                out.stopped += p;
                out.value += u(next) * conewalk::to_double(p);
            } else {
                rec(next, p, depth + 1);
            }
        }
    };
    rec(y, Rational(1), 0);
    return out;
}

}  // namespace oracle
