#include "conewalk/harmonic.hpp"

#include <algorithm>
#include <cmath>

#include "conewalk/compensated.hpp"
#include "conewalk/error.hpp"
#include "conewalk/geometry.hpp"

namespace conewalk {

const char* flag_name(HarmonicEstimate::Flag f) {
    switch (f) {
        case HarmonicEstimate::Flag::Converged: return "converged";
        case HarmonicEstimate::Flag::Oscillating: return "oscillating";
        case HarmonicEstimate::Flag::Diverging: return "diverging";
    }
    return "?";
}

HarmonicEstimate estimate_V(const WalkModel& model, Point x,
                            const std::function<double(const Point&)>& u,
                            const std::vector<int64_t>& schedule, double tol,
                            WindowPolicy policy) {
    if (schedule.empty()) fail("harmonic", "BadParameter", "schedule is empty");
    for (size_t i = 0; i < schedule.size(); ++i)
        if (schedule[i] < 0 || (i > 0 && schedule[i] <= schedule[i - 1]))
            fail("harmonic", "BadParameter", "schedule must be strictly increasing and >= 0");

    HarmonicEstimate est;
    est.x = x;
    Evolution ev(model, x, policy);
    for (int64_t n : schedule) {
        ev.advance_to(n);
        Kahan sum;
        ev.for_each([&](const Point& p, double m) { sum.add(u(p) * m); });
        est.sequence.push_back({n, sum.value()});
    }
    est.limit = est.sequence.back().second;

    std::vector<double> vals;
    vals.reserve(est.sequence.size());
    for (const auto& [n, v] : est.sequence) vals.push_back(v);
    std::vector<double> sorted = vals;
    std::sort(sorted.begin(), sorted.end());
    const double median = sorted[sorted.size() / 2];
    if (vals.back() > 10.0 * median && median > 0.0)
        est.flag = HarmonicEstimate::Flag::Diverging;
    else if (vals.size() >= 2 && std::fabs(vals.back() - vals[vals.size() - 2]) < tol)
        est.flag = HarmonicEstimate::Flag::Converged;
    else
        est.flag = HarmonicEstimate::Flag::Oscillating;
    return est;
}

double harmonic_residual(const WalkModel& model, const std::function<double(const Point&)>& f,
                         Point x) {
    if (!model.cone.contains(x))
        fail("harmonic", "OutsideCone", "point " + x.str() + " is not in the open cone");
    double e = 0.0;
    for (const Atom& a : model.effective_atoms()) {
        const Point z = x + a.step;
        if (model.cone.contains(z)) e += to_double(a.prob) * f(z);
    }
    return e - f(x);
}

HarmonicEstimate estimate_V_prime(const WalkModel& model, Point y,
                                  const std::vector<int64_t>& schedule, double tol,
                                  WindowPolicy policy) {
    const ReduiteEntry entry = reduite(model.cone);
    return estimate_V(reverse(model), y, entry.u, schedule, tol, policy);
}

}  // namespace conewalk
