#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "conewalk/kernel.hpp"
#include "conewalk/model.hpp"
#include "conewalk/point.hpp"

namespace conewalk {

// Estimate of V(x) = lim_n E[u(x + S(n)); tau_x > n]: the raw sequence is
// kept so callers can judge convergence; the limit is the last value,
// Cauchy-checked against tol. Normalization follows the u passed in; all
// downstream uses are ratio-based.
struct HarmonicEstimate {
    Point x;
    std::vector<std::pair<int64_t, double>> sequence;  // (n, E[u(x+S(n)); tau_x>n])
    double limit = 0.0;
    enum class Flag { Converged, Oscillating, Diverging } flag = Flag::Oscillating;
};

const char* flag_name(HarmonicEstimate::Flag f);

// One slice evolution, killed expectation of u at each scheduled n
// (schedule strictly increasing). Diverging means the sequence grew beyond
// 10x its median: wrong u or a non-convex setup.
HarmonicEstimate estimate_V(const WalkModel& model, Point x,
                            const std::function<double(const Point&)>& u,
                            const std::vector<int64_t>& schedule, double tol,
                            WindowPolicy policy = {});

// E[f(x + X); x + X in K] - f(x); zero iff f is discrete-harmonic at x for
// the killed walk.
double harmonic_residual(const WalkModel& model, const std::function<double(const Point&)>& f,
                         Point x);

// estimate_V for the reversed walk, with u taken from the cone's reduite
// catalog (NotCatalogued if the cone has no closed form).
HarmonicEstimate estimate_V_prime(const WalkModel& model, Point y,
                                  const std::vector<int64_t>& schedule, double tol,
                                  WindowPolicy policy = {});

}  // namespace conewalk
