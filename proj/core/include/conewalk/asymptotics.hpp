#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "conewalk/kernel.hpp"
#include "conewalk/model.hpp"
#include "conewalk/point.hpp"

namespace conewalk {

// Normalized Green ratios along a path to infinity. The limiting constants
// have no computable closed form, so verification is plateau existence:
// fitted_limit is the mean of the last k points, plateau_spread their
// relative spread, fitted_rate the decay exponent of |ratio - limit|.
struct RatioSeries {
    std::vector<double> scales;  // |y_k| in world coordinates, strictly increasing
    std::vector<double> ratios;
    std::vector<Point> points;
    std::vector<std::pair<std::string, std::vector<double>>> aux;  // per-point columns
    double fitted_limit = 0.0;
    double fitted_rate = 0.0;
    double plateau_spread = 0.0;
};

struct PlateauFit {
    double limit = 0.0;
    double rate = 0.0;
    double spread = 0.0;
};

// limit = mean of the last k_last values; spread = (max-min)/mean over the
// same window; rate = log-log slope of |value - limit| vs scale, residuals
// clamped at 1e-10 so exactly-flat series fit cleanly.
PlateauFit fit_plateau(const std::vector<std::pair<double, double>>& series, int k_last);

// Ratios G(x, y_k) |y_k|^{2p+d-2} / (V(x) u(y_k)) for y_k along an interior
// ray: y_k = round(k * direction), projected into the cone when rounding
// lands outside. Each y_k must keep dist(y_k, boundary) >= alpha |y_k|
// (PathLeavesRegime otherwise). horizon 0 picks 6 * max |y|^2.
RatioSeries verify_interior(const WalkModel& model, Point x, Vecd direction,
                            const std::vector<int64_t>& scales, double alpha,
                            int64_t horizon = 0, int k_last = 4, WindowPolicy policy = {});

// Half-space cones only (WrongConeVariant otherwise). Ratios
// G(x, y_k) |y_k|^d / (V(x) V'(y_k)) along the boundary-hugging path
// y_k = round(k t + ceil(sqrt(k)) n) with t a boundary tangent axis and n
// the inward normal; V'(y_k) comes from the reversed-walk limit per point.
RatioSeries verify_halfspace(const WalkModel& model, Point x,
                             const std::vector<int64_t>& scales, int64_t horizon = 0,
                             int k_last = 4, WindowPolicy policy = {});

// Ratios G(x, y_k) |y_k|^{p+q+d-2} / (V(x) E[u_sigma(y_rho); tau'_y > theta_y])
// for y_k = round(k sigma) pushed into the cone; q and u_sigma are the
// exponent and reduite of the tangent cone at sigma (the full-cone reduite
// grows like |y|^{p-q} under the stopped expectation and admits no plateau).
// The stopped functional runs the reversed walk until absorption into
// K_rho(R, rho); UnstoppedMassTooLarge when more than 5% of the surviving
// mass is still undecided at the stopping horizon.
RatioSeries verify_boundary(const WalkModel& model, Point x, Vecd sigma,
                            const std::vector<int64_t>& scales, double R, double rho,
                            int64_t horizon = 0, int k_last = 4, WindowPolicy policy = {});

// Martin kernel G(x, y_n) / G(x0, y_n) along an explicit path (strictly
// increasing |y_n|); the limit identifies V(x)/V(x0). ZeroDenominator when
// some G(x0, y_n) vanishes (parity-unreachable point).
RatioSeries martin_kernel(const WalkModel& model, Point x, Point x0,
                          const std::vector<Point>& y_path, int64_t horizon = 0,
                          int k_last = 4, WindowPolicy policy = {});

// Log-log slope of survival probability over the given checkpoints
// (expected near -p/2).
double survival_slope(const WalkModel& model, Point x, const std::vector<int64_t>& checkpoints,
                      WindowPolicy policy = {});

}  // namespace conewalk
