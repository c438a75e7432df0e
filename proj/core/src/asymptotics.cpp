#include "conewalk/asymptotics.hpp"

#include <algorithm>
#include <cmath>

#include "conewalk/error.hpp"
#include "conewalk/geometry.hpp"
#include "conewalk/harmonic.hpp"

namespace conewalk {

namespace {

void check_scales(const std::vector<int64_t>& scales) {
    if (scales.size() < 2) fail("asymptotics", "TooFewPoints", "need at least 2 scales");
    for (size_t i = 0; i < scales.size(); ++i)
        if (scales[i] < 1 || (i > 0 && scales[i] <= scales[i - 1]))
            fail("asymptotics", "BadParameter", "scales must be strictly increasing and >= 1");
}

int64_t auto_horizon(const ConeSpec& cone, const std::vector<Point>& pts, int64_t factor) {
    double m = 0.0;
    for (const Point& p : pts) {
        const double r = cone.world_norm(p);
        m = std::max(m, r * r);
    }
    return std::max<int64_t>(4096, factor * int64_t(std::ceil(m)));
}

Point round_point(const Vecd& v, int d) {
    Point p = Point::zero(d);
    for (int i = 0; i < d; ++i) p.c[i] = llround(v.c[i]);
    return p;
}

// Push a rounded path point into the open cone by stepping along the inward
// normals of the violated faces (the model's fixed interior offset).
Point project_into(const ConeSpec& cone, Point y) {
    for (int pass = 0; pass < 4; ++pass) {
        if (cone.contains(y)) return y;
        Point bump = Point::zero(y.d);
        for (const Vecd& n : cone.base_normals()) {
            double dot = 0.0, amax = 0.0;
            for (int i = 0; i < y.d; ++i) {
                dot += n.c[i] * double(y.c[i]);
                amax = std::max(amax, std::fabs(n.c[i]));
            }
            if (dot > 0.0) continue;
            for (int i = 0; i < y.d; ++i) {
                if (n.c[i] > 0.3 * amax)
                    bump.c[i] += 1;
                else if (n.c[i] < -0.3 * amax)
                    bump.c[i] -= 1;
            }
        }
        if (bump == Point::zero(y.d)) break;
        y = y + bump;
    }
    fail("asymptotics", "PathLeavesRegime",
         "could not project " + y.str() + " into the open cone");
}

double estimate_V_limit(const WalkModel& model, Point x,
                        const std::function<double(const Point&)>& u, WindowPolicy policy) {
    const std::vector<int64_t> schedule = {0, 1, 2, 3, 4, 6, 8, 12, 16, 24, 32};
    return estimate_V(model, x, u, schedule, 1e-9, policy).limit;
}

void finish(RatioSeries& rs, int k_last) {
    for (size_t i = 1; i < rs.scales.size(); ++i)
        if (rs.scales[i] <= rs.scales[i - 1])
            fail("asymptotics", "BadParameter",
                 "path norms must be strictly increasing (collision after rounding)");
    std::vector<std::pair<double, double>> series;
    series.reserve(rs.scales.size());
    for (size_t i = 0; i < rs.scales.size(); ++i) series.push_back({rs.scales[i], rs.ratios[i]});
    const PlateauFit f = fit_plateau(series, k_last);
    rs.fitted_limit = f.limit;
    rs.fitted_rate = f.rate;
    rs.plateau_spread = f.spread;
}

}  // namespace

PlateauFit fit_plateau(const std::vector<std::pair<double, double>>& series, int k_last) {
    if (k_last < 1) fail("asymptotics", "BadParameter", "k_last must be >= 1");
    if (series.size() < size_t(k_last) + 2)
        fail("asymptotics", "TooFewPoints",
             "need at least " + std::to_string(k_last + 2) + " points, have " +
                 std::to_string(series.size()));
    for (size_t i = 1; i < series.size(); ++i)
        if (series[i].first <= series[i - 1].first)
            fail("asymptotics", "BadParameter", "scales must be strictly increasing");

    PlateauFit f;
    double sum = 0.0, vmin = series.back().second, vmax = series.back().second;
    for (size_t i = series.size() - size_t(k_last); i < series.size(); ++i) {
        const double v = series[i].second;
        sum += v;
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
    }
    f.limit = sum / double(k_last);
    if (f.limit == 0.0) fail("asymptotics", "ZeroDenominator", "plateau mean is zero");
    f.spread = (vmax - vmin) / std::fabs(f.limit);

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [scale, v] : series) {
        const double lx = std::log(scale);
        const double ly = std::log(std::max(std::fabs(v - f.limit), 1e-10));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double m = double(series.size());
    const double denom = m * sxx - sx * sx;
    f.rate = denom > 0.0 ? (m * sxy - sx * sy) / denom : 0.0;
    return f;
}

RatioSeries verify_interior(const WalkModel& model, Point x, Vecd direction,
                            const std::vector<int64_t>& scales, double alpha,
                            int64_t horizon, int k_last, WindowPolicy policy) {
    check_scales(scales);
    const int d = model.dim();
    if (direction.d != d) fail("asymptotics", "DimensionMismatch", "direction dimension");
    const ReduiteEntry entry = reduite(model.cone);

    RatioSeries rs;
    for (int64_t k : scales) {
        Vecd target = direction;
        for (int i = 0; i < d; ++i) target.c[i] *= double(k);
        const Point y = project_into(model.cone, round_point(target, d));
        const double norm = model.cone.world_norm(y);
        const double dist = model.cone.dist_boundary(y);
        if (dist < alpha * norm)
            fail("asymptotics", "PathLeavesRegime",
                 "y = " + y.str() + " has dist/|y| = " + std::to_string(dist / norm) +
                     " < alpha = " + std::to_string(alpha));
        rs.points.push_back(y);
        rs.scales.push_back(norm);
    }

    const int64_t H = horizon > 0 ? horizon : auto_horizon(model.cone, rs.points, 6);
    const auto greens = green_many(model, x, rs.points, H, true, policy);
    const double Vx = estimate_V_limit(model, x, entry.u, policy);
    if (Vx <= 0.0) fail("asymptotics", "ZeroDenominator", "V(x) estimate is not positive");

    std::vector<double> col_g, col_u, col_dist;
    const double power = 2.0 * entry.p + double(d) - 2.0;
    for (size_t i = 0; i < rs.points.size(); ++i) {
        const double uy = entry.u(rs.points[i]);
        if (uy <= 0.0)
            fail("asymptotics", "ZeroDenominator", "u vanishes at " + rs.points[i].str());
        const double g = greens[i].value();
        rs.ratios.push_back(g * std::pow(rs.scales[i], power) / (Vx * uy));
        col_g.push_back(g);
        col_u.push_back(uy);
        col_dist.push_back(model.cone.dist_boundary(rs.points[i]) / rs.scales[i]);
    }
    rs.aux = {{"green", col_g}, {"u", col_u}, {"dist_frac", col_dist}};
    finish(rs, k_last);
    return rs;
}

RatioSeries verify_halfspace(const WalkModel& model, Point x,
                             const std::vector<int64_t>& scales, int64_t horizon,
                             int k_last, WindowPolicy policy) {
    check_scales(scales);
    if (model.cone.variant() != ConeVariant::HalfSpace)
        fail("asymptotics", "WrongConeVariant",
             std::string("need a half-space cone, have ") + variant_name(model.cone.variant()));
    const int d = model.dim();
    const ReduiteEntry entry = reduite(model.cone);
    const Vecd n = model.cone.base_normals()[0];
    double nn = 0.0;
    for (int i = 0; i < d; ++i) nn += n.c[i] * n.c[i];
    nn = std::sqrt(nn);
    int tangent = 0;
    for (int i = 1; i < d; ++i)
        if (std::fabs(n.c[i]) < std::fabs(n.c[tangent])) tangent = i;

    RatioSeries rs;
    for (int64_t k : scales) {
        Vecd target = Vecd::zero(d);
        const double depth = std::ceil(std::sqrt(double(k)));
        for (int i = 0; i < d; ++i) target.c[i] = depth * n.c[i] / nn;
        if (d > 1) target.c[tangent] += double(k);
        const Point y = project_into(model.cone, round_point(target, d));
        rs.points.push_back(y);
        rs.scales.push_back(model.cone.world_norm(y));
    }

    // factor 6: these series decay like n^{-2}, and the tail fit needs its
    // window to start past the local peak at n ~ |y|^2/2
    const int64_t H = horizon > 0 ? horizon : auto_horizon(model.cone, rs.points, 6);
    const auto greens = green_many(model, x, rs.points, H, true, policy);
    const double Vx = estimate_V_limit(model, x, entry.u, policy);
    if (Vx <= 0.0) fail("asymptotics", "ZeroDenominator", "V(x) estimate is not positive");
    const std::vector<int64_t> schedule = {0, 1, 2, 3, 4, 6, 8, 12, 16, 24, 32};

    std::vector<double> col_g, col_vp, col_depth;
    for (size_t i = 0; i < rs.points.size(); ++i) {
        const double vp = estimate_V_prime(model, rs.points[i], schedule, 1e-9, policy).limit;
        if (vp <= 0.0)
            fail("asymptotics", "ZeroDenominator", "V' vanishes at " + rs.points[i].str());
        const double g = greens[i].value();
        rs.ratios.push_back(g * std::pow(rs.scales[i], double(d)) / (Vx * vp));
        col_g.push_back(g);
        col_vp.push_back(vp);
        col_depth.push_back(model.cone.dist_boundary(rs.points[i]));
    }
    rs.aux = {{"green", col_g}, {"vprime", col_vp}, {"depth", col_depth}};
    finish(rs, k_last);
    return rs;
}

RatioSeries verify_boundary(const WalkModel& model, Point x, Vecd sigma,
                            const std::vector<int64_t>& scales, double R, double rho,
                            int64_t horizon, int k_last, WindowPolicy policy) {
    check_scales(scales);
    const int d = model.dim();
    if (sigma.d != d) fail("asymptotics", "DimensionMismatch", "sigma dimension");
    const ReduiteEntry entry = reduite(model.cone);
    const TangentCone tc = tangent_cone(model.cone, sigma);
    // The stopped functional is normalized by the tangent-cone reduite u_sigma
    // (degree q): with the full reduite (degree p) the expectation grows like
    // |y|^{p-q} and no |y|^{p+q+d-2} normalization can plateau.
    const ReduiteEntry tangent_entry = reduite(tc.cone);
    const WalkModel reversed = reverse(model);

    RatioSeries rs;
    for (int64_t k : scales) {
        Vecd target = sigma;
        for (int i = 0; i < d; ++i) target.c[i] *= double(k);
        const Point y = project_into(model.cone, round_point(target, d));
        rs.points.push_back(y);
        rs.scales.push_back(model.cone.world_norm(y));
    }

    const int64_t H = horizon > 0 ? horizon : auto_horizon(model.cone, rs.points, 6);
    const auto greens = green_many(model, x, rs.points, H, true, policy);
    const double Vx = estimate_V_limit(model, x, entry.u, policy);
    if (Vx <= 0.0) fail("asymptotics", "ZeroDenominator", "V(x) estimate is not positive");

    std::vector<double> col_g, col_sf, col_unstopped;
    const double power = entry.p + tc.q + double(d) - 2.0;
    for (size_t i = 0; i < rs.points.size(); ++i) {
        const double norm2 = rs.scales[i] * rs.scales[i];
        const int64_t Hsf = std::max<int64_t>(2048, int64_t(std::ceil(4.0 * norm2)));
        const StoppedFunctionalResult sf =
            stopped_functional(reversed, rs.points[i], R, rho, tangent_entry.u, Hsf, policy);
        const double undecided = sf.stopped_mass + sf.unstopped_mass;
        const double frac = undecided > 0.0 ? sf.unstopped_mass / undecided : 0.0;
        if (frac > 0.05)
            fail("asymptotics", "UnstoppedMassTooLarge",
                 "at " + rs.points[i].str() + ": " + std::to_string(frac * 100.0) +
                     "% of surviving mass undecided at horizon " + std::to_string(Hsf));
        if (sf.value <= 0.0)
            fail("asymptotics", "ZeroDenominator",
                 "stopped functional vanishes at " + rs.points[i].str());
        const double g = greens[i].value();
        rs.ratios.push_back(g * std::pow(rs.scales[i], power) / (Vx * sf.value));
        col_g.push_back(g);
        col_sf.push_back(sf.value);
        col_unstopped.push_back(frac);
    }
    rs.aux = {{"green", col_g}, {"stopped", col_sf}, {"unstopped_frac", col_unstopped}};
    finish(rs, k_last);
    return rs;
}

RatioSeries martin_kernel(const WalkModel& model, Point x, Point x0,
                          const std::vector<Point>& y_path, int64_t horizon, int k_last,
                          WindowPolicy policy) {
    if (int64_t(y_path.size()) < int64_t(k_last) + 2)
        fail("asymptotics", "TooFewPoints",
             "need >= " + std::to_string(k_last + 2) + " path points, have " +
                 std::to_string(y_path.size()));
    RatioSeries rs;
    rs.points = y_path;
    for (const Point& y : y_path) rs.scales.push_back(model.cone.world_norm(y));
    for (size_t i = 1; i < rs.scales.size(); ++i)
        if (rs.scales[i] <= rs.scales[i - 1])
            fail("asymptotics", "BadParameter", "path norms must be strictly increasing");

    const int64_t H = horizon > 0 ? horizon : auto_horizon(model.cone, rs.points, 6);
    const auto gx = green_many(model, x, y_path, H, true, policy);
    const auto g0 = green_many(model, x0, y_path, H, true, policy);

    std::vector<double> col_gx, col_g0;
    for (size_t i = 0; i < y_path.size(); ++i) {
        const double a = gx[i].value(), b = g0[i].value();
        if (b <= 0.0)
            fail("asymptotics", "ZeroDenominator",
                 "G(x0, " + y_path[i].str() +
                     ") = 0 - path must respect lattice parity and reachability");
        rs.ratios.push_back(a / b);
        col_gx.push_back(a);
        col_g0.push_back(b);
    }
    rs.aux = {{"green_x", col_gx}, {"green_x0", col_g0}};
    finish(rs, k_last);
    return rs;
}

double survival_slope(const WalkModel& model, Point x, const std::vector<int64_t>& checkpoints,
                      WindowPolicy policy) {
    if (checkpoints.size() < 2) fail("asymptotics", "TooFewPoints", "need >= 2 checkpoints");
    for (size_t i = 0; i < checkpoints.size(); ++i)
        if (checkpoints[i] < 1 || (i > 0 && checkpoints[i] <= checkpoints[i - 1]))
            fail("asymptotics", "BadParameter", "checkpoints must be strictly increasing >= 1");
    const std::vector<double> surv = survival_series(model, x, checkpoints, policy);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < surv.size(); ++i) {
        if (surv[i] <= 0.0)
            fail("asymptotics", "ZeroDenominator",
                 "survival vanished at n = " + std::to_string(checkpoints[i]));
        const double lx = std::log(double(checkpoints[i])), ly = std::log(surv[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double m = double(surv.size());
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace conewalk
