#include "cli_app.hpp"

#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "conewalk/asymptotics.hpp"
#include "conewalk/error.hpp"
#include "conewalk/geometry.hpp"
#include "conewalk/harmonic.hpp"
#include "conewalk/io.hpp"
#include "conewalk/kernel.hpp"
#include "conewalk/model.hpp"
#include "conewalk/rational.hpp"
#include "conewalk/sampler.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace conewalk;

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == sep) {
            out.push_back(cur);
            cur.clear();
        } else if (!std::isspace(static_cast<unsigned char>(ch))) {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

int64_t to_i64(const std::string& s, const char* what) {
    try {
        size_t pos = 0;
        int64_t v = std::stoll(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        fail("cli", "BadParameter", std::string(what) + ": not an integer: '" + s + "'");
    }
}

double to_f64(const std::string& s, const char* what) {
    try {
        size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        fail("cli", "BadParameter", std::string(what) + ": not a number: '" + s + "'");
    }
}

Point parse_point(const std::string& s, int d, const char* what) {
    auto parts = split(s, ',');
    if (static_cast<int>(parts.size()) != d)
        fail("cli", "BadParameter",
             std::string(what) + ": expected " + std::to_string(d) + " coordinates, got '" + s + "'");
    Point p = Point::zero(d);
    for (int i = 0; i < d; ++i) p[i] = to_i64(parts[i], what);
    return p;
}

Vecd parse_vec(const std::string& s, int d, const char* what) {
    auto parts = split(s, ',');
    if (static_cast<int>(parts.size()) != d)
        fail("cli", "BadParameter",
             std::string(what) + ": expected " + std::to_string(d) + " coordinates, got '" + s + "'");
    Vecd v = Vecd::zero(d);
    for (int i = 0; i < d; ++i) v[i] = to_f64(parts[i], what);
    return v;
}

std::vector<Point> parse_path(const std::string& s, int d, const char* what) {
    std::vector<Point> out;
    for (const auto& part : split(s, ';'))
        if (!part.empty()) out.push_back(parse_point(part, d, what));
    if (out.size() < 2) fail("cli", "BadParameter", std::string(what) + ": need at least two points");
    return out;
}

// "a:b:step" inclusive range, or a plain comma list.
std::vector<int64_t> parse_scales(const std::string& s, const char* what) {
    std::vector<int64_t> out;
    if (s.find(':') != std::string::npos) {
        auto parts = split(s, ':');
        if (parts.size() != 3) fail("cli", "BadParameter", std::string(what) + ": want a:b:step");
        int64_t a = to_i64(parts[0], what), b = to_i64(parts[1], what), st = to_i64(parts[2], what);
        if (st <= 0 || a > b) fail("cli", "BadParameter", std::string(what) + ": empty range");
        for (int64_t k = a; k <= b; k += st) out.push_back(k);
    } else {
        for (const auto& part : split(s, ','))
            if (!part.empty()) out.push_back(to_i64(part, what));
    }
    return out;
}

json coords(const Point& p) {
    json a = json::array();
    for (int i = 0; i < p.d; ++i) a.push_back(p[i]);
    return a;
}

json coords(const Vecd& v) {
    json a = json::array();
    for (int i = 0; i < v.d; ++i) a.push_back(v[i]);
    return a;
}

// NaN / inf have no JSON representation; emit null.
json num(double v) { return std::isfinite(v) ? json(v) : json(); }

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) fail("cli", "WriteFailed", "cannot open " + path.string());
    os << text;
    if (!os) fail("cli", "WriteFailed", "short write to " + path.string());
}

void write_json(const fs::path& path, const json& doc) { write_file(path, doc.dump(2) + "\n"); }

struct Ctx {
    std::string model_file;
    std::string out = ".";
    bool deterministic = false;
    int threads = 1;
    uint64_t seed = 12345;

    WalkModel model;
    fs::path out_dir;

    int resolved_threads() const { return deterministic ? 1 : threads; }

    void prepare() {
        model = load_model(model_file);
        out_dir = fs::path(out);
        fs::create_directories(out_dir);
    }

    json base_config(const std::string& command) const {
        json cfg;
        cfg["command"] = command;
        cfg["model_file"] = model_file;
        cfg["model"] = json::parse(model_json(model));
        cfg["out"] = out;
        cfg["seed"] = seed;
        cfg["threads"] = resolved_threads();
        cfg["deterministic"] = deterministic;
        return cfg;
    }
};

json ratio_series_json(const RatioSeries& rs) {
    json j;
    j["scales"] = rs.scales;
    j["ratios"] = rs.ratios;
    json pts = json::array();
    for (const auto& p : rs.points) pts.push_back(coords(p));
    j["points"] = pts;
    for (const auto& [name, col] : rs.aux) j["aux_" + name] = col;
    j["fitted_limit"] = num(rs.fitted_limit);
    j["fitted_rate"] = num(rs.fitted_rate);
    j["plateau_spread"] = num(rs.plateau_spread);
    return j;
}

void write_ratio_outputs(const Ctx& ctx, const std::string& stem, const json& cfg,
                         const RatioSeries& rs, bool pass, const std::string& note,
                         const json& extra = json::object()) {
    std::ostringstream csv;
    write_ratio_csv(csv, rs);
    write_file(ctx.out_dir / (stem + ".csv"), csv.str());
    json doc;
    doc["config"] = cfg;
    doc["results"] = ratio_series_json(rs);
    doc["results"]["pass"] = pass;
    for (const auto& [k, v] : extra.items()) doc["results"][k] = v;
    write_json(ctx.out_dir / (stem + ".json"), doc);
    std::cout << stem << ": limit=" << format_double(rs.fitted_limit)
              << " spread=" << format_double(rs.plateau_spread) << " rate="
              << format_double(rs.fitted_rate) << (note.empty() ? "" : " ") << note << " -> "
              << (pass ? "ok" : "verification FAILED") << "\n";
}

int cmd_validate(const Ctx& ctx, int radius, const std::vector<std::string>& sample_args) {
    std::vector<Point> samples;
    for (const auto& s : sample_args)
        samples.push_back(parse_point(s, ctx.model.dim(), "--sample"));
    if (samples.empty()) {
        Point w = ctx.model.cone.interior_witness();
        Point z = Point::zero(w.d);
        for (int i = 0; i < w.d; ++i) z[i] = w[i] * 2 * radius;
        samples.push_back(z);
    }
    HypothesisReport rep = validate_hypotheses(ctx.model, radius, samples);

    json cfg = ctx.base_config("validate");
    cfg["radius"] = radius;
    json sj = json::array();
    for (const auto& z : samples) sj.push_back(coords(z));
    cfg["samples"] = sj;

    json res;
    json dj = json::array();
    for (const auto& r : rep.drift) dj.push_back(rational_string(r));
    res["drift"] = dj;
    json cj = json::array();
    for (const auto& row : rep.covariance) {
        json rj = json::array();
        for (const auto& r : row) rj.push_back(rational_string(r));
        cj.push_back(rj);
    }
    res["covariance"] = cj;
    res["zero_drift"] = rep.zero_drift;
    res["identity_covariance"] = rep.identity_covariance;
    res["aperiodic"] = rep.aperiodic;
    res["support_generates_lattice"] = rep.support_generates_lattice;
    json bj = json::array();
    for (const auto& b : rep.aperiodicity_basis) bj.push_back(coords(b));
    res["aperiodicity_basis"] = bj;
    res["convex_cone"] = rep.convex_cone;
    res["irreducible"] = rep.irreducible;
    res["irreducibility_radius"] = rep.irreducibility_radius;
    json wj = json::array();
    for (const auto& w : rep.witnesses) {
        json e;
        e["z"] = coords(w.z);
        e["ok"] = w.ok;
        e["from"] = coords(w.from);
        e["steps"] = w.steps.size();
        wj.push_back(e);
    }
    res["witnesses"] = wj;
    res["exponent_p"] = num(rep.exponent_p);
    res["exponent_q"] = num(rep.exponent_q);
    res["moment_threshold_r"] = num(rep.moment_threshold_r);
    res["moments_finite"] = rep.moments_finite;

    json doc;
    doc["config"] = cfg;
    doc["results"] = res;
    write_json(ctx.out_dir / "validate.json", doc);

    std::cout << "validate: zero_drift=" << (rep.zero_drift ? "yes" : "no")
              << " identity_covariance=" << (rep.identity_covariance ? "yes" : "no")
              << " aperiodic=" << (rep.aperiodic ? "yes" : "no")
              << " lattice=" << (rep.support_generates_lattice ? "full" : "sub")
              << " convex_cone=" << (rep.convex_cone ? "yes" : "no")
              << " irreducible=" << (rep.irreducible ? "yes" : "no") << "\n"
              << "validate: p=" << format_double(rep.exponent_p)
              << " q=" << format_double(rep.exponent_q)
              << " moment_threshold=" << format_double(rep.moment_threshold_r)
              << " moments_finite=" << (rep.moments_finite ? "yes" : "no") << "\n";
    return 0;
}

int cmd_green(const Ctx& ctx, const std::string& x_str, const std::vector<std::string>& y_strs,
              int64_t horizon, bool no_tail) {
    const int d = ctx.model.dim();
    Point x = parse_point(x_str, d, "--x");
    std::vector<Point> ys;
    for (const auto& s : y_strs) ys.push_back(parse_point(s, d, "--y"));
    auto greens = green_many(ctx.model, x, ys, horizon, !no_tail);

    json cfg = ctx.base_config("green");
    cfg["x"] = coords(x);
    json yj = json::array();
    for (const auto& y : ys) yj.push_back(coords(y));
    cfg["y"] = yj;
    cfg["horizon"] = horizon;
    cfg["tail"] = !no_tail;

    json rows = json::array();
    for (size_t i = 0; i < ys.size(); ++i) {
        const auto& g = greens[i];
        json e;
        e["y"] = coords(ys[i]);
        e["truncated_sum"] = num(g.truncated_sum);
        e["tail_estimate"] = num(g.tail_estimate);
        e["value"] = num(g.value());
        e["fitted_decay_exponent"] = num(g.fitted_decay_exponent);
        e["tail_method"] = g.tail_method == GreenResult::TailMethod::PowerLaw ? "power-law" : "none";
        e["error_flag"] = flag_name(g.error_flag);
        e["horizon"] = g.horizon;
        rows.push_back(e);
    }
    json doc;
    doc["config"] = cfg;
    doc["results"] = json{{"green", rows}};
    write_json(ctx.out_dir / "green.json", doc);

    std::ostringstream csv;
    write_green_csv(csv, ys, greens);
    write_file(ctx.out_dir / "green.csv", csv.str());

    for (size_t i = 0; i < ys.size(); ++i)
        std::cout << "green: y=" << ys[i].str() << " value=" << format_double(greens[i].value())
                  << " flag=" << flag_name(greens[i].error_flag) << "\n";
    return 0;
}

int cmd_survival(const Ctx& ctx, const std::string& x_str, int64_t n) {
    if (n < 1) fail("cli", "BadParameter", "--n must be >= 1");
    Point x = parse_point(x_str, ctx.model.dim(), "--x");
    std::vector<int64_t> checkpoints;
    for (int64_t k = 1; k < n; k *= 2) checkpoints.push_back(k);
    checkpoints.push_back(n);
    auto values = survival_series(ctx.model, x, checkpoints);

    json cfg = ctx.base_config("survival");
    cfg["x"] = coords(x);
    cfg["n"] = n;

    json doc;
    doc["config"] = cfg;
    doc["results"] = json{{"checkpoints", checkpoints}, {"survival", values}};
    write_json(ctx.out_dir / "survival.json", doc);

    std::ostringstream csv;
    write_survival_csv(csv, checkpoints, values);
    write_file(ctx.out_dir / "survival.csv", csv.str());

    std::cout << "survival: P(tau > " << n << ") = " << format_double(values.back()) << "\n";
    return 0;
}

int cmd_harmonic(const Ctx& ctx, const std::string& x_str, const std::string& schedule_str,
                 double tol, bool prime) {
    Point x = parse_point(x_str, ctx.model.dim(), "--x");
    std::vector<int64_t> schedule = parse_scales(schedule_str, "--schedule");
    HarmonicEstimate est;
    if (prime) {
        est = estimate_V_prime(ctx.model, x, schedule, tol);
    } else {
        ReduiteEntry entry = reduite(ctx.model.cone);
        est = estimate_V(ctx.model, x, entry.u, schedule, tol);
    }

    json cfg = ctx.base_config("harmonic");
    cfg["x"] = coords(x);
    cfg["schedule"] = schedule;
    cfg["tol"] = tol;
    cfg["prime"] = prime;

    json seq = json::array();
    for (const auto& [n, v] : est.sequence) seq.push_back(json::array({json(n), num(v)}));
    json doc;
    doc["config"] = cfg;
    doc["results"] =
        json{{"sequence", seq}, {"limit", num(est.limit)}, {"flag", flag_name(est.flag)}};
    write_json(ctx.out_dir / "harmonic.json", doc);

    std::ostringstream csv;
    csv << kCsvSchema << "\nn,value\n";
    for (const auto& [n, v] : est.sequence) csv << n << "," << format_double(v) << "\n";
    write_file(ctx.out_dir / "harmonic.csv", csv.str());

    std::cout << "harmonic: " << (prime ? "V'" : "V") << "(" << x.str()
              << ") = " << format_double(est.limit) << " [" << flag_name(est.flag) << "]\n";
    return 0;
}

int cmd_verify_interior(const Ctx& ctx, const std::string& x_str, const std::string& dir_str,
                        const std::string& scales_str, double alpha, int64_t horizon, int k_last,
                        double spread_max) {
    const int d = ctx.model.dim();
    Point x = parse_point(x_str, d, "--x");
    Vecd dir = dir_str.empty() ? Vecd::from(ctx.model.cone.interior_witness())
                               : parse_vec(dir_str, d, "--direction");
    auto scales = parse_scales(scales_str, "--scales");
    RatioSeries rs = verify_interior(ctx.model, x, dir, scales, alpha, horizon, k_last);

    json cfg = ctx.base_config("verify interior");
    cfg["x"] = coords(x);
    cfg["direction"] = coords(dir);
    cfg["scales"] = scales;
    cfg["alpha"] = alpha;
    cfg["horizon"] = horizon;
    cfg["k_last"] = k_last;
    cfg["spread_max"] = spread_max;

    bool pass = rs.fitted_limit > 0 && rs.plateau_spread <= spread_max;
    write_ratio_outputs(ctx, "verify_interior", cfg, rs, pass, "");
    return pass ? 0 : 2;
}

int cmd_verify_halfspace(const Ctx& ctx, const std::string& x_str, const std::string& scales_str,
                         int64_t horizon, int k_last, double spread_max) {
    Point x = parse_point(x_str, ctx.model.dim(), "--x");
    auto scales = parse_scales(scales_str, "--scales");
    RatioSeries rs = verify_halfspace(ctx.model, x, scales, horizon, k_last);

    json cfg = ctx.base_config("verify halfspace");
    cfg["x"] = coords(x);
    cfg["scales"] = scales;
    cfg["horizon"] = horizon;
    cfg["k_last"] = k_last;
    cfg["spread_max"] = spread_max;

    bool pass = rs.fitted_limit > 0 && rs.plateau_spread <= spread_max;
    write_ratio_outputs(ctx, "verify_halfspace", cfg, rs, pass, "");
    return pass ? 0 : 2;
}

int cmd_verify_boundary(const Ctx& ctx, const std::string& x_str, const std::string& sigma_str,
                        const std::string& scales_str, double R, double rho, int64_t horizon,
                        int k_last, double spread_max) {
    const int d = ctx.model.dim();
    Point x = parse_point(x_str, d, "--x");
    Vecd sigma = parse_vec(sigma_str, d, "--sigma");
    auto scales = parse_scales(scales_str, "--scales");
    RatioSeries rs = verify_boundary(ctx.model, x, sigma, scales, R, rho, horizon, k_last);

    json cfg = ctx.base_config("verify boundary");
    cfg["x"] = coords(x);
    cfg["sigma"] = coords(sigma);
    cfg["scales"] = scales;
    cfg["R"] = R;
    cfg["rho"] = rho;
    cfg["horizon"] = horizon;
    cfg["k_last"] = k_last;
    cfg["spread_max"] = spread_max;

    bool pass = rs.fitted_limit > 0 && rs.plateau_spread <= spread_max;
    write_ratio_outputs(ctx, "verify_boundary", cfg, rs, pass, "");
    return pass ? 0 : 2;
}

int cmd_verify_martin(const Ctx& ctx, const std::string& x_str, const std::string& x0_str,
                      const std::string& path_str, int64_t horizon, int k_last, double rtol) {
    const int d = ctx.model.dim();
    Point x = parse_point(x_str, d, "--x");
    Point x0 = parse_point(x0_str, d, "--x0");
    auto path = parse_path(path_str, d, "--path");
    RatioSeries rs = martin_kernel(ctx.model, x, x0, path, horizon, k_last);

    ReduiteEntry entry = reduite(ctx.model.cone);
    std::vector<int64_t> schedule = {0, 1, 2, 3, 4, 6, 8, 12, 16, 24, 32};
    double vx = estimate_V(ctx.model, x, entry.u, schedule, 1e-9).limit;
    double vx0 = estimate_V(ctx.model, x0, entry.u, schedule, 1e-9).limit;
    if (!(vx0 > 0)) fail("cli", "ZeroDenominator", "V(x0) vanished at x0=" + x0.str());
    double ref = vx / vx0;

    json cfg = ctx.base_config("verify martin");
    cfg["x"] = coords(x);
    cfg["x0"] = coords(x0);
    json pj = json::array();
    for (const auto& p : path) pj.push_back(coords(p));
    cfg["path"] = pj;
    cfg["horizon"] = horizon;
    cfg["k_last"] = k_last;
    cfg["rtol"] = rtol;

    bool pass = std::abs(rs.fitted_limit - ref) <= rtol * std::abs(ref);
    std::ostringstream note;
    note << "reference=" << format_double(ref);
    write_ratio_outputs(ctx, "verify_martin", cfg, rs, pass, note.str(),
                        json{{"reference", num(ref)}});
    return pass ? 0 : 2;
}

int cmd_mc_survival(const Ctx& ctx, const std::string& x_str, int64_t n, int64_t samples) {
    Point x = parse_point(x_str, ctx.model.dim(), "--x");
    McEstimate est = mc_survival(ctx.model, x, n, samples, ctx.seed, ctx.resolved_threads());

    json cfg = ctx.base_config("mc survival");
    cfg["x"] = coords(x);
    cfg["n"] = n;
    cfg["samples"] = samples;

    json doc;
    doc["config"] = cfg;
    doc["results"] = json{{"mean", num(est.mean)},
                          {"std_error", num(est.std_error)},
                          {"n_samples", est.n_samples},
                          {"rng_seed", est.rng_seed}};
    write_json(ctx.out_dir / "mc_survival.json", doc);

    std::cout << "mc survival: " << format_double(est.mean) << " +- "
              << format_double(est.std_error) << " (" << est.n_samples << " samples)\n";
    return 0;
}

int cmd_mc_green(const Ctx& ctx, const std::string& x_str, const std::string& y_str,
                 int64_t horizon, int64_t samples) {
    const int d = ctx.model.dim();
    Point x = parse_point(x_str, d, "--x");
    Point y = parse_point(y_str, d, "--y");
    McEstimate est = mc_green(ctx.model, x, y, horizon, samples, ctx.seed, ctx.resolved_threads());

    json cfg = ctx.base_config("mc green");
    cfg["x"] = coords(x);
    cfg["y"] = coords(y);
    cfg["horizon"] = horizon;
    cfg["samples"] = samples;

    json doc;
    doc["config"] = cfg;
    doc["results"] = json{{"mean", num(est.mean)},
                          {"std_error", num(est.std_error)},
                          {"n_samples", est.n_samples},
                          {"rng_seed", est.rng_seed}};
    write_json(ctx.out_dir / "mc_green.json", doc);

    std::cout << "mc green: " << format_double(est.mean) << " +- " << format_double(est.std_error)
              << " (" << est.n_samples << " samples)\n";
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"cone-walk: lattice random walks killed at the boundary of a convex cone"};
    app.require_subcommand(1);
    app.fallthrough();

    Ctx ctx;
    app.add_option("--model", ctx.model_file, "model JSON file")->required();
    app.add_option("--out", ctx.out, "output directory (default .)");
    app.add_flag("--deterministic", ctx.deterministic, "force single-threaded execution");
    app.add_option("--threads", ctx.threads, "worker threads for Monte Carlo")
        ->check(CLI::PositiveNumber);
    app.add_option("--seed", ctx.seed, "RNG seed");

    std::function<int()> action;

    // validate
    int radius = 8;
    std::vector<std::string> sample_args;
    auto* c_val = app.add_subcommand("validate", "check model hypotheses, write a report");
    c_val->add_option("--radius", radius, "irreducibility search radius");
    c_val->add_option("--sample", sample_args, "irreducibility sample point (repeatable)");
    c_val->callback([&] { action = [&] { return cmd_validate(ctx, radius, sample_args); }; });

    // green
    std::string g_x;
    std::vector<std::string> g_ys;
    int64_t g_horizon = 4096;
    bool g_no_tail = false;
    auto* c_green = app.add_subcommand("green", "killed-walk Green function at target points");
    c_green->add_option("--x", g_x, "start point, e.g. 1,1")->required();
    c_green->add_option("--y", g_ys, "target point (repeatable)")->required();
    c_green->add_option("--horizon", g_horizon, "series truncation");
    c_green->add_flag("--no-tail", g_no_tail, "skip power-law tail extrapolation");
    c_green->callback(
        [&] { action = [&] { return cmd_green(ctx, g_x, g_ys, g_horizon, g_no_tail); }; });

    // survival
    std::string s_x;
    int64_t s_n = 4096;
    auto* c_surv = app.add_subcommand("survival", "P(tau_x > n) at dyadic checkpoints");
    c_surv->add_option("--x", s_x, "start point")->required();
    c_surv->add_option("--n", s_n, "final step count");
    c_surv->callback([&] { action = [&] { return cmd_survival(ctx, s_x, s_n); }; });

    // harmonic
    std::string h_x, h_schedule = "0,1,2,3,4,6,8,12,16,24,32";
    double h_tol = 1e-8;
    bool h_prime = false;
    auto* c_harm = app.add_subcommand("harmonic", "estimate V (or V' with --prime)");
    c_harm->add_option("--x", h_x, "evaluation point")->required();
    c_harm->add_option("--schedule", h_schedule, "step checkpoints, e.g. 0,1,2,4,8");
    c_harm->add_option("--tol", h_tol, "convergence tolerance");
    c_harm->add_flag("--prime", h_prime, "estimate V' of the reversed walk");
    c_harm->callback(
        [&] { action = [&] { return cmd_harmonic(ctx, h_x, h_schedule, h_tol, h_prime); }; });

    // verify
    auto* c_verify = app.add_subcommand("verify", "check an asymptotic law (exit 2 on failure)");
    c_verify->require_subcommand(1);

    std::string vi_x, vi_dir, vi_scales = "8:40:4";
    double vi_alpha = 0.2, vi_spread = 0.10;
    int64_t vi_horizon = 0;
    int vi_klast = 4;
    auto* c_vi = c_verify->add_subcommand("interior", "Green ratios along an interior ray");
    c_vi->add_option("--x", vi_x, "start point")->required();
    c_vi->add_option("--direction", vi_dir, "ray direction (default: cone witness)");
    c_vi->add_option("--scales", vi_scales, "k values, list or a:b:step");
    c_vi->add_option("--alpha", vi_alpha, "minimum dist(y,boundary)/|y|");
    c_vi->add_option("--horizon", vi_horizon, "series truncation (0 = auto)");
    c_vi->add_option("--k-last", vi_klast, "plateau window size");
    c_vi->add_option("--spread-max", vi_spread, "maximum plateau spread");
    c_vi->callback([&] {
        action = [&] {
            return cmd_verify_interior(ctx, vi_x, vi_dir, vi_scales, vi_alpha, vi_horizon,
                                       vi_klast, vi_spread);
        };
    });

    std::string vh_x, vh_scales = "16:64:8";
    double vh_spread = 0.15;
    int64_t vh_horizon = 0;
    int vh_klast = 4;
    auto* c_vh = c_verify->add_subcommand("halfspace", "Green ratios hugging a half-space wall");
    c_vh->add_option("--x", vh_x, "start point")->required();
    c_vh->add_option("--scales", vh_scales, "k values, list or a:b:step");
    c_vh->add_option("--horizon", vh_horizon, "series truncation (0 = auto)");
    c_vh->add_option("--k-last", vh_klast, "plateau window size");
    c_vh->add_option("--spread-max", vh_spread, "maximum plateau spread");
    c_vh->callback([&] {
        action = [&] {
            return cmd_verify_halfspace(ctx, vh_x, vh_scales, vh_horizon, vh_klast, vh_spread);
        };
    });

    std::string vb_x, vb_sigma, vb_scales = "8:48:4";
    double vb_R = 1.0, vb_rho = 0.25, vb_spread = 0.20;
    int64_t vb_horizon = 0;
    int vb_klast = 4;
    auto* c_vb = c_verify->add_subcommand("boundary", "Green ratios along a boundary direction");
    c_vb->add_option("--x", vb_x, "start point")->required();
    c_vb->add_option("--sigma", vb_sigma, "boundary direction")->required();
    c_vb->add_option("--scales", vb_scales, "k values, list or a:b:step");
    c_vb->add_option("--R", vb_R, "K_rho distance constant");
    c_vb->add_option("--rho", vb_rho, "K_rho shrink exponent");
    c_vb->add_option("--horizon", vb_horizon, "series truncation (0 = auto)");
    c_vb->add_option("--k-last", vb_klast, "plateau window size");
    c_vb->add_option("--spread-max", vb_spread, "maximum plateau spread");
    c_vb->callback([&] {
        action = [&] {
            return cmd_verify_boundary(ctx, vb_x, vb_sigma, vb_scales, vb_R, vb_rho, vb_horizon,
                                       vb_klast, vb_spread);
        };
    });

    std::string vm_x, vm_x0, vm_path;
    double vm_rtol = 0.02;
    int64_t vm_horizon = 0;
    int vm_klast = 4;
    auto* c_vm = c_verify->add_subcommand("martin", "Martin kernel limit against V(x)/V(x0)");
    c_vm->add_option("--x", vm_x, "numerator start point")->required();
    c_vm->add_option("--x0", vm_x0, "normalization point")->required();
    c_vm->add_option("--path", vm_path, "y path, e.g. 10,10;20,20;40,40")->required();
    c_vm->add_option("--horizon", vm_horizon, "series truncation (0 = auto)");
    c_vm->add_option("--k-last", vm_klast, "plateau window size");
    c_vm->add_option("--rtol", vm_rtol, "relative tolerance against V(x)/V(x0)");
    c_vm->callback([&] {
        action = [&] {
            return cmd_verify_martin(ctx, vm_x, vm_x0, vm_path, vm_horizon, vm_klast, vm_rtol);
        };
    });

    // mc
    auto* c_mc = app.add_subcommand("mc", "Monte Carlo estimators");
    c_mc->require_subcommand(1);

    std::string ms_x;
    int64_t ms_n = 1024, ms_samples = 100000;
    auto* c_ms = c_mc->add_subcommand("survival", "sampled P(tau_x > n)");
    c_ms->add_option("--x", ms_x, "start point")->required();
    c_ms->add_option("--n", ms_n, "step count");
    c_ms->add_option("--samples", ms_samples, "number of paths");
    c_ms->callback([&] { action = [&] { return cmd_mc_survival(ctx, ms_x, ms_n, ms_samples); }; });

    std::string mg_x, mg_y;
    int64_t mg_horizon = 4096, mg_samples = 100000;
    auto* c_mg = c_mc->add_subcommand("green", "sampled Green function (visit counts)");
    c_mg->add_option("--x", mg_x, "start point")->required();
    c_mg->add_option("--y", mg_y, "target point")->required();
    c_mg->add_option("--horizon", mg_horizon, "maximum path length");
    c_mg->add_option("--samples", mg_samples, "number of paths");
    c_mg->callback(
        [&] { action = [&] { return cmd_mc_green(ctx, mg_x, mg_y, mg_horizon, mg_samples); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        ctx.prepare();
        return action();
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: cli/Unhandled: " << e.what() << "\n";
        return 1;
    }
}
