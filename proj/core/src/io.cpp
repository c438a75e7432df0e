#include "conewalk/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "conewalk/error.hpp"

namespace conewalk {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& origin, const std::string& detail) {
    fail("io", "ParseError", origin + ": " + detail);
}

Rational parse_prob(const json& j, const std::string& origin, size_t atom_idx) {
    const std::string where = "atom " + std::to_string(atom_idx);
    try {
        if (j.is_string()) return parse_rational(j.get<std::string>());
        if (j.is_number_integer()) return Rational(j.get<int64_t>());
    } catch (const Error& e) {
        bad(origin, where + ": " + e.what());
    }
    if (j.is_number_float())
        bad(origin, where + ": probability must be a string like \"1/4\" or \"0.25\", "
                            "not a floating-point literal");
    bad(origin, where + ": probability must be a string or integer");
}

Vecd parse_vec(const json& j, int d, const std::string& origin, const std::string& what) {
    if (!j.is_array() || int(j.size()) != d)
        bad(origin, what + " must be an array of " + std::to_string(d) + " numbers");
    Vecd v = Vecd::zero(d);
    for (int i = 0; i < d; ++i) {
        if (!j[size_t(i)].is_number()) bad(origin, what + " entries must be numbers");
        v.c[i] = j[size_t(i)].get<double>();
    }
    return v;
}

ConeSpec parse_cone(const json& j, int d, const std::string& origin) {
    if (!j.is_object() || !j.contains("variant") || !j["variant"].is_string())
        bad(origin, "cone must be an object with a \"variant\" string");
    const std::string variant = j["variant"].get<std::string>();
    try {
        if (variant == "orthant") {
            const int cd = j.contains("d") ? j["d"].get<int>() : d;
            return ConeSpec::orthant(cd);
        }
        if (variant == "halfspace") {
            if (!j.contains("normal")) bad(origin, "halfspace cone needs \"normal\"");
            return ConeSpec::half_space(parse_vec(j["normal"], d, origin, "normal"));
        }
        if (variant == "wedge2d") {
            if (!j.contains("beta") || !j["beta"].is_number())
                bad(origin, "wedge2d cone needs numeric \"beta\"");
            return ConeSpec::wedge2d(j["beta"].get<double>());
        }
        if (variant == "polyhedral") {
            if (!j.contains("normals") || !j["normals"].is_array() || j["normals"].empty())
                bad(origin, "polyhedral cone needs a nonempty \"normals\" array");
            std::vector<Vecd> normals;
            for (const auto& n : j["normals"]) normals.push_back(parse_vec(n, d, origin, "normal"));
            return ConeSpec::polyhedral(normals);
        }
    } catch (const Error& e) {
        bad(origin, std::string("cone: ") + e.what());
    }
    bad(origin, "unknown cone variant \"" + variant + "\"");
}

}  // namespace

WalkModel parse_model(const std::string& json_text, const std::string& origin) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        bad(origin, e.what());
    }
    if (!doc.is_object()) bad(origin, "top level must be an object");
    if (!doc.contains("dimension") || !doc["dimension"].is_number_integer())
        bad(origin, "\"dimension\" (integer) is required");
    const int d = doc["dimension"].get<int>();
    if (d < 1 || d > kMaxDim)
        bad(origin, "dimension must be in 1.." + std::to_string(kMaxDim));
    if (!doc.contains("atoms") || !doc["atoms"].is_array() || doc["atoms"].empty())
        bad(origin, "\"atoms\" must be a nonempty array");

    std::vector<Atom> atoms;
    size_t idx = 0;
    for (const auto& ja : doc["atoms"]) {
        if (!ja.is_object() || !ja.contains("step") || !ja.contains("prob"))
            bad(origin, "atom " + std::to_string(idx) + ": needs \"step\" and \"prob\"");
        const auto& js = ja["step"];
        if (!js.is_array() || int(js.size()) != d)
            bad(origin, "atom " + std::to_string(idx) + ": step must be an array of " +
                            std::to_string(d) + " integers");
        Point step = Point::zero(d);
        for (int i = 0; i < d; ++i) {
            if (!js[size_t(i)].is_number_integer())
                bad(origin, "atom " + std::to_string(idx) + ": step entries must be integers");
            step.c[i] = js[size_t(i)].get<int64_t>();
        }
        atoms.push_back({step, parse_prob(ja["prob"], origin, idx)});
        ++idx;
    }

    if (!doc.contains("cone")) bad(origin, "\"cone\" is required");
    ConeSpec cone = parse_cone(doc["cone"], d, origin);
    if (cone.dim() != d) bad(origin, "cone dimension disagrees with model dimension");

    bool reversed = false;
    if (doc.contains("reversed")) {
        if (!doc["reversed"].is_boolean()) bad(origin, "\"reversed\" must be a boolean");
        reversed = doc["reversed"].get<bool>();
    }

    try {
        return make_model(make_increments(d, atoms), cone, reversed);
    } catch (const Error& e) {
        bad(origin, e.what());
    }
}

WalkModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("io", "FileNotFound", "cannot open model file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_model(buf.str(), path);
}

std::string cone_json(const ConeSpec& cone) {
    json j;
    switch (cone.variant()) {
        case ConeVariant::Orthant:
            j = {{"variant", "orthant"}, {"d", cone.dim()}};
            break;
        case ConeVariant::HalfSpace: {
            const Vecd& n = cone.base_normals()[0];
            j = {{"variant", "halfspace"},
                 {"normal", std::vector<double>(n.c.begin(), n.c.begin() + cone.dim())}};
            break;
        }
        case ConeVariant::Wedge2D:
            j = {{"variant", "wedge2d"}, {"beta", cone.beta()}};
            break;
        case ConeVariant::Polyhedral: {
            std::vector<std::vector<double>> normals;
            for (const Vecd& n : cone.base_normals())
                normals.push_back(std::vector<double>(n.c.begin(), n.c.begin() + cone.dim()));
            j = {{"variant", "polyhedral"}, {"normals", normals}};
            break;
        }
    }
    return j.dump();
}

std::string model_json(const WalkModel& m) {
    json atoms = json::array();
    for (const Atom& a : m.increments.atoms) {
        json ja;
        ja["step"] = std::vector<int64_t>(a.step.c.begin(), a.step.c.begin() + m.dim());
        ja["prob"] = rational_string(a.prob);
        atoms.push_back(ja);
    }
    json j;
    j["dimension"] = m.dim();
    j["atoms"] = atoms;
    j["cone"] = json::parse(cone_json(m.cone));
    j["reversed"] = m.reversed;
    return j.dump();
}

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

void csv_row(std::ostream& os, const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
        if (i) os << ',';
        os << cells[i];
    }
    os << '\n';
}

}  // namespace

void write_slice_csv(std::ostream& os, const MassTable& table, int dim) {
    os << kCsvSchema << '\n';
    std::vector<std::string> head;
    for (int i = 0; i < dim; ++i) head.push_back("c" + std::to_string(i));
    head.push_back("mass");
    csv_row(os, head);
    for (const auto& [p, v] : table.entries) {
        std::vector<std::string> row;
        for (int i = 0; i < dim; ++i) row.push_back(std::to_string(p.c[i]));
        row.push_back(format_double(v));
        csv_row(os, row);
    }
}

void write_survival_csv(std::ostream& os, const std::vector<int64_t>& checkpoints,
                        const std::vector<double>& survival) {
    os << kCsvSchema << '\n';
    csv_row(os, {"n", "survival"});
    for (size_t i = 0; i < checkpoints.size(); ++i)
        csv_row(os, {std::to_string(checkpoints[i]), format_double(survival[i])});
}

void write_green_csv(std::ostream& os, const std::vector<Point>& targets,
                     const std::vector<GreenResult>& greens) {
    os << kCsvSchema << '\n';
    const int dim = targets.empty() ? 0 : targets.front().d;
    std::vector<std::string> head;
    for (int i = 0; i < dim; ++i) head.push_back("y" + std::to_string(i));
    head.insert(head.end(), {"truncated", "tail", "value", "decay_exponent", "flag"});
    csv_row(os, head);
    for (size_t t = 0; t < targets.size(); ++t) {
        std::vector<std::string> row;
        for (int i = 0; i < dim; ++i) row.push_back(std::to_string(targets[t].c[i]));
        const GreenResult& g = greens[t];
        row.push_back(format_double(g.truncated_sum));
        row.push_back(format_double(g.tail_estimate));
        row.push_back(format_double(g.value()));
        row.push_back(format_double(g.fitted_decay_exponent));
        row.push_back(flag_name(g.error_flag));
        csv_row(os, row);
    }
}

void write_ratio_csv(std::ostream& os, const RatioSeries& rs) {
    os << kCsvSchema << '\n';
    const int dim = rs.points.empty() ? 0 : rs.points.front().d;
    std::vector<std::string> head = {"scale", "ratio"};
    for (const auto& [name, col] : rs.aux) head.push_back(name);
    for (int i = 0; i < dim; ++i) head.push_back("y" + std::to_string(i));
    csv_row(os, head);
    for (size_t i = 0; i < rs.scales.size(); ++i) {
        std::vector<std::string> row = {format_double(rs.scales[i]), format_double(rs.ratios[i])};
        for (const auto& [name, col] : rs.aux) row.push_back(format_double(col[i]));
        for (int c = 0; c < dim; ++c) row.push_back(std::to_string(rs.points[i].c[c]));
        csv_row(os, row);
    }
}

}  // namespace conewalk
