#include "conewalk/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "conewalk/error.hpp"

namespace conewalk {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kBoundaryTol = 1e-9;

Vecd rotate90(const Vecd& v) {
    Vecd r = v;
    r.c[0] = -v.c[1];
    r.c[1] = v.c[0];
    return r;
}

// Counterclockwise angle of v, in [0, 2pi).
double angle_ccw(const Vecd& v) {
    double a = std::atan2(v.c[1], v.c[0]);
    if (a < 0) a += 2 * kPi;
    return a;
}

double wrap_2pi(double a) {
    while (a < 0) a += 2 * kPi;
    while (a >= 2 * kPi) a -= 2 * kPi;
    return a;
}

Mat invert(const Mat& m) {
    int d = m.d;
    double a[kMaxDim][2 * kMaxDim] = {};
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) a[i][j] = m.at(i, j);
        a[i][d + i] = 1.0;
    }
    for (int col = 0; col < d; ++col) {
        int piv = col;
        for (int r = col + 1; r < d; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (std::abs(a[piv][col]) < 1e-14)
            fail("geometry", "SingularTransform", "transform matrix is not invertible");
        std::swap(a[piv], a[col]);
        double inv = 1.0 / a[col][col];
        for (int j = 0; j < 2 * d; ++j) a[col][j] *= inv;
        for (int r = 0; r < d; ++r) {
            if (r == col) continue;
            double f = a[r][col];
            for (int j = 0; j < 2 * d; ++j) a[r][j] -= f * a[col][j];
        }
    }
    Mat out;
    out.d = d;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) out.at(i, j) = a[i][d + j];
    return out;
}

double det2(const Mat& m) { return m.at(0, 0) * m.at(1, 1) - m.at(0, 1) * m.at(1, 0); }

bool integral_entries(const Vecd& v) {
    for (int i = 0; i < v.d; ++i) {
        if (v.c[i] != std::nearbyint(v.c[i]) || std::abs(v.c[i]) > 1e12) return false;
    }
    return true;
}

}  // namespace

std::string Point::str() const {
    std::string s = "(";
    for (int i = 0; i < d; ++i) {
        if (i) s += ",";
        s += std::to_string(c[i]);
    }
    s += ")";
    return s;
}

const char* variant_name(ConeVariant v) {
    switch (v) {
        case ConeVariant::HalfSpace: return "halfspace";
        case ConeVariant::Orthant: return "orthant";
        case ConeVariant::Wedge2D: return "wedge2d";
        case ConeVariant::Polyhedral: return "polyhedral";
    }
    return "?";
}

ConeSpec ConeSpec::half_space(Vecd normal) {
    if (normal.d < 1 || normal.d > kMaxDim)
        fail("geometry", "DimensionMismatch", "half-space normal must have 1..4 entries");
    if (normal.norm() == 0.0) fail("geometry", "DegenerateNormal", "half-space normal is zero");
    ConeSpec k;
    k.variant_ = ConeVariant::HalfSpace;
    k.d_ = normal.d;
    k.base_normals_ = {normal};
    k.finalize();
    return k;
}

ConeSpec ConeSpec::orthant(int d) {
    if (d < 1 || d > kMaxDim) fail("geometry", "DimensionMismatch", "orthant dimension must be 1..4");
    ConeSpec k;
    k.variant_ = ConeVariant::Orthant;
    k.d_ = d;
    for (int i = 0; i < d; ++i) {
        Vecd n = Vecd::zero(d);
        n.c[i] = 1.0;
        k.base_normals_.push_back(n);
    }
    k.finalize();
    return k;
}

ConeSpec ConeSpec::wedge2d(double beta) {
    if (!(beta > 0.0 && beta < 2 * kPi))
        fail("geometry", "BadOpening", "wedge opening must lie in (0, 2pi)");
    ConeSpec k;
    k.variant_ = ConeVariant::Wedge2D;
    k.d_ = 2;
    k.beta_ = beta;
    k.ray0_ = Vecd{1.0, 0.0};
    k.ray1_ = Vecd{std::cos(beta), std::sin(beta)};
    if (beta <= kPi) {
        k.base_normals_.push_back(rotate90(k.ray0_));     // (0, 1)
        k.base_normals_.push_back(scaled(rotate90(k.ray1_), -1.0));  // (sin b, -cos b)
    }
    k.finalize();
    return k;
}

ConeSpec ConeSpec::polyhedral(std::vector<Vecd> normals) {
    if (normals.empty())
        fail("geometry", "DegenerateNormal", "polyhedral cone needs at least one normal");
    int d = normals.front().d;
    if (d < 1 || d > kMaxDim)
        fail("geometry", "DimensionMismatch", "polyhedral normals must have 1..4 entries");
    for (const auto& n : normals) {
        if (n.d != d) fail("geometry", "DimensionMismatch", "polyhedral normals have mixed dimensions");
        if (n.norm() == 0.0) fail("geometry", "DegenerateNormal", "polyhedral normal is zero");
    }
    ConeSpec k;
    k.variant_ = ConeVariant::Polyhedral;
    k.d_ = d;
    k.base_normals_ = std::move(normals);
    k.finalize();
    return k;
}

void ConeSpec::finalize() {
    integer_normals_ = !base_normals_.empty();
    int_normals_.clear();
    for (const auto& n : base_normals_) {
        if (!integral_entries(n)) {
            integer_normals_ = false;
            break;
        }
    }
    if (variant_ == ConeVariant::Wedge2D && beta_ > kPi) integer_normals_ = false;
    if (integer_normals_) {
        for (const auto& n : base_normals_) {
            std::vector<int64_t> row(d_);
            for (int i = 0; i < d_; ++i) row[i] = int64_t(std::nearbyint(n.c[i]));
            int_normals_.push_back(std::move(row));
        }
    }

    world_normals_.clear();
    Mat minv;
    if (has_transform_) minv = invert(transform_);
    for (const auto& n : base_normals_) {
        Vecd w = has_transform_ ? minv.apply_transposed(n) : n;
        world_normals_.push_back(normalized(w));
    }

    // Interior witness: small lattice point strictly inside, found by scanning
    // boxes of growing size.
    witness_ = Point::zero(d_);
    bool found = false;
    for (int64_t lim : {1, 2, 4, 8, 16}) {
        double best = 0;
        std::vector<int64_t> idx(d_, -lim);
        Point cand = Point::zero(d_);
        while (true) {
            for (int i = 0; i < d_; ++i) cand.c[i] = idx[i];
            if (contains(cand)) {
                double n2 = cand.norm2();
                if (!found || n2 < best) {
                    best = n2;
                    witness_ = cand;
                    found = true;
                }
            }
            int i = 0;
            while (i < d_ && ++idx[i] > lim) idx[i++] = -lim;
            if (i == d_) break;
        }
        if (found) break;
    }
    if (!found)
        fail("geometry", "EmptyConeInterior", "no interior lattice point within radius 16");
}

void ConeSpec::set_transform(const Mat& m) {
    if (m.d != d_) fail("geometry", "DimensionMismatch", "transform dimension does not match cone");
    transform_ = m;
    has_transform_ = true;
    finalize();
}

bool ConeSpec::contains(const Point& x) const {
    if (x.d != d_) fail("geometry", "DimensionMismatch", "point dimension does not match cone");
    if (integer_normals_) {
        for (const auto& n : int_normals_) {
            int64_t dotv = 0;
            for (int i = 0; i < d_; ++i) dotv += n[i] * x.c[i];
            if (dotv <= 0) return false;
        }
        return true;
    }
    return contains(Vecd::from(x));
}

bool ConeSpec::contains(const Vecd& x) const {
    if (x.d != d_) fail("geometry", "DimensionMismatch", "point dimension does not match cone");
    if (variant_ == ConeVariant::Wedge2D && beta_ > kPi) {
        if (x.c[0] == 0.0 && x.c[1] == 0.0) return false;
        double a = angle_ccw(x);
        return a > 0.0 && a < beta_;
    }
    for (const auto& n : base_normals_) {
        if (dot(n, x) <= 0.0) return false;
    }
    return true;
}

double ConeSpec::dist_boundary(const Point& x) const {
    if (!contains(x)) fail("geometry", "OutsideCone", "dist_boundary at " + x.str());
    return dist_boundary(Vecd::from(x));
}

double ConeSpec::dist_boundary(const Vecd& x_base) const {
    Vecd w = to_world(x_base);
    if (variant_ == ConeVariant::Wedge2D) {
        // Boundary is two rays; nearest point is on a ray or at the apex.
        Vecd r0 = normalized(to_world(ray0_));
        Vecd r1 = normalized(to_world(ray1_));
        auto ray_dist = [&](const Vecd& r) {
            double t = dot(w, r);
            if (t <= 0.0) return w.norm();
            Vecd rest = w;
            for (int i = 0; i < 2; ++i) rest.c[i] -= t * r.c[i];
            return rest.norm();
        };
        return std::min(ray_dist(r0), ray_dist(r1));
    }
    double best = 0;
    bool first = true;
    for (const auto& n : world_normals_) {
        double v = dot(w, n);
        if (first || v < best) best = v, first = false;
    }
    return best;
}

bool ConeSpec::in_K_rho(const Point& x, double R, double rho) const {
    if (!(rho > 0.0 && rho < 1.0)) fail("geometry", "BadParameter", "rho must lie in (0,1)");
    if (!(R > 0.0)) fail("geometry", "BadParameter", "R must be positive");
    if (!contains(x)) return false;
    double nrm = world_norm(x);
    return dist_boundary(Vecd::from(x)) >= R * std::pow(nrm, 1.0 - rho);
}

namespace {

// Reduite of a planar cone given its two boundary rays in base coordinates,
// ordered counterclockwise (interior swept from r0 to r1). An
// orientation-reversing transform flips the sweep, so swap then.
ReduiteEntry wedge_entry(const ConeSpec& cone, Vecd r0_base, Vecd r1_base) {
    Vecd a = normalized(cone.to_world(r0_base));
    Vecd b = normalized(cone.to_world(r1_base));
    if (cone.has_transform() && det2(cone.transform()) < 0) std::swap(a, b);
    double th0 = angle_ccw(a);
    double beta = wrap_2pi(angle_ccw(b) - th0);
    double p = kPi / beta;
    ReduiteEntry e;
    e.p = p;
    e.closed_form = true;
    e.u_world = [p, th0, beta](const Vecd& w) {
        double r = w.norm();
        if (r == 0.0) return 0.0;
        double phi = wrap_2pi(std::atan2(w.c[1], w.c[0]) - th0);
        if (phi <= 0.0 || phi >= beta) return 0.0;
        return std::pow(r, p) * std::sin(p * phi);
    };
    return e;
}

ReduiteEntry product_entry(std::vector<Vecd> frame) {
    ReduiteEntry e;
    e.p = double(frame.size());
    e.closed_form = true;
    e.u_world = [frame = std::move(frame)](const Vecd& w) {
        double prod = 1.0;
        for (const auto& f : frame) {
            double v = dot(w, f);
            if (v <= 0.0) return 0.0;
            prod *= v;
        }
        return prod;
    };
    return e;
}

ReduiteEntry linear_entry(Vecd normal_w) {
    ReduiteEntry e;
    e.p = 1.0;
    e.closed_form = true;
    e.u_world = [n = normal_w](const Vecd& w) { return dot(w, n); };
    return e;
}

bool mutually_orthogonal(const std::vector<Vecd>& vs, double tol = 1e-10) {
    for (size_t i = 0; i < vs.size(); ++i)
        for (size_t j = i + 1; j < vs.size(); ++j)
            if (std::abs(dot(vs[i], vs[j])) > tol) return false;
    return true;
}

// Edge ray of a planar two-face cone lying on face `own`, pointing into the
// closed cone (nonnegative against the other inward normal).
Vecd planar_edge_ray(const Vecd& own, const Vecd& other) {
    Vecd r = rotate90(own);
    if (dot(r, other) < 0) r = scaled(r, -1.0);
    return r;
}

}  // namespace

ReduiteEntry reduite(const ConeSpec& cone) {
    ReduiteEntry e;
    switch (cone.variant()) {
        case ConeVariant::HalfSpace: {
            e = linear_entry(cone.world_normals()[0]);
            break;
        }
        case ConeVariant::Orthant: {
            if (cone.dim() == 1) {
                e = linear_entry(cone.world_normals()[0]);
                break;
            }
            std::vector<Vecd> frame;
            for (int i = 0; i < cone.dim(); ++i) {
                Vecd ei = Vecd::zero(cone.dim());
                ei.c[i] = 1.0;
                frame.push_back(normalized(cone.to_world(ei)));
            }
            if (mutually_orthogonal(frame)) {
                e = product_entry(frame);
            } else if (cone.dim() == 2) {
                e = wedge_entry(cone, Vecd{1.0, 0.0}, Vecd{0.0, 1.0});
            } else {
                fail("geometry", "NotCatalogued",
                     "orthant image under non-orthogonal transform has no catalog reduite");
            }
            break;
        }
        case ConeVariant::Wedge2D: {
            e = wedge_entry(cone, Vecd{1.0, 0.0},
                            Vecd{std::cos(cone.beta()), std::sin(cone.beta())});
            break;
        }
        case ConeVariant::Polyhedral: {
            const auto& wn = cone.world_normals();
            if (wn.size() == 1) {
                e = linear_entry(wn[0]);
            } else if (int(wn.size()) == cone.dim() && mutually_orthogonal(wn)) {
                e = product_entry(wn);
            } else if (cone.dim() == 2 && wn.size() == 2) {
                const auto& bn = cone.base_normals();
                Vecd ra = planar_edge_ray(bn[0], bn[1]);
                Vecd rb = planar_edge_ray(bn[1], bn[0]);
                if (wrap_2pi(angle_ccw(rb) - angle_ccw(ra)) > kPi) std::swap(ra, rb);
                e = wedge_entry(cone, ra, rb);
            } else {
                fail("geometry", "NotCatalogued",
                     "no catalog reduite for this polyhedral cone; supply u externally");
            }
            break;
        }
    }
    ConeSpec copy = cone;
    auto uw = e.u_world;
    e.u = [copy, uw](const Point& x) { return uw(copy.to_world(x)); };
    return e;
}

TangentCone tangent_cone(const ConeSpec& cone, const Vecd& sigma_in) {
    if (sigma_in.d != cone.dim())
        fail("geometry", "DimensionMismatch", "sigma dimension does not match cone");
    double nrm = sigma_in.norm();
    if (nrm == 0.0) fail("geometry", "NotOnBoundary", "sigma is the apex, not a sphere point");
    Vecd sigma = scaled(sigma_in, 1.0 / nrm);

    if (cone.variant() == ConeVariant::Wedge2D && cone.beta() > kPi) {
        double a = angle_ccw(sigma);
        bool on0 = a < kBoundaryTol || a > 2 * kPi - kBoundaryTol;
        bool on1 = std::abs(a - cone.beta()) < kBoundaryTol;
        if (!on0 && !on1) fail("geometry", "NotOnBoundary", "sigma is not on a wedge edge");
        Vecd ray = on0 ? Vecd{1.0, 0.0} : Vecd{std::cos(cone.beta()), std::sin(cone.beta())};
        Vecd n = rotate90(ray);
        Vecd mid = Vecd{std::cos(cone.beta() / 2), std::sin(cone.beta() / 2)};
        if (dot(n, mid) < 0) n = scaled(n, -1.0);
        ConeSpec tc = ConeSpec::half_space(n);
        if (cone.has_transform()) tc.set_transform(cone.transform());
        return TangentCone{sigma, std::move(tc), 1.0, 1};
    }

    const auto& bn = cone.base_normals();
    std::vector<int> active;
    for (size_t i = 0; i < bn.size(); ++i) {
        double v = dot(normalized(bn[i]), sigma);
        if (v < -kBoundaryTol)
            fail("geometry", "NotOnBoundary", "sigma lies outside the closed cone");
        if (v <= kBoundaryTol) active.push_back(int(i));
    }
    if (active.empty())
        fail("geometry", "NotOnBoundary", "sigma lies in the open cone, not on its boundary");

    std::vector<Vecd> act_base, act_world;
    for (int i : active) {
        act_base.push_back(bn[i]);
        act_world.push_back(cone.world_normals()[i]);
    }
    ConeSpec tc = act_base.size() == 1 ? ConeSpec::half_space(act_base[0])
                                       : ConeSpec::polyhedral(act_base);
    if (cone.has_transform()) tc.set_transform(cone.transform());

    double q = 0.0;
    if (act_world.size() == 1) {
        q = 1.0;
    } else if (mutually_orthogonal(act_world)) {
        q = double(act_world.size());
    } else if (act_world.size() == 2) {
        // tangent wedge: opening gamma = pi - angle between inward normals
        double c = std::clamp(dot(act_world[0], act_world[1]), -1.0, 1.0);
        double gamma = kPi - std::acos(c);
        q = kPi / gamma;
    } else {
        fail("geometry", "NotCatalogued", "tangent cone exponent not in catalog");
    }
    return TangentCone{sigma, std::move(tc), q, int(active.size())};
}

double cone_exponent_q(const ConeSpec& cone) {
    switch (cone.variant()) {
        case ConeVariant::HalfSpace: return 1.0;
        case ConeVariant::Wedge2D: return 1.0;
        case ConeVariant::Orthant: return std::max(1, cone.dim() - 1);
        case ConeVariant::Polyhedral: break;
    }
    if (cone.dim() <= 2 || cone.base_normals().size() == 1) return 1.0;
    const auto& wn = cone.world_normals();
    if (int(wn.size()) <= cone.dim() && mutually_orthogonal(wn)) {
        // R^(d-k) x orthant(k); all k faces are active along a line direction
        // unless k = d, where at most k-1 meet on the sphere.
        int k = int(wn.size());
        return std::max(1, k == cone.dim() ? k - 1 : k);
    }
    if (cone.dim() == 3) {
        double q = 1.0;
        for (size_t i = 0; i < wn.size(); ++i) {
            for (size_t j = i + 1; j < wn.size(); ++j) {
                const Vecd &a = wn[i], &b = wn[j];
                Vecd e = Vecd::zero(3);
                e.c[0] = a.c[1] * b.c[2] - a.c[2] * b.c[1];
                e.c[1] = a.c[2] * b.c[0] - a.c[0] * b.c[2];
                e.c[2] = a.c[0] * b.c[1] - a.c[1] * b.c[0];
                if (e.norm() < 1e-12) continue;
                for (double s : {1.0, -1.0}) {
                    Vecd cand = scaled(e, s / e.norm());
                    bool in_closure = true;
                    for (const auto& n : wn)
                        if (dot(n, cand) < -kBoundaryTol) in_closure = false;
                    if (!in_closure) continue;
                    double c = std::clamp(dot(a, b), -1.0, 1.0);
                    q = std::max(q, kPi / (kPi - std::acos(c)));
                }
            }
        }
        return q;
    }
    fail("geometry", "NotCatalogued", "cone exponent q not available for this polyhedral cone");
}

}  // namespace conewalk
