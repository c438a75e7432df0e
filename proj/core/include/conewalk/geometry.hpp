#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "conewalk/point.hpp"

namespace conewalk {

enum class ConeVariant { HalfSpace, Orthant, Wedge2D, Polyhedral };

const char* variant_name(ConeVariant v);

// Open convex cone K in R^d. The cone is described in base (lattice)
// coordinates; an optional decorrelating transform M maps base to world
// coordinates. Membership of lattice points is decided in base coordinates
// (exact where normals are integer); metric queries (distances, norms,
// reduite values) act on world coordinates.
class ConeSpec {
public:
    // Empty placeholder (d = 0); usable cones come from the factories.
    ConeSpec() = default;

    static ConeSpec half_space(Vecd normal);
    static ConeSpec orthant(int d);
    static ConeSpec wedge2d(double beta);
    static ConeSpec polyhedral(std::vector<Vecd> normals);

    ConeVariant variant() const { return variant_; }
    int dim() const { return d_; }
    double beta() const { return beta_; }

    // Base-coordinate inward face normals. For Wedge2D these are the two
    // edge-ray inward normals (beta <= pi only); empty for beta > pi.
    const std::vector<Vecd>& base_normals() const { return base_normals_; }
    // Unit world normals (transform applied), same order.
    const std::vector<Vecd>& world_normals() const { return world_normals_; }

    bool has_transform() const { return has_transform_; }
    const Mat& transform() const { return transform_; }
    void set_transform(const Mat& m);

    Vecd to_world(const Point& x) const {
        return has_transform_ ? transform_.apply(x) : Vecd::from(x);
    }
    Vecd to_world(const Vecd& x) const { return has_transform_ ? transform_.apply(x) : x; }

    // True when every base normal has integer entries, so lattice membership
    // is decided in exact integer arithmetic.
    bool integer_normals() const { return integer_normals_; }

    // Membership of the open cone, base coordinates.
    bool contains(const Point& x) const;
    bool contains(const Vecd& x) const;

    // Euclidean distance from x to the boundary, world metric. Errors with
    // OutsideCone when x is not strictly inside.
    double dist_boundary(const Point& x) const;
    double dist_boundary(const Vecd& x_base) const;

    double world_norm(const Point& x) const { return to_world(x).norm(); }

    // dist(x, boundary) >= R * |x|^(1-rho), closed inequality, world metric.
    bool in_K_rho(const Point& x, double R, double rho) const;

    // Small lattice point strictly inside the cone (used as a path offset and
    // as the interior witness for polyhedral specs).
    Point interior_witness() const { return witness_; }

private:
    void finalize();

    ConeVariant variant_ = ConeVariant::Orthant;
    int d_ = 0;
    double beta_ = 0.0;
    std::vector<Vecd> base_normals_;
    std::vector<Vecd> world_normals_;
    std::vector<std::vector<int64_t>> int_normals_;
    bool integer_normals_ = false;
    bool has_transform_ = false;
    Mat transform_;
    Point witness_;
    // Wedge edge rays, base then world (unit), used for distance and reduite.
    Vecd ray0_, ray1_;
};

// Closed-form reduite of a catalogued cone: u > 0 on K, u = 0 on dK,
// classically harmonic, homogeneous of degree p.
struct ReduiteEntry {
    double p = 0.0;
    bool closed_form = true;
    std::function<double(const Vecd&)> u_world;  // world coordinates
    std::function<double(const Point&)> u;       // lattice point, transform applied
};

// Catalog lookup. HalfSpace -> <x, n>, p = 1. Orthant and orthogonal-frame
// images -> product of frame coordinates, p = d. Planar cones -> wedge form
// r^(pi/beta) sin(pi theta / beta), p = pi/beta. Errors: NotCatalogued.
ReduiteEntry reduite(const ConeSpec& cone);

struct TangentCone {
    Vecd sigma;       // base point on the unit sphere, base coordinates
    ConeSpec cone;    // tangent cone K_sigma (base coordinates, full space if no active face)
    double q = 0.0;   // reduite exponent of K_sigma, when catalogued
    int active_faces = 0;
};

// Tangent cone at a boundary direction sigma (|sigma| = 1, sigma on dK).
// Inactive constraints are dropped; q comes from the catalog of the reduced
// cone (full-line factors do not change the exponent).
// Errors: NotOnBoundary, NotCatalogued (for q only; reported via q = nan? no:
// throws, since callers need q for normalization).
TangentCone tangent_cone(const ConeSpec& cone, const Vecd& sigma);

// sup over boundary directions of q_sigma; 1 for half-spaces and planar
// cones, d-1 for the orthant.
double cone_exponent_q(const ConeSpec& cone);

}  // namespace conewalk
