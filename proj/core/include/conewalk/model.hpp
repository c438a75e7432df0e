#pragma once

#include <optional>
#include <vector>

#include "conewalk/geometry.hpp"
#include "conewalk/point.hpp"
#include "conewalk/rational.hpp"

namespace conewalk {

struct Atom {
    Point step;
    Rational prob;
};

// Finite increment law of X on Z^d: atoms pairwise distinct, probabilities
// positive with exact sum 1.
struct IncrementDistribution {
    int d = 0;
    std::vector<Atom> atoms;
};

IncrementDistribution make_increments(int d, std::vector<Atom> atoms);

// The object (S(n), K): increments, cone, reversed flag. `atoms` always hold
// the law of X; when `reversed` is set the walk steps by -X. The
// decorrelating transform lives on the cone (world = M * lattice); lattice
// coordinates are untouched by it.
struct WalkModel {
    IncrementDistribution increments;
    ConeSpec cone;
    bool reversed = false;

    int dim() const { return increments.d; }
    // Steps actually taken by the walk (negated when reversed).
    std::vector<Atom> effective_atoms() const;
};

WalkModel make_model(IncrementDistribution inc, ConeSpec cone, bool reversed = false);
WalkModel reverse(const WalkModel& m);

struct PathWitness {
    Point z;
    bool ok = false;
    Point from;                 // start of the found path, in (z+K) cap B(z,R)
    std::vector<Point> steps;   // atom steps applied from `from` to reach z
};

struct HypothesisReport {
    std::vector<Rational> drift;                       // exact, effective law
    std::vector<std::vector<Rational>> covariance;     // exact, effective law
    bool zero_drift = false;                           // (H1)
    bool identity_covariance = false;                  // (H2), world frame, 1e-12
    bool aperiodic = false;                            // (H3) strong: z+A generates Z^d for every z
    bool support_generates_lattice = false;            // weaker companion: A alone generates Z^d
    std::vector<Point> aperiodicity_basis;             // Hermite basis of the difference lattice
    bool convex_cone = false;                          // (H4)
    bool irreducible = false;                          // (H5), sampled evidence
    int irreducibility_radius = 0;
    std::vector<PathWitness> witnesses;
    double exponent_p = 0.0;                           // nan when not catalogued
    double exponent_q = 0.0;                           // sup_sigma q_sigma; nan when not catalogued
    double moment_threshold_r = 0.0;                   // p+q+d-2+(2-p)^+
    bool moments_finite = true;                        // finite support
};

// Machine checks of (H1)-(H5) and the (M1) threshold. Aperiodicity is decided
// on the difference lattice (equivalent to the for-every-z condition);
// irreducibility is probed by breadth-first search around each sample point.
// Errors: EmptySupport, DimensionMismatch, SampleTooClose.
HypothesisReport validate_hypotheses(const WalkModel& model, int irreducibility_radius,
                                     const std::vector<Point>& sample_points);

// Exact drift and covariance of the effective law.
std::vector<Rational> drift(const WalkModel& model);
std::vector<std::vector<Rational>> covariance(const WalkModel& model);

// Attaches the symmetric square-root-inverse transform M (M cov M^T = I) to
// the cone. Errors: SingularCovariance.
WalkModel decorrelate(const WalkModel& model);

// p + q + d - 2 + (2-p)^+, the moment threshold r(p) of (M1).
double moment_threshold(double p, double q, int d);

}  // namespace conewalk
