#include "conewalk/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <queue>
#include <set>

#include <Eigen/Dense>

#include "conewalk/error.hpp"

namespace conewalk {

IncrementDistribution make_increments(int d, std::vector<Atom> atoms) {
    if (d < 1 || d > kMaxDim) fail("model", "DimensionMismatch", "dimension must be 1..4");
    if (atoms.empty()) fail("model", "EmptySupport", "increment law has no atoms");
    Rational total = 0;
    std::set<Point> seen;
    for (size_t i = 0; i < atoms.size(); ++i) {
        const Atom& a = atoms[i];
        if (a.step.d != d)
            fail("model", "DimensionMismatch",
                 "atom " + std::to_string(i) + " has wrong dimension");
        if (a.prob <= 0)
            fail("model", "BadProbability",
                 "atom " + std::to_string(i) + " has non-positive probability");
        if (!seen.insert(a.step).second)
            fail("model", "DuplicateAtom", "atom " + std::to_string(i) + " repeats step " + a.step.str());
        total += a.prob;
    }
    if (total != 1)
        fail("model", "NotNormalized", "probabilities sum to " + rational_string(total) + ", not 1");
    IncrementDistribution inc;
    inc.d = d;
    inc.atoms = std::move(atoms);
    return inc;
}

std::vector<Atom> WalkModel::effective_atoms() const {
    std::vector<Atom> out = increments.atoms;
    if (reversed)
        for (auto& a : out) a.step = -a.step;
    return out;
}

WalkModel make_model(IncrementDistribution inc, ConeSpec cone, bool reversed) {
    if (inc.d != cone.dim())
        fail("model", "DimensionMismatch", "increment dimension does not match cone dimension");
    WalkModel m;
    m.increments = std::move(inc);
    m.cone = std::move(cone);
    m.reversed = reversed;
    return m;
}

WalkModel reverse(const WalkModel& m) {
    WalkModel r = m;
    r.reversed = !m.reversed;
    return r;
}

std::vector<Rational> drift(const WalkModel& model) {
    std::vector<Rational> mu(model.dim(), 0);
    for (const Atom& a : model.effective_atoms())
        for (int i = 0; i < model.dim(); ++i) mu[i] += a.prob * a.step.c[i];
    return mu;
}

std::vector<std::vector<Rational>> covariance(const WalkModel& model) {
    int d = model.dim();
    auto mu = drift(model);
    std::vector<std::vector<Rational>> cov(d, std::vector<Rational>(d, 0));
    for (const Atom& a : model.effective_atoms())
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) cov[i][j] += a.prob * a.step.c[i] * a.step.c[j];
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) cov[i][j] -= mu[i] * mu[j];
    return cov;
}

namespace {

// Triangular integer basis of the subgroup generated by `gens`, by Euclidean
// column elimination with unimodular row operations. Returns the pivot rows;
// the subgroup equals Z^d iff there are d pivots with |product of diagonal| 1.
std::vector<std::vector<int64_t>> lattice_basis(std::vector<std::vector<int64_t>> rows, int d) {
    std::vector<std::vector<int64_t>> basis;
    size_t pivot_row = 0;
    for (int col = 0; col < d && pivot_row < rows.size(); ++col) {
        while (true) {
            size_t best = rows.size();
            for (size_t r = pivot_row; r < rows.size(); ++r) {
                if (rows[r][col] == 0) continue;
                if (best == rows.size() ||
                    std::abs(rows[r][col]) < std::abs(rows[best][col]))
                    best = r;
            }
            if (best == rows.size()) break;  // column exhausted
            std::swap(rows[pivot_row], rows[best]);
            bool clean = true;
            for (size_t r = pivot_row + 1; r < rows.size(); ++r) {
                if (rows[r][col] == 0) continue;
                int64_t q = rows[r][col] / rows[pivot_row][col];
                for (int j = 0; j < d; ++j) rows[r][j] -= q * rows[pivot_row][j];
                if (rows[r][col] != 0) clean = false;
            }
            if (clean) break;
        }
        if (rows[pivot_row][col] != 0) ++pivot_row;
    }
    rows.resize(pivot_row);
    return rows;
}

bool generates_integer_lattice(const std::vector<std::vector<int64_t>>& gens, int d,
                               std::vector<std::vector<int64_t>>* basis_out) {
    auto basis = lattice_basis(gens, d);
    if (basis_out) *basis_out = basis;
    if (int(basis.size()) != d) return false;
    // triangular after elimination: determinant is the product over pivots
    __int128 det = 1;
    for (int i = 0; i < d; ++i) {
        int col = -1;
        for (int j = 0; j < d; ++j)
            if (basis[i][j] != 0) {
                col = j;
                break;
            }
        if (col < 0) return false;
        det *= basis[i][col];
    }
    return det == 1 || det == -1;
}

std::vector<Point> ball_points(const Point& z, int R, const ConeSpec& cone, bool inside_cone) {
    std::vector<Point> out;
    int d = z.d;
    std::vector<int64_t> idx(d, -R);
    while (true) {
        Point p = z;
        int64_t n2 = 0;
        for (int i = 0; i < d; ++i) {
            p.c[i] += idx[i];
            n2 += idx[i] * idx[i];
        }
        if (n2 <= int64_t(R) * R && (!inside_cone || cone.contains(p))) out.push_back(p);
        int i = 0;
        while (i < d && ++idx[i] > R) idx[i++] = -R;
        if (i == d) break;
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

HypothesisReport validate_hypotheses(const WalkModel& model, int irreducibility_radius,
                                     const std::vector<Point>& sample_points) {
    if (irreducibility_radius < 1)
        fail("model", "BadParameter", "irreducibility radius must be >= 1");
    const int d = model.dim();
    HypothesisReport rep;
    rep.irreducibility_radius = irreducibility_radius;

    rep.drift = drift(model);
    rep.covariance = covariance(model);
    rep.zero_drift = true;
    for (const auto& v : rep.drift)
        if (v != 0) rep.zero_drift = false;

    // (H2) in the world frame: transform applied when present.
    {
        Eigen::MatrixXd C(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) C(i, j) = to_double(rep.covariance[i][j]);
        if (model.cone.has_transform()) {
            Eigen::MatrixXd M(d, d);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) M(i, j) = model.cone.transform().at(i, j);
            C = M * C * M.transpose();
        }
        rep.identity_covariance = true;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                if (std::abs(C(i, j) - (i == j ? 1.0 : 0.0)) > 1e-12)
                    rep.identity_covariance = false;
    }

    // (H3): z+A generates Z^d for every z iff the difference lattice of A is
    // all of Z^d (pick z so z+a0 falls in the difference lattice otherwise).
    auto atoms = model.effective_atoms();
    {
        std::vector<std::vector<int64_t>> diffs, support;
        for (size_t i = 0; i < atoms.size(); ++i) {
            std::vector<int64_t> row(d);
            for (int j = 0; j < d; ++j) row[j] = atoms[i].step.c[j];
            support.push_back(row);
            if (i > 0) {
                for (int j = 0; j < d; ++j) row[j] -= atoms[0].step.c[j];
                diffs.push_back(row);
            }
        }
        std::vector<std::vector<int64_t>> basis;
        rep.aperiodic = !diffs.empty() && generates_integer_lattice(diffs, d, &basis);
        for (const auto& row : basis) {
            Point p = Point::zero(d);
            for (int j = 0; j < d; ++j) p.c[j] = row[j];
            rep.aperiodicity_basis.push_back(p);
        }
        rep.support_generates_lattice = generates_integer_lattice(support, d, nullptr);
    }

    rep.convex_cone = !(model.cone.variant() == ConeVariant::Wedge2D &&
                        model.cone.beta() > 3.141592653589793238462643383279502884);

    // (H5) sampled: reverse reachability from z within K cap B(z,R), then
    // check every point of (z+K) cap B(z,R) reaches z.
    rep.irreducible = true;
    const int R = irreducibility_radius;
    for (const Point& z : sample_points) {
        if (z.d != d) fail("model", "DimensionMismatch", "sample point dimension mismatch");
        if (!model.cone.contains(z))
            fail("model", "OutsideCone", "sample point " + z.str() + " is not in the cone");
        if (z.norm() < double(R))
            fail("model", "SampleTooClose",
                 "sample point " + z.str() + " has norm below the radius " + std::to_string(R));

        auto region = ball_points(z, R, model.cone, true);
        std::set<Point> region_set(region.begin(), region.end());
        std::map<Point, std::pair<Point, Point>> parent;  // node -> (next toward z, step used)
        std::queue<Point> frontier;
        frontier.push(z);
        std::set<Point> reached{z};
        while (!frontier.empty()) {
            Point cur = frontier.front();
            frontier.pop();
            for (const Atom& a : atoms) {
                Point prev = cur - a.step;  // prev + step = cur
                if (!region_set.count(prev) || reached.count(prev)) continue;
                reached.insert(prev);
                parent[prev] = {cur, a.step};
                frontier.push(prev);
            }
        }

        PathWitness w;
        w.z = z;
        w.ok = true;
        for (const Point& y : region) {
            Point rel = y - z;
            if (!model.cone.contains(rel)) continue;  // want y in z+K
            if (!reached.count(y)) {
                w.ok = false;
                w.from = y;
                break;
            }
            if (w.steps.empty() && !(y == z)) {
                w.from = y;
                Point cur = y;
                while (!(cur == z)) {
                    auto& pr = parent.at(cur);
                    w.steps.push_back(pr.second);
                    cur = pr.first;
                }
            }
        }
        if (!w.ok) rep.irreducible = false;
        rep.witnesses.push_back(std::move(w));
    }

    try {
        rep.exponent_p = reduite(model.cone).p;
    } catch (const Error&) {
        rep.exponent_p = std::numeric_limits<double>::quiet_NaN();
    }
    try {
        rep.exponent_q = cone_exponent_q(model.cone);
    } catch (const Error&) {
        rep.exponent_q = std::numeric_limits<double>::quiet_NaN();
    }
    rep.moment_threshold_r = moment_threshold(rep.exponent_p, rep.exponent_q, d);
    rep.moments_finite = true;
    return rep;
}

WalkModel decorrelate(const WalkModel& model) {
    const int d = model.dim();
    auto cov = covariance(model);
    Eigen::MatrixXd C(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) C(i, j) = to_double(cov[i][j]);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
    if (es.info() != Eigen::Success)
        fail("model", "SingularCovariance", "eigendecomposition failed");
    double lmax = es.eigenvalues().maxCoeff();
    if (lmax <= 0 || es.eigenvalues().minCoeff() <= 1e-12 * lmax)
        fail("model", "SingularCovariance", "increments are not truly d-dimensional");

    Eigen::MatrixXd M = es.eigenvectors() *
                        es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                        es.eigenvectors().transpose();
    Eigen::MatrixXd check = M * C * M.transpose();
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            if (std::abs(check(i, j) - (i == j ? 1.0 : 0.0)) > 1e-12)
                fail("model", "SingularCovariance", "square-root inverse check failed");

    Mat m;
    m.d = d;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m.at(i, j) = M(i, j);
    WalkModel out = model;
    out.cone.set_transform(m);
    return out;
}

double moment_threshold(double p, double q, int d) {
    if (d < 1) fail("model", "BadParameter", "dimension must be positive");
    return p + q + d - 2 + std::max(2.0 - p, 0.0);
}

}  // namespace conewalk
