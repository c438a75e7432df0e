#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <utility>
#include <vector>

#include "conewalk/model.hpp"
#include "conewalk/point.hpp"
#include "conewalk/rational.hpp"

namespace conewalk {

// Window control for the float engines. The default window is unbounded;
// cells whose mass falls below drop_eps are zeroed and accounted in
// dropped_mass (total drop stays orders below the 1e-12 conservation
// budget). A positive max_cells caps memory: the engine clips lowest-mass
// cells only while cumulative clipped mass stays within clip_tolerance and
// refuses (WindowOverflow) beyond that; it never clips silently.
struct WindowPolicy {
    double drop_eps = 1e-24;
    uint64_t max_cells = 0;  // 0 = unbounded
    double clip_tolerance = 0.0;
    bool force_sparse = false;  // testing hook: bypass the dense engine
};

// One time slice of P(x + S(n) = ., tau_x > n).
struct MassTable {
    int64_t n = 0;
    Point origin;
    double killed_mass = 0.0;
    double dropped_mass = 0.0;
    std::vector<std::pair<Point, double>> entries;  // sorted by point

    double total() const;
    double value_at(const Point& p) const;
};

namespace detail {
class EngineBase;
}

// Killed-walk slice evolution. Step 0 is the unit mass at x (tau_x > 0
// vacuously); each advance() convolves with the increment law, then zeroes
// mass outside the open cone, accumulating it into killed_mass.
// Single-threaded and deterministic: fixed summation order, identical
// results across runs and engines.
class Evolution {
public:
    Evolution(const WalkModel& model, Point x, WindowPolicy policy = {});
    ~Evolution();
    Evolution(Evolution&&) noexcept;
    Evolution& operator=(Evolution&&) noexcept;

    void advance();
    void advance_to(int64_t n);

    int64_t n() const;
    Point origin() const;
    double killed_mass() const;
    double dropped_mass() const;
    double absorbed_mass() const;
    double total_mass() const;
    double value_at(const Point& p) const;
    void for_each(const std::function<void(const Point&, double)>& fn) const;
    MassTable snapshot() const;

    // After each convolution, nonzero mass landing on points satisfying
    // `pred` is removed and reported before normal accounting (used for the
    // K_rho stopping of theta_y).
    void set_absorber(std::function<bool(const Point&)> pred,
                      std::function<void(const Point&, double)> on_absorb);

private:
    std::unique_ptr<detail::EngineBase> impl_;
};

// Streamed evolution: visit(evolution) is called at every step from n_start
// (default 0) through n_max; return false to stop early.
void evolve(const WalkModel& model, Point x, int64_t n_max,
            const std::function<bool(const Evolution&)>& visit, WindowPolicy policy = {});

// Materialized slices 0..n_max (small-n use).
std::vector<MassTable> evolve_tables(const WalkModel& model, Point x, int64_t n_max,
                                     WindowPolicy policy = {});

// P(tau_x > n).
double survival(const WalkModel& model, Point x, int64_t n, WindowPolicy policy = {});
// One pass, values at the requested checkpoints (must be nondecreasing).
std::vector<double> survival_series(const WalkModel& model, Point x,
                                    const std::vector<int64_t>& checkpoints,
                                    WindowPolicy policy = {});

// P(x + S(n) = y, tau_x > n).
double local_prob(const WalkModel& model, Point x, Point y, int64_t n,
                  WindowPolicy policy = {});

// (P(x+S(n)=y, tau_x>n), P(y+S'(n)=x, tau'_y>n)); equal within 1e-12.
std::pair<double, double> time_reversal_check(const WalkModel& model, Point x, Point y,
                                              int64_t n, WindowPolicy policy = {});

struct GreenResult {
    double truncated_sum = 0.0;  // sum over n < horizon
    int64_t horizon = 0;
    double tail_estimate = 0.0;
    enum class TailMethod { None, PowerLaw } tail_method = TailMethod::None;
    double fitted_decay_exponent = 0.0;  // nan when no fit was made
    enum class Flag { Converged, TailDominated, HorizonTooSmall } error_flag = Flag::Converged;

    double value() const { return truncated_sum + tail_estimate; }
};

const char* flag_name(GreenResult::Flag f);

// Truncated Green function with optional power-law tail extrapolation: fit
// log P_n vs log n over the last decade of nonzero terms, require slope
// <= -(1+delta) (delta = 0.05; NonSummableTailFit beyond -1), sum the fitted
// law over the parity progression past the horizon.
GreenResult green(const WalkModel& model, Point x, Point y, int64_t horizon, bool tail,
                  WindowPolicy policy = {});

// One evolution, many targets.
std::vector<GreenResult> green_many(const WalkModel& model, Point x,
                                    const std::vector<Point>& targets, int64_t horizon,
                                    bool tail, WindowPolicy policy = {});

// Full local-probability series P(x+S(n)=y, tau_x>n) for n = 0..horizon-1
// (diagnostics; memory is horizon doubles per target).
std::vector<std::vector<double>> local_series(const WalkModel& model, Point x,
                                              const std::vector<Point>& targets,
                                              int64_t horizon, WindowPolicy policy = {});

struct StoppedFunctionalResult {
    double value = 0.0;           // E[u(y_rho); tau'_y > theta_y, theta_y <= H]
    double unstopped_mass = 0.0;  // alive, not yet in K_rho at horizon
    double stopped_mass = 0.0;    // total mass absorbed into K_rho
    int64_t horizon = 0;
};

// Evolves `reversed_model` (pass reverse(m) to realize S' of a forward m)
// from y; at every step n >= 1, mass entering K_rho(R, rho) is absorbed and
// contributes u(entry point); killed mass contributes nothing.
StoppedFunctionalResult stopped_functional(const WalkModel& reversed_model, Point y, double R,
                                           double rho,
                                           const std::function<double(const Point&)>& u,
                                           int64_t horizon, WindowPolicy policy = {});

// Exact-rational evolution, the oracle path. No dropping, no windows.
struct ExactSlice {
    int64_t n = 0;
    std::map<Point, Rational> mass;
    Rational killed;
};
std::vector<ExactSlice> evolve_exact(const WalkModel& model, Point x, int64_t n_max);

}  // namespace conewalk
