// exact1d.hpp -- exact and semi-exact one-dimensional computations: exit
// probabilities, hitting-time expectations, speed, the s-parameter, rate
// functions, trap scans and the potential/valley analysis of the recurrent
// walk.
//
// Conventions fixed here once and used everywhere:
//   rho_x = (1 - omega_x) / omega_x   (Solomon's odds ratio),
//   u = E log rho:  u < 0 transient right, u > 0 transient left,
//   T_n = min{ t > 0 : X_t = n },  tau_i = T_{i+1} - T_i.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rwre/environment.hpp"

namespace rwre::exact1d {

using std::int64_t;

// ---------------------------------------------------------------------------
// Domain types

struct Window {
    int64_t m_minus;  // left boundary is -m_minus
    int64_t m_plus;   // right boundary is +m_plus
    int64_t z;        // start site, strictly inside

    Window(int64_t m_minus, int64_t m_plus, int64_t z);
};

// Potential W with W(0) = 0 and W(x) - W(x-1) = log rho_x, over an inclusive
// site range [lo, hi] that must contain 0.
struct PotentialProfile {
    int64_t lo = 0;
    std::vector<double> w;

    static PotentialProfile from_environment(const env::Environment& e, int64_t lo, int64_t hi);
    static PotentialProfile from_log_rho(int64_t lo, std::span<const double> log_rho_from_lo_plus_1);

    int64_t hi() const { return lo + static_cast<int64_t>(w.size()) - 1; }
    double at(int64_t x) const { return w[static_cast<std::size_t>(x - lo)]; }
};

struct Valley {
    int64_t left;    // a <= 0
    int64_t right;   // b >= 0
    int64_t bottom;  // leftmost argmin of W over [a, b]
    double depth;    // min of the two wall heights above the bottom
    double b_n;      // bottom / (log n)^2; 0 until a horizon is attached
};

struct RateFunctionSample {
    enum class Method { legendre, laplace, upper_bound };
    double argument = 0.0;
    double value = 0.0;
    Method method = Method::legendre;
};

enum class Classification { transient_right, transient_left, recurrent };

enum class SeriesStatus { converged, infinite, undetermined };

struct SeriesValue {
    double value = 0.0;
    SeriesStatus status = SeriesStatus::converged;
    bool finite() const { return status == SeriesStatus::converged; }
};

struct ErgodicSpeed {
    double v = 0.0;
    SeriesStatus status = SeriesStatus::converged;
};

// ---------------------------------------------------------------------------
// Operations

// P_omega^z( hit -m_minus before m_plus ). Exact, evaluated in log space.
double exit_probability(const env::Environment& e, const Window& w);
// Core on a raw omega array covering the interior sites
// -m_minus+1 .. m_plus-1 (inclusive), omega[0] at site -m_minus+1.
double exit_probability_omegas(std::span<const double> omega, int64_t m_minus, int64_t m_plus,
                               int64_t z);

Classification classify(const env::EnvironmentSpec& spec);

// Product-measure speed formula; throws for non-product laws.
double speed(const env::EnvironmentSpec& spec);

// Series criterion for periodic/Markov laws (constant delegates to speed()).
ErgodicSpeed speed_ergodic(const env::EnvironmentSpec& spec, double tol);

// Quenched E tau_site as the backward series
//   1/omega_site + rho_site / omega_{site-1} + ...
// +infinity is a value (status infinite), not an error.
SeriesValue expected_tau(const env::Environment& e, int64_t site, double tol);

// (1 + E rho) / (1 - E rho) for product laws, +infinity if E rho >= 1.
double annealed_expected_tau(const env::EnvironmentSpec& spec);

// Root of E rho^s = 1; +infinity when rho <= 1 a.s.
double s_parameter(const env::EnvironmentSpec& spec);

// Large-deviation rate of the log-rho block averages:
//   J(y) = sup_lambda ( lambda y - log E rho^lambda ),
// +infinity outside the closed hull of the log-rho support.
double cramer_rate(const env::EnvironmentSpec& spec, double y);

// min_{y > 0} J(y) / y; must agree with s_parameter (cross-check route).
double s_from_rate(const env::EnvironmentSpec& spec);

// (1/n) log E_omega exp(-lambda T_n), lambda >= 0, via the forward
// continued-fraction recursion seeded burn_in sites left of the window.
double quenched_laplace(const env::Environment& e, double lambda, int64_t n,
                        int64_t burn_in = 1000);

// Slowdown branch of the quenched rate function per unit time,
//   I_P(w) = sup_{mu >= 0} ( mu - w * LambdaTau(mu) ),
// where LambdaTau(mu) is the per-level cumulant of exp(+mu T_n). The dual
// variable runs over the analytic continuation of the Laplace recursion;
// the recursion itself detects the critical mu where E exp(mu tau) blows up.
double quenched_rate_slowdown(const env::Environment& e, double w, int64_t n = 10000,
                              int64_t burn_in = 1000);

struct RateUpperBound {
    double value = 0.0;
    double best_tilt = 0.0;  // first-atom weight of the minimizing product tilt
};

// Upper bound on the annealed rate at w, restricted to product tilts of a
// two-point law over the same support: min over the grid (plus the identity
// tilt) of per-site relative entropy + quenched rate under the tilted law.
RateUpperBound annealed_rate_upper(const env::EnvironmentSpec& spec, double w,
                                   std::span<const double> tilt_grid, std::uint64_t env_seed,
                                   int64_t n = 10000, int64_t burn_in = 1000);

// Sites z in [lo, hi] whose k-block average of log rho to the right is >= y:
//   (1/k) * sum_{i=1..k} log rho_{z+i} >= y.
std::vector<int64_t> find_traps(const env::Environment& e, int64_t k, double y, int64_t lo,
                                int64_t hi);

// Smallest valley of the potential containing the origin with both walls of
// height >= depth. Empty when the profile range does not reach the walls.
std::optional<Valley> find_valley(const PotentialProfile& p, double depth);

// Valley of depth log n for a recurrent law; b_n = bottom / (log n)^2.
Valley sinai_valley(const env::Environment& e, int64_t n);

}  // namespace rwre::exact1d
