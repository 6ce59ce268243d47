// walk.hpp -- trajectory samplers: quenched and annealed walkers, the
// coin-coupled walker, and the product-structure walker whose first five
// coordinates follow a deterministic-kernel random walk.
#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "rwre/environment.hpp"

namespace rwre::walk {

using std::int64_t;
using std::uint64_t;

// ---------------------------------------------------------------------------
// Trajectories

// Coin codes: 0 is the lazy coin; +(k+1) / -(k+1) are +e_k / -e_k (0-based axis k).
using CoinCode = std::int8_t;

struct RuiRecord {
    std::vector<std::array<int64_t, 5>> r;  // R_0 .. R_{U_N}
    std::vector<std::uint8_t> bits;         // I_0 .. I_{N-1}
    std::vector<std::uint32_t> u;           // U_0 .. U_N, partial sums of bits
};

struct Trajectory {
    int dim = 1;
    std::vector<int64_t> coords;  // (steps+1) * dim, row-major
    uint64_t env_seed = 0;
    uint64_t walk_seed = 0;
    std::vector<CoinCode> coins;  // empty unless sampled by the coupled walker
    std::optional<RuiRecord> rui;

    int64_t steps() const { return static_cast<int64_t>(coords.size()) / dim - 1; }
    int64_t coord(int64_t n, int axis) const {
        return coords[static_cast<std::size_t>(n * dim + axis)];
    }
    int64_t x1(int64_t n) const { return coord(n, 0); }
    // Z_n = X_n . ell
    std::vector<int64_t> project(std::span<const int64_t> ell) const;
};

struct CouplingParams {
    double epsilon = 0.0;
    int dim = 1;

    // requires 1 - epsilon*dim > 0 and epsilon/2 <= every transition entry
    // of the law's support
    void validate(const env::EnvironmentSpec& spec) const;
};

// One-step probability of direction e under the coupled kernel, evaluated as
// the coin decomposition (coin hit + lazy branch); marginally equals omega_e.
double coupled_step_probability(double omega_e, double epsilon, int dim);

// ---------------------------------------------------------------------------
// Samplers (all deterministic in their seeds)

Trajectory run_quenched(const env::Environment& e, int64_t start, int64_t n_steps,
                        uint64_t walk_seed);

// Fresh environment per walker; (env_seed, walk_seed) pairs split from the
// master seed by walker index.
std::vector<Trajectory> run_annealed(const env::EnvironmentSpec& spec, int64_t n_steps,
                                     int n_walkers, uint64_t master_seed);

// Endpoint-only annealed sampling for large grids; runs walkers in parallel
// and returns endpoints in walker order (schedule-independent).
std::vector<int64_t> annealed_endpoints(const env::EnvironmentSpec& spec, int64_t n_steps,
                                        int64_t n_walkers, uint64_t master_seed, int jobs);

// Endpoint-only quenched sampling on one fixed environment.
std::vector<int64_t> quenched_endpoints(const env::Environment& e, int64_t start, int64_t n_steps,
                                        int64_t n_walkers, uint64_t master_seed, int jobs);

// Position at two checkpoint times per annealed walker (aging statistics).
struct TwoTimePositions {
    std::vector<int64_t> x_early;
    std::vector<int64_t> x_late;
};
TwoTimePositions annealed_two_time(const env::EnvironmentSpec& spec, int64_t t_early,
                                   int64_t t_late, int64_t n_walkers, uint64_t master_seed,
                                   int jobs);

// First passage time of level `level` (> 0), capped at max_steps.
struct FirstPassage {
    int64_t time = 0;
    bool reached = false;
};
std::vector<FirstPassage> annealed_first_passage(const env::EnvironmentSpec& spec, int64_t level,
                                                 int64_t max_steps, int64_t n_walkers,
                                                 uint64_t master_seed, int jobs);

Trajectory run_coupled(const env::Environment& e, const CouplingParams& params, int64_t n_steps,
                       uint64_t walk_seed);

// Residual law of the product-structure walker: distribution of the
// probability of +e_6 given a residual step. Values may touch {0, 1}
// (a deterministic residual is a legitimate degenerate diagnostic).
struct ResidualLaw {
    std::vector<double> values;
    std::vector<double> weights;

    static ResidualLaw deterministic(double v) { return {{v}, {1.0}}; }
    void validate() const;
};

struct Theorem2Config {
    std::array<double, 10> q{};  // q_{+1}, q_{-1}, ..., q_{+5}, q_{-5}
    ResidualLaw residual;        // law of the +e_6 share of the residual mass
    double S() const;
    void validate() const;  // S < 1, q entries > 0

    // equal-eta preset: all ten first-five entries equal
    static Theorem2Config equal_eta(double eta, ResidualLaw residual);
};

// d = 6 product-structure walker: first five coordinates move by q/S at
// Bernoulli(S) times, the sixth by the environment kernel normalized by
// (1-S). The returned trajectory carries the (R, I, U) record and satisfies
// X^1_n = R_{U_n} exactly at every step.
Trajectory run_theorem2(const Theorem2Config& cfg, int64_t n_steps, uint64_t env_seed,
                        uint64_t walk_seed);

// ---------------------------------------------------------------------------
// Hitting times

struct HittingTimes {
    std::vector<int64_t> times;  // times[k] = T_{k+1}, first time X.ell = k+1
    std::vector<int64_t> taus;   // taus[k] = T_{k+1} - T_k with T_0 = 0
    int64_t max_level = 0;       // highest level reached
    int64_t censored_levels = 0; // levels requested implicitly but not reached
};

// T_n = min{ t > 0 : X_t . ell = n } for n = 1 .. max reached level.
HittingTimes hitting_times(const Trajectory& t, std::span<const int64_t> ell);

}  // namespace rwre::walk
