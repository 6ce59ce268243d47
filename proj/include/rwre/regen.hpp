// regen.hpp -- path decompositions: fresh times, regeneration times,
// coin-forced modified regenerations, i.i.d. slab checks, and cut times of
// the five-dimensional component walk.
//
// The defining conditions quantify over infinite futures; here they are
// verified up to a finite horizon H (regenerations) or within a margin
// window M (cut times), and the boundary candidate is flagged censored.
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "rwre/estimates.hpp"
#include "rwre/walk.hpp"

namespace rwre::regen {

using std::int64_t;
using std::uint64_t;

// ---------------------------------------------------------------------------
// Decompositions

struct Slab {
    int64_t start_time = 0;              // d_i
    int64_t duration = 0;                // d_{i+1} - d_i
    std::vector<int64_t> displacement;   // X_{d_{i+1}} - X_{d_i}
    int64_t env_level_lo = 0;            // slab environment range [Z_{d_i}, Z_{d_{i+1}-1})
    int64_t env_level_hi = 0;

    int64_t displacement_along(std::span<const int64_t> ell) const;
};

struct RegenerationDecomposition {
    std::vector<int64_t> ell;
    std::vector<int64_t> times;  // accepted regeneration times, strictly increasing
    std::vector<Slab> slabs;     // slab i sits between times[i] and times[i+1]
    int64_t horizon = 0;
    bool last_censored = true;   // the final accepted time is verified only up to H
    double sup_abs_before_first = 0.0;  // sup_{0 <= n < d_1} |X_n|

    // Slabs that the i.i.d. statement covers: indices i >= 2, i.e. slabs
    // from [d_2, d_3) on.
    std::span<const Slab> stationary_slabs() const {
        if (slabs.size() < 2) return {};
        return {slabs.data() + 1, slabs.size() - 1};
    }
};

struct CutDecomposition {
    std::vector<int64_t> cuts;
    int64_t margin = 0;
    int64_t horizon = 0;
};

// ---------------------------------------------------------------------------
// Operations

// t is fresh when Z_t > Z_n for all n < t; t = 0 is fresh by convention.
std::vector<int64_t> fresh_times(std::span<const int64_t> z);

// Fresh times t < H with Z_n >= Z_t for all n in (t, H].
RegenerationDecomposition regeneration_times(const walk::Trajectory& t,
                                             std::span<const int64_t> ell, int64_t horizon);

// Regenerations forced through the exact coin pattern u (coin codes), with
// sum u_i . ell >= L/2 required of the pattern. Needs a coupled trajectory.
std::vector<int64_t> modified_regeneration_times(const walk::Trajectory& t, int64_t L,
                                                 std::span<const walk::CoinCode> u,
                                                 std::span<const int64_t> ell, int64_t horizon);

struct IidReport {
    double acf_duration = 0.0;
    double acf_displacement = 0.0;
    double p_duration = 1.0;
    double p_displacement = 1.0;
    int n_slabs = 0;
    double level = 0.01;
    bool pass = false;  // both permutation p-values >= level/2
};

// Lag-1 autocorrelation of slab durations and displacements plus seeded
// permutation tests; Bonferroni-combined verdict at the given level.
IidReport slabs_iid_check(const RegenerationDecomposition& d, uint64_t seed, double level = 0.01);

// Renewal-reward velocity: mean slab displacement over mean slab duration,
// CI by slab-level bootstrap resampling.
stats::EstimateWithCI lln_via_regeneration(const RegenerationDecomposition& d, uint64_t boot_seed,
                                           int boot_iters = 1000);

// Cut times of a Z^5 path: t in [M, H-M] such that the vertex sets of
// [t-M, t) and [t, t+M) do not intersect.
CutDecomposition cut_times(std::span<const std::array<int64_t, 5>> r_path, int64_t horizon,
                           int64_t margin);

// Direct re-verification of one reported cut (used by the invariant suite).
bool verify_cut(std::span<const std::array<int64_t, 5>> r_path, int64_t t, int64_t horizon,
                int64_t margin);

struct CutVelocityReport {
    stats::EstimateWithCI velocity;  // residual-coordinate displacement per unit walk time
    double acf = 0.0;                // lag-1 autocorrelation of cut increments
    double p_acf = 1.0;              // permutation p-value
    bool acf_pass = false;           // p >= level
    double level = 0.01;
    int n_increments = 0;
};

// Velocity of the residual coordinate from increments between cut times
// (mapped from component-walk time to walk time through U).
CutVelocityReport lln_via_cutpoints(const walk::Trajectory& t, const CutDecomposition& cuts,
                                    uint64_t seed);

}  // namespace rwre::regen
