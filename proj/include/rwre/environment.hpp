// environment.hpp -- environment laws P and realized environments omega.
//
// A law assigns nearest-neighbour transition probabilities to every lattice
// site. Realized environments are pure functions of (spec, seed, site):
// lazy, unbounded and replayable, with no stored state. The odds ratio at a
// 1d site is rho_x = (1 - omega_x) / omega_x, so u = E log rho < 0 means
// transience to +infinity.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "rwre/rng.hpp"

namespace rwre::env {

using std::int64_t;
using std::uint64_t;

// ---------------------------------------------------------------------------
// Law kinds

struct Constant {
    double p = 0.5;  // right-step probability at every site
};

struct FiniteSupport {
    std::vector<double> values;   // omega values
    std::vector<double> weights;  // probabilities, sum 1
};

struct Periodic {
    std::vector<double> values;  // omega at site x is values[x mod period]
};

struct Markov {
    // Hidden state chain over sites; omega at a site is a function of the
    // chain state there. Generated left-to-right from site 0 (reversed
    // kernel for negative sites) starting from the stationary distribution.
    std::vector<std::vector<double>> transition;  // row-stochastic, irreducible
    std::vector<double> omega;                    // omega value per state
};

struct LatticeProduct {
    // i.i.d. law of the 2d-vector omega(0, .). Direction order of each atom
    // is (+e1, -e1, +e2, -e2, ...).
    int dim = 2;
    std::vector<std::vector<double>> atoms;  // simplex vectors of length 2*dim
    std::vector<double> weights;             // probabilities, sum 1
};

using Law = std::variant<Constant, FiniteSupport, Periodic, Markov, LatticeProduct>;

struct EnvironmentSpec {
    Law law;
    // Declared uniform lower bound on all transition entries. Factories set
    // it to the largest valid value; validate() enforces it.
    double ellipticity_bound = 0.0;

    int dimension() const;
    bool is_one_dimensional() const { return dimension() == 1; }
    bool is_product() const;  // constant or finite_support (i.i.d. sites)
    std::string id() const;   // short label for CSV rows
    void validate() const;    // throws std::invalid_argument on any violation

    // Mirror law: the walk X' = -X lives in omega'_x = 1 - omega_{-x}.
    EnvironmentSpec mirrored() const;
};

EnvironmentSpec make_constant(double p);
EnvironmentSpec make_finite_support(std::vector<double> values, std::vector<double> weights);
// Convenience for the ubiquitous half/half two-point laws.
EnvironmentSpec make_two_point(double a, double b);
EnvironmentSpec make_periodic(std::vector<double> values);
EnvironmentSpec make_markov(std::vector<std::vector<double>> transition, std::vector<double> omega);
EnvironmentSpec make_lattice_product(int dim, std::vector<std::vector<double>> atoms,
                                     std::vector<double> weights);

// ---------------------------------------------------------------------------
// Realized environment

class Environment {
  public:
    Environment(EnvironmentSpec spec, uint64_t seed);

    const EnvironmentSpec& spec() const { return spec_; }
    uint64_t seed() const { return seed_; }
    int dimension() const { return spec_.dimension(); }
    bool mirrored() const { return mirrored_; }

    // Right-step probability at a 1d site. Pure in (spec, seed, site).
    double omega1(int64_t site) const;

    // Block fill of omega1 over [lo, hi); the only efficient access path for
    // Markov laws (the chain is replayed from the origin once per call).
    void fill1(int64_t lo, int64_t hi, std::span<double> out) const;

    // Full simplex vector at a lattice site, direction order as in
    // LatticeProduct. For 1d laws returns {omega, 1 - omega}.
    std::vector<double> omega_vec(std::span<const int64_t> site) const;

    // Site-reflected view: omega'_x = 1 - omega_{-x}.
    Environment mirrored_view() const;

  private:
    EnvironmentSpec spec_;
    uint64_t seed_ = 0;
    bool mirrored_ = false;

    double omega1_raw(int64_t site) const;  // ignores the mirror flag
};

// Spec-level operation: transition probabilities at a site.
std::vector<double> omega_at(const Environment& e, std::span<const int64_t> site);

// ---------------------------------------------------------------------------
// Analytic functionals of 1d laws (site-stationary expectations)

// E_P rho_0^lambda. Rejects lattice_product laws.
double moments(const EnvironmentSpec& spec, double lambda);
// E_P log rho_0.
double log_rho_mean(const EnvironmentSpec& spec);
// Support of (log rho, probability) pairs under the site-stationary law.
// (Periodic laws use the uniform phase distribution, Markov the stationary
// distribution of the hidden chain.)
std::vector<std::pair<double, double>> log_rho_support(const EnvironmentSpec& spec);

// Zero drift lies in the convex hull of the support of the local drift law.
bool is_nestling(const EnvironmentSpec& spec);

// Largest valid ellipticity constant (min transition entry over the
// support); throws if the law is not elliptic.
double ellipticity_check(const EnvironmentSpec& spec);

// Stationary distribution of an irreducible row-stochastic matrix.
std::vector<double> stationary_distribution(const std::vector<std::vector<double>>& transition);

// ---------------------------------------------------------------------------
// Per-walker site cache for tight 1d loops.
//
// Environments are immutable and shared; each walker owns one of these and
// memoizes the uint64 right-step thresholds of the sites it visits. rebind()
// switches to a fresh environment in O(1) via an epoch counter, so annealed
// sampling loops reuse the same buffers across millions of environments.
class SiteCache1D {
  public:
    SiteCache1D() = default;

    void rebind(const Environment& e) {
        env_ = &e;
        ++epoch_;
        if (epoch_ == 0) {  // wrapped: invalidate everything
            std::fill(mark_.begin(), mark_.end(), 0u);
            epoch_ = 1;
        }
        block_ready_ = false;
    }

    std::uint64_t threshold(int64_t site) {
        const int64_t idx = site - lo_;
        if (idx < 0 || idx >= static_cast<int64_t>(thr_.size())) grow(site);
        const std::size_t u = static_cast<std::size_t>(site - lo_);
        if (mark_[u] != epoch_) fill(site, u);
        return thr_[u];
    }

    double omega(int64_t site) {
        return static_cast<double>(threshold(site)) * 0x1.0p-64;
    }

  private:
    void grow(int64_t site);
    void fill(int64_t site, std::size_t u);

    const Environment* env_ = nullptr;
    std::vector<std::uint64_t> thr_;
    std::vector<std::uint32_t> mark_;
    int64_t lo_ = 0;
    std::uint32_t epoch_ = 0;
    bool block_ready_ = false;  // Markov laws fill whole blocks at once
};

}  // namespace rwre::env
