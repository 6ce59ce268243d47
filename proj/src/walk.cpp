#include "rwre/walk.hpp"

#include <cmath>
#include <stdexcept>

#include "rwre/parallel.hpp"

namespace rwre::walk {

namespace {

// hash lanes for seed splitting: walker k of a master-seeded experiment
constexpr int64_t kEnvLane = 0;
constexpr int64_t kWalkLane = 1;

struct Walker1D {
    env::SiteCache1D cache;
    rng::Xoshiro256ss gen;
    int64_t pos = 0;

    void bind(const env::Environment& e, uint64_t walk_seed, int64_t start) {
        cache.rebind(e);
        gen.reseed(walk_seed);
        pos = start;
    }
    void step() {
        const std::uint64_t thr = cache.threshold(pos);
        pos += (gen.next_u64() < thr) ? 1 : -1;
    }
};

std::size_t pick_cdf(std::span<const double> weights, double u) {
    double cum = 0.0;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
        cum += weights[i];
        if (u < cum) return i;
    }
    return weights.size() - 1;
}

}  // namespace

std::vector<int64_t> Trajectory::project(std::span<const int64_t> ell) const {
    if (ell.size() != static_cast<std::size_t>(dim))
        throw std::invalid_argument("project: direction dimension mismatch");
    const int64_t n = steps();
    std::vector<int64_t> z(static_cast<std::size_t>(n + 1), 0);
    for (int64_t t = 0; t <= n; ++t) {
        int64_t acc = 0;
        for (int k = 0; k < dim; ++k) acc += coord(t, k) * ell[static_cast<std::size_t>(k)];
        z[static_cast<std::size_t>(t)] = acc;
    }
    return z;
}

void CouplingParams::validate(const env::EnvironmentSpec& spec) const {
    if (dim != spec.dimension())
        throw std::invalid_argument("coupling: dimension does not match the law");
    if (!(epsilon > 0.0)) throw std::invalid_argument("coupling: epsilon must be positive");
    if (!(1.0 - epsilon * dim > 0.0))
        throw std::invalid_argument("coupling: epsilon too large (1 - d*epsilon must stay positive)");
    const double min_entry = env::ellipticity_check(spec);
    if (epsilon / 2.0 > min_entry)
        throw std::invalid_argument(
            "coupling: epsilon/2 exceeds a transition entry of the law's support");
}

double coupled_step_probability(double omega_e, double epsilon, int dim) {
    const double lazy = 1.0 - epsilon * dim;
    return epsilon / 2.0 + lazy * ((omega_e - epsilon / 2.0) / lazy);
}

// ---------------------------------------------------------------------------
// Quenched / annealed samplers

Trajectory run_quenched(const env::Environment& e, int64_t start, int64_t n_steps,
                        uint64_t walk_seed) {
    if (n_steps < 0) throw std::invalid_argument("run_quenched: negative step count");
    const int dim = e.dimension();
    Trajectory t;
    t.dim = dim;
    t.env_seed = e.seed();
    t.walk_seed = walk_seed;
    t.coords.reserve(static_cast<std::size_t>((n_steps + 1) * dim));
    if (dim == 1) {
        Walker1D w;
        w.bind(e, walk_seed, start);
        t.coords.push_back(w.pos);
        for (int64_t i = 0; i < n_steps; ++i) {
            w.step();
            t.coords.push_back(w.pos);
        }
        return t;
    }
    rng::Xoshiro256ss gen(walk_seed);
    std::vector<int64_t> pos(static_cast<std::size_t>(dim), 0);
    pos[0] = start;
    t.coords.insert(t.coords.end(), pos.begin(), pos.end());
    for (int64_t i = 0; i < n_steps; ++i) {
        const auto simplex = e.omega_vec(pos);
        const std::size_t dir = pick_cdf(simplex, gen.uniform01());
        const int axis = static_cast<int>(dir / 2);
        pos[static_cast<std::size_t>(axis)] += (dir % 2 == 0) ? 1 : -1;
        t.coords.insert(t.coords.end(), pos.begin(), pos.end());
    }
    return t;
}

std::vector<Trajectory> run_annealed(const env::EnvironmentSpec& spec, int64_t n_steps,
                                     int n_walkers, uint64_t master_seed) {
    std::vector<Trajectory> out;
    out.reserve(static_cast<std::size_t>(n_walkers));
    for (int k = 0; k < n_walkers; ++k) {
        const env::Environment e(spec, rng::derive_seed(master_seed, k, kEnvLane));
        out.push_back(run_quenched(e, 0, n_steps, rng::derive_seed(master_seed, k, kWalkLane)));
    }
    return out;
}

std::vector<int64_t> annealed_endpoints(const env::EnvironmentSpec& spec, int64_t n_steps,
                                        int64_t n_walkers, uint64_t master_seed, int jobs) {
    std::vector<int64_t> out(static_cast<std::size_t>(n_walkers), 0);
    parallel_chunks(n_walkers, jobs, [&](int64_t begin, int64_t end) {
        Walker1D w;
        for (int64_t k = begin; k < end; ++k) {
            const env::Environment e(spec, rng::derive_seed(master_seed, k, kEnvLane));
            w.bind(e, rng::derive_seed(master_seed, k, kWalkLane), 0);
            for (int64_t i = 0; i < n_steps; ++i) w.step();
            out[static_cast<std::size_t>(k)] = w.pos;
        }
    });
    return out;
}

std::vector<int64_t> quenched_endpoints(const env::Environment& e, int64_t start, int64_t n_steps,
                                        int64_t n_walkers, uint64_t master_seed, int jobs) {
    std::vector<int64_t> out(static_cast<std::size_t>(n_walkers), 0);
    parallel_chunks(n_walkers, jobs, [&](int64_t begin, int64_t end) {
        Walker1D w;
        for (int64_t k = begin; k < end; ++k) {
            w.bind(e, rng::derive_seed(master_seed, k, kWalkLane), start);
            for (int64_t i = 0; i < n_steps; ++i) w.step();
            out[static_cast<std::size_t>(k)] = w.pos;
        }
    });
    return out;
}

TwoTimePositions annealed_two_time(const env::EnvironmentSpec& spec, int64_t t_early,
                                   int64_t t_late, int64_t n_walkers, uint64_t master_seed,
                                   int jobs) {
    if (t_early > t_late) throw std::invalid_argument("annealed_two_time: t_early > t_late");
    TwoTimePositions out;
    out.x_early.assign(static_cast<std::size_t>(n_walkers), 0);
    out.x_late.assign(static_cast<std::size_t>(n_walkers), 0);
    parallel_chunks(n_walkers, jobs, [&](int64_t begin, int64_t end) {
        Walker1D w;
        for (int64_t k = begin; k < end; ++k) {
            const env::Environment e(spec, rng::derive_seed(master_seed, k, kEnvLane));
            w.bind(e, rng::derive_seed(master_seed, k, kWalkLane), 0);
            for (int64_t i = 0; i < t_early; ++i) w.step();
            out.x_early[static_cast<std::size_t>(k)] = w.pos;
            for (int64_t i = t_early; i < t_late; ++i) w.step();
            out.x_late[static_cast<std::size_t>(k)] = w.pos;
        }
    });
    return out;
}

std::vector<FirstPassage> annealed_first_passage(const env::EnvironmentSpec& spec, int64_t level,
                                                 int64_t max_steps, int64_t n_walkers,
                                                 uint64_t master_seed, int jobs) {
    if (level < 1) throw std::invalid_argument("annealed_first_passage: level must be >= 1");
    std::vector<FirstPassage> out(static_cast<std::size_t>(n_walkers));
    parallel_chunks(n_walkers, jobs, [&](int64_t begin, int64_t end) {
        Walker1D w;
        for (int64_t k = begin; k < end; ++k) {
            const env::Environment e(spec, rng::derive_seed(master_seed, k, kEnvLane));
            w.bind(e, rng::derive_seed(master_seed, k, kWalkLane), 0);
            FirstPassage fp;
            for (int64_t i = 1; i <= max_steps; ++i) {
                w.step();
                if (w.pos >= level) {
                    fp = {i, true};
                    break;
                }
            }
            if (!fp.reached) fp.time = max_steps;
            out[static_cast<std::size_t>(k)] = fp;
        }
    });
    return out;
}

// ---------------------------------------------------------------------------
// Coupled walker

Trajectory run_coupled(const env::Environment& e, const CouplingParams& params, int64_t n_steps,
                       uint64_t walk_seed) {
    params.validate(e.spec());
    const int dim = e.dimension();
    const double eps = params.epsilon;
    const double lazy_mass = 1.0 - eps * dim;

    Trajectory t;
    t.dim = dim;
    t.env_seed = e.seed();
    t.walk_seed = walk_seed;
    t.coords.reserve(static_cast<std::size_t>((n_steps + 1) * dim));
    t.coins.reserve(static_cast<std::size_t>(n_steps));

    rng::Xoshiro256ss gen(walk_seed);
    std::vector<int64_t> pos(static_cast<std::size_t>(dim), 0);
    t.coords.insert(t.coords.end(), pos.begin(), pos.end());
    std::vector<double> lazy_probs(static_cast<std::size_t>(2 * dim));
    for (int64_t i = 0; i < n_steps; ++i) {
        const double u = gen.uniform01();
        std::size_t dir;
        if (u < eps * dim) {
            const auto idx = static_cast<std::size_t>(u / (eps / 2.0));
            dir = std::min(idx, static_cast<std::size_t>(2 * dim - 1));
            const int axis = static_cast<int>(dir / 2);
            const int sign = (dir % 2 == 0) ? 1 : -1;
            t.coins.push_back(static_cast<CoinCode>(sign * (axis + 1)));
        } else {
            t.coins.push_back(0);
            const auto simplex = e.omega_vec(pos);
            for (std::size_t k = 0; k < simplex.size(); ++k)
                lazy_probs[k] = (simplex[k] - eps / 2.0) / lazy_mass;
            dir = pick_cdf(lazy_probs, gen.uniform01());
        }
        const int axis = static_cast<int>(dir / 2);
        pos[static_cast<std::size_t>(axis)] += (dir % 2 == 0) ? 1 : -1;
        t.coords.insert(t.coords.end(), pos.begin(), pos.end());
    }
    return t;
}

// ---------------------------------------------------------------------------
// Product-structure walker

void ResidualLaw::validate() const {
    if (values.empty() || values.size() != weights.size())
        throw std::invalid_argument("residual law: values/weights mismatch");
    double sum = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw std::invalid_argument("residual law: negative weight");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("residual law: weights do not sum to 1");
    for (double v : values)
        if (v < 0.0 || v > 1.0)
            throw std::invalid_argument("residual law: values must lie in [0, 1]");
}

double Theorem2Config::S() const {
    double s = 0.0;
    for (double qi : q) s += qi;
    return s;
}

void Theorem2Config::validate() const {
    for (double qi : q)
        if (!(qi > 0.0))
            throw std::invalid_argument("theorem2: all ten first-five entries must be positive");
    if (!(S() < 1.0)) throw std::invalid_argument("theorem2: S = sum(q) must be < 1");
    residual.validate();
}

Theorem2Config Theorem2Config::equal_eta(double eta, ResidualLaw residual) {
    Theorem2Config cfg;
    cfg.q.fill(eta);
    cfg.residual = std::move(residual);
    cfg.validate();
    return cfg;
}

Trajectory run_theorem2(const Theorem2Config& cfg, int64_t n_steps, uint64_t env_seed,
                        uint64_t walk_seed) {
    cfg.validate();
    const double S = cfg.S();
    constexpr int dim = 6;

    Trajectory t;
    t.dim = dim;
    t.env_seed = env_seed;
    t.walk_seed = walk_seed;
    t.coords.reserve(static_cast<std::size_t>((n_steps + 1) * dim));
    RuiRecord rec;
    rec.bits.reserve(static_cast<std::size_t>(n_steps));
    rec.u.reserve(static_cast<std::size_t>(n_steps + 1));
    rec.r.push_back({0, 0, 0, 0, 0});
    rec.u.push_back(0);

    rng::Xoshiro256ss gen(walk_seed);
    std::array<int64_t, dim> pos{};
    t.coords.insert(t.coords.end(), pos.begin(), pos.end());

    for (int64_t i = 0; i < n_steps; ++i) {
        const double u = gen.uniform01();
        if (u < S) {
            // first-five step with law q / S
            const double v = u;  // u is uniform on [0, S): reuse as the direction pick
            double cum = 0.0;
            std::size_t dir = 9;
            for (std::size_t k = 0; k < 10; ++k) {
                cum += cfg.q[k];
                if (v < cum) {
                    dir = k;
                    break;
                }
            }
            const int axis = static_cast<int>(dir / 2);
            pos[static_cast<std::size_t>(axis)] += (dir % 2 == 0) ? 1 : -1;
            auto r = rec.r.back();
            r[static_cast<std::size_t>(axis)] = pos[static_cast<std::size_t>(axis)];
            rec.r.push_back(r);
            rec.bits.push_back(1);
        } else {
            // residual step: probability of +e_6 drawn from the residual law
            // at the current full site
            const double ue = rng::to_unit(rng::hash_coords(env_seed, pos));
            const double w6 = cfg.residual.values[pick_cdf(cfg.residual.weights, ue)];
            pos[5] += (gen.uniform01() < w6) ? 1 : -1;
            rec.bits.push_back(0);
        }
        rec.u.push_back(rec.u.back() + rec.bits.back());
        t.coords.insert(t.coords.end(), pos.begin(), pos.end());
    }
    t.rui = std::move(rec);
    return t;
}

// ---------------------------------------------------------------------------
// Hitting times

HittingTimes hitting_times(const Trajectory& t, std::span<const int64_t> ell) {
    const auto z = t.project(ell);
    HittingTimes out;
    int64_t level = 0;
    for (std::size_t n = 1; n < z.size(); ++n) {
        while (z[n] >= level + 1) {
            out.times.push_back(static_cast<int64_t>(n));
            ++level;
        }
    }
    out.max_level = level;
    out.taus.reserve(out.times.size());
    int64_t prev = 0;
    for (int64_t tk : out.times) {
        out.taus.push_back(tk - prev);
        prev = tk;
    }
    return out;
}

}  // namespace rwre::walk
