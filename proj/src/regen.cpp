#include "rwre/regen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include "rwre/rng.hpp"

namespace rwre::regen {

namespace {

double lag1_autocorrelation(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n < 3) return 0.0;
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0, cov = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = x[i] - mean;
        var += d * d;
        if (i + 1 < n) cov += d * (x[i + 1] - mean);
    }
    if (var <= 0.0) return 0.0;
    return cov / var;
}

// permutation p-value of |lag-1 autocorrelation|
double permutation_p(std::span<const double> x, uint64_t seed, int iters = 2000) {
    const double observed = std::abs(lag1_autocorrelation(x));
    std::vector<double> perm(x.begin(), x.end());
    rng::Xoshiro256ss gen(seed);
    int hits = 0;
    for (int b = 0; b < iters; ++b) {
        for (std::size_t i = perm.size(); i > 1; --i)
            std::swap(perm[i - 1], perm[gen.uniform_below(i)]);
        if (std::abs(lag1_autocorrelation(perm)) >= observed) ++hits;
    }
    return (1.0 + hits) / (1.0 + iters);
}

}  // namespace

int64_t Slab::displacement_along(std::span<const int64_t> ell) const {
    if (ell.size() != displacement.size())
        throw std::invalid_argument("slab displacement: direction dimension mismatch");
    int64_t acc = 0;
    for (std::size_t k = 0; k < ell.size(); ++k) acc += displacement[k] * ell[k];
    return acc;
}

std::vector<int64_t> fresh_times(std::span<const int64_t> z) {
    std::vector<int64_t> out;
    int64_t running_max = std::numeric_limits<int64_t>::min();
    for (std::size_t t = 0; t < z.size(); ++t) {
        if (t == 0 || z[t] > running_max) out.push_back(static_cast<int64_t>(t));
        running_max = std::max(running_max, z[t]);
    }
    return out;
}

RegenerationDecomposition regeneration_times(const walk::Trajectory& t,
                                             std::span<const int64_t> ell, int64_t horizon) {
    if (horizon < 1 || horizon > t.steps())
        throw std::invalid_argument("regeneration_times: horizon exceeds the trajectory");
    const auto z = t.project(ell);

    // suffix minima of z over [0, horizon]
    std::vector<int64_t> sufmin(static_cast<std::size_t>(horizon + 2));
    sufmin[static_cast<std::size_t>(horizon + 1)] = std::numeric_limits<int64_t>::max();
    for (int64_t n = horizon; n >= 0; --n)
        sufmin[static_cast<std::size_t>(n)] =
            std::min(z[static_cast<std::size_t>(n)], sufmin[static_cast<std::size_t>(n + 1)]);

    RegenerationDecomposition d;
    d.ell.assign(ell.begin(), ell.end());
    d.horizon = horizon;
    int64_t running_max = std::numeric_limits<int64_t>::min();
    for (int64_t n = 0; n < horizon; ++n) {
        const bool fresh = (n == 0) || z[static_cast<std::size_t>(n)] > running_max;
        running_max = std::max(running_max, z[static_cast<std::size_t>(n)]);
        if (fresh && sufmin[static_cast<std::size_t>(n + 1)] >= z[static_cast<std::size_t>(n)])
            d.times.push_back(n);
    }
    d.last_censored = !d.times.empty();

    const int dim = t.dim;
    for (std::size_t i = 0; i + 1 < d.times.size(); ++i) {
        const int64_t a = d.times[i], b = d.times[i + 1];
        Slab s;
        s.start_time = a;
        s.duration = b - a;
        s.displacement.resize(static_cast<std::size_t>(dim));
        for (int k = 0; k < dim; ++k) s.displacement[static_cast<std::size_t>(k)] = t.coord(b, k) - t.coord(a, k);
        s.env_level_lo = z[static_cast<std::size_t>(a)];
        s.env_level_hi = z[static_cast<std::size_t>(b - 1)];
        d.slabs.push_back(std::move(s));
    }

    const int64_t first = d.times.empty() ? horizon : d.times.front();
    double sup_abs = 0.0;
    for (int64_t n = 0; n < first; ++n) {
        double norm2 = 0.0;
        for (int k = 0; k < dim; ++k) {
            const auto c = static_cast<double>(t.coord(n, k));
            norm2 += c * c;
        }
        sup_abs = std::max(sup_abs, std::sqrt(norm2));
    }
    d.sup_abs_before_first = sup_abs;
    return d;
}

std::vector<int64_t> modified_regeneration_times(const walk::Trajectory& t, int64_t L,
                                                 std::span<const walk::CoinCode> u,
                                                 std::span<const int64_t> ell, int64_t horizon) {
    if (t.coins.empty())
        throw std::invalid_argument("modified regenerations require a coin record (coupled walk)");
    if (L < 1 || static_cast<int64_t>(u.size()) != L)
        throw std::invalid_argument("modified regenerations: pattern length mismatch");
    if (horizon < 1 || horizon > t.steps())
        throw std::invalid_argument("modified regenerations: horizon exceeds the trajectory");
    // the pattern must make ell-progress: sum u_i . ell >= L/2
    int64_t progress = 0;
    for (const walk::CoinCode c : u) {
        if (c == 0) throw std::invalid_argument("modified regenerations: lazy coin in the pattern");
        const int axis = std::abs(static_cast<int>(c)) - 1;
        if (axis >= t.dim) throw std::invalid_argument("modified regenerations: coin axis out of range");
        progress += (c > 0 ? 1 : -1) * ell[static_cast<std::size_t>(axis)];
    }
    if (2 * progress < L)
        throw std::invalid_argument("modified regenerations: pattern does not satisfy "
                                    "sum u_i . ell >= L/2");

    const auto z = t.project(ell);
    std::vector<int64_t> sufmin(static_cast<std::size_t>(horizon + 2));
    sufmin[static_cast<std::size_t>(horizon + 1)] = std::numeric_limits<int64_t>::max();
    for (int64_t n = horizon; n >= 0; --n)
        sufmin[static_cast<std::size_t>(n)] =
            std::min(z[static_cast<std::size_t>(n)], sufmin[static_cast<std::size_t>(n + 1)]);

    std::vector<int64_t> out;
    int64_t running_max = std::numeric_limits<int64_t>::min();
    for (int64_t n = 0; n < horizon; ++n) {
        const bool fresh = (n == 0) || z[static_cast<std::size_t>(n)] > running_max;
        running_max = std::max(running_max, z[static_cast<std::size_t>(n)]);
        if (!fresh || n + L > t.steps()) continue;
        // coins[j] is the coin of step j -> j+1, i.e. epsilon_{j+1}
        bool match = true;
        for (int64_t i = 0; i < L; ++i) {
            if (t.coins[static_cast<std::size_t>(n + i)] != u[static_cast<std::size_t>(i)]) {
                match = false;
                break;
            }
        }
        if (match && sufmin[static_cast<std::size_t>(n + 1)] >= z[static_cast<std::size_t>(n)])
            out.push_back(n);
    }
    return out;
}

IidReport slabs_iid_check(const RegenerationDecomposition& d, uint64_t seed, double level) {
    const auto slabs = d.stationary_slabs();
    IidReport r;
    r.level = level;
    r.n_slabs = static_cast<int>(slabs.size());
    if (slabs.size() < 30)
        throw std::invalid_argument("slabs_iid_check needs at least 30 stationary slabs");
    std::vector<double> durations, displacements;
    durations.reserve(slabs.size());
    displacements.reserve(slabs.size());
    for (const Slab& s : slabs) {
        durations.push_back(static_cast<double>(s.duration));
        displacements.push_back(static_cast<double>(s.displacement_along(d.ell)));
    }
    r.acf_duration = lag1_autocorrelation(durations);
    r.acf_displacement = lag1_autocorrelation(displacements);
    r.p_duration = permutation_p(durations, rng::hash2(seed, 1));
    r.p_displacement = permutation_p(displacements, rng::hash2(seed, 2));
    r.pass = r.p_duration >= level / 2.0 && r.p_displacement >= level / 2.0;
    return r;
}

stats::EstimateWithCI lln_via_regeneration(const RegenerationDecomposition& d, uint64_t boot_seed,
                                           int boot_iters) {
    const auto slabs = d.stationary_slabs();
    if (slabs.size() < 30)
        throw std::invalid_argument("lln_via_regeneration needs at least 30 stationary slabs");
    std::vector<double> dur, disp;
    dur.reserve(slabs.size());
    disp.reserve(slabs.size());
    for (const Slab& s : slabs) {
        dur.push_back(static_cast<double>(s.duration));
        disp.push_back(static_cast<double>(s.displacement_along(d.ell)));
    }
    double sum_dur = 0.0, sum_disp = 0.0;
    for (std::size_t i = 0; i < dur.size(); ++i) {
        sum_dur += dur[i];
        sum_disp += disp[i];
    }
    stats::EstimateWithCI est;
    est.point = sum_disp / sum_dur;
    est.n_samples = static_cast<int>(dur.size());
    est.method = "regeneration slab bootstrap";

    rng::Xoshiro256ss gen(boot_seed);
    std::vector<double> boot;
    boot.reserve(static_cast<std::size_t>(boot_iters));
    for (int b = 0; b < boot_iters; ++b) {
        double bd = 0.0, bx = 0.0;
        for (std::size_t i = 0; i < dur.size(); ++i) {
            const auto j = static_cast<std::size_t>(gen.uniform_below(dur.size()));
            bd += dur[j];
            bx += disp[j];
        }
        boot.push_back(bx / bd);
    }
    std::sort(boot.begin(), boot.end());
    const auto lo = static_cast<std::size_t>(0.025 * (boot.size() - 1));
    const auto hi = static_cast<std::size_t>(0.975 * (boot.size() - 1));
    est.ci_low = boot[lo];
    est.ci_high = boot[hi];
    return est;
}

// ---------------------------------------------------------------------------
// Cut times

namespace {

struct PointHash {
    std::size_t operator()(const std::array<int64_t, 5>& p) const {
        return static_cast<std::size_t>(rng::hash_coords(0x5eedc0de, p));
    }
};

}  // namespace

CutDecomposition cut_times(std::span<const std::array<int64_t, 5>> r_path, int64_t horizon,
                           int64_t margin) {
    if (horizon < 1 || horizon > static_cast<int64_t>(r_path.size()) - 1)
        throw std::invalid_argument("cut_times: horizon exceeds the path");
    if (margin < 1 || 2 * margin >= horizon)
        throw std::invalid_argument("cut_times: margin must satisfy 2M < H");

    // Collision pairs (t1 < t2, same vertex, t2 - t1 <= 2M - 1) block the
    // candidate range [max(t1+1, t2-M+1), min(t2, t1+M)].
    std::vector<int32_t> blocked(static_cast<std::size_t>(horizon + 2), 0);
    std::unordered_map<std::array<int64_t, 5>, std::vector<int64_t>, PointHash> visits;
    visits.reserve(static_cast<std::size_t>(horizon + 1));
    for (int64_t n = 0; n <= horizon; ++n) visits[r_path[static_cast<std::size_t>(n)]].push_back(n);

    for (const auto& [vertex, ts] : visits) {
        if (ts.size() < 2) continue;
        for (std::size_t i = 0; i < ts.size(); ++i) {
            for (std::size_t j = i + 1; j < ts.size(); ++j) {
                const int64_t t1 = ts[i], t2 = ts[j];
                if (t2 - t1 > 2 * margin - 1) break;  // visit times are sorted
                const int64_t lo = std::max(t1 + 1, t2 - margin + 1);
                const int64_t hi = std::min(t2, t1 + margin);
                if (lo <= hi) {
                    ++blocked[static_cast<std::size_t>(lo)];
                    --blocked[static_cast<std::size_t>(hi + 1)];
                }
            }
        }
    }

    CutDecomposition out;
    out.margin = margin;
    out.horizon = horizon;
    int32_t level = 0;
    for (int64_t t = 0; t <= horizon; ++t) {
        level += blocked[static_cast<std::size_t>(t)];
        if (t >= margin && t <= horizon - margin && level == 0) out.cuts.push_back(t);
    }
    return out;
}

bool verify_cut(std::span<const std::array<int64_t, 5>> r_path, int64_t t, int64_t horizon,
                int64_t margin) {
    std::unordered_map<std::array<int64_t, 5>, char, PointHash> past;
    for (int64_t n = std::max<int64_t>(0, t - margin); n < t; ++n)
        past.emplace(r_path[static_cast<std::size_t>(n)], 1);
    for (int64_t n = t; n < std::min(horizon + 1, t + margin); ++n)
        if (past.count(r_path[static_cast<std::size_t>(n)])) return false;
    return true;
}

CutVelocityReport lln_via_cutpoints(const walk::Trajectory& t, const CutDecomposition& cuts,
                                    uint64_t seed) {
    if (!t.rui) throw std::invalid_argument("lln_via_cutpoints needs the (R, I, U) record");
    const auto& rec = *t.rui;
    // walk time at which the component walk has taken c steps
    std::vector<int64_t> first_time(rec.r.size(), -1);
    for (std::size_t n = 0; n < rec.u.size(); ++n) {
        const std::uint32_t c = rec.u[n];
        if (first_time[c] < 0) first_time[c] = static_cast<int64_t>(n);
    }

    std::vector<double> increments, dts;
    for (std::size_t i = 0; i + 1 < cuts.cuts.size(); ++i) {
        const int64_t ta = first_time[static_cast<std::size_t>(cuts.cuts[i])];
        const int64_t tb = first_time[static_cast<std::size_t>(cuts.cuts[i + 1])];
        if (ta < 0 || tb < 0) continue;
        increments.push_back(static_cast<double>(t.coord(tb, 5) - t.coord(ta, 5)));
        dts.push_back(static_cast<double>(tb - ta));
    }
    CutVelocityReport r;
    r.n_increments = static_cast<int>(increments.size());
    if (increments.size() < 30)
        throw std::invalid_argument("lln_via_cutpoints needs at least 30 cut increments");

    double si = 0.0, st = 0.0;
    for (std::size_t i = 0; i < increments.size(); ++i) {
        si += increments[i];
        st += dts[i];
    }
    r.velocity.point = si / st;
    r.velocity.n_samples = r.n_increments;
    r.velocity.method = "cut-increment ratio bootstrap";
    rng::Xoshiro256ss gen(rng::hash2(seed, 1));
    std::vector<double> boot;
    const int iters = 1000;
    boot.reserve(iters);
    for (int b = 0; b < iters; ++b) {
        double bi = 0.0, bt = 0.0;
        for (std::size_t i = 0; i < increments.size(); ++i) {
            const auto j = static_cast<std::size_t>(gen.uniform_below(increments.size()));
            bi += increments[j];
            bt += dts[j];
        }
        boot.push_back(bi / bt);
    }
    std::sort(boot.begin(), boot.end());
    r.velocity.ci_low = boot[static_cast<std::size_t>(0.025 * (boot.size() - 1))];
    r.velocity.ci_high = boot[static_cast<std::size_t>(0.975 * (boot.size() - 1))];

    r.acf = lag1_autocorrelation(increments);
    r.p_acf = permutation_p(increments, rng::hash2(seed, 2));
    r.acf_pass = r.p_acf >= r.level;
    return r;
}

}  // namespace rwre::regen
