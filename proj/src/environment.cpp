#include "rwre/environment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace rwre::env {

namespace {

constexpr double kProbTol = 1e-12;

// hash lanes for the Markov site chain
constexpr std::int64_t kMarkovInitLane = 101;
constexpr std::int64_t kMarkovStepLane = 102;

double rho_of(double omega) { return (1.0 - omega) / omega; }

void check_weights(const std::vector<double>& w, const char* what) {
    if (w.empty()) throw std::invalid_argument(std::string(what) + ": empty distribution");
    double sum = 0.0;
    for (double x : w) {
        if (x < 0.0) throw std::invalid_argument(std::string(what) + ": negative probability");
        sum += x;
    }
    if (std::abs(sum - 1.0) > kProbTol)
        throw std::invalid_argument(std::string(what) + ": probabilities do not sum to 1");
}

void check_omega_value(double v, double bound) {
    if (!(v > 0.0) || !(v < 1.0))
        throw std::invalid_argument("non-elliptic omega value (must lie strictly in (0,1))");
    if (bound > 0.0 && (v < bound - kProbTol || v > 1.0 - bound + kProbTol))
        throw std::invalid_argument("omega value violates the declared ellipticity bound");
}

// first index i with u < cum_i, where cum is the running sum of weights
std::size_t pick_index(const std::vector<double>& weights, double u) {
    double cum = 0.0;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
        cum += weights[i];
        if (u < cum) return i;
    }
    return weights.size() - 1;
}

bool strongly_connected(const std::vector<std::vector<double>>& m) {
    const std::size_t k = m.size();
    auto reach = [&](bool forward) {
        std::vector<char> seen(k, 0);
        std::vector<std::size_t> stack{0};
        seen[0] = 1;
        while (!stack.empty()) {
            std::size_t i = stack.back();
            stack.pop_back();
            for (std::size_t j = 0; j < k; ++j) {
                const double w = forward ? m[i][j] : m[j][i];
                if (w > 0.0 && !seen[j]) {
                    seen[j] = 1;
                    stack.push_back(j);
                }
            }
        }
        return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
    };
    return reach(true) && reach(false);
}

// Small dense solve with partial pivoting; enough for the hidden chains here.
std::vector<double> solve_linear(std::vector<std::vector<double>> a, std::vector<double> b) {
    const std::size_t n = a.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        std::swap(a[col], a[piv]);
        std::swap(b[col], b[piv]);
        if (std::abs(a[col][col]) < 1e-14)
            throw std::invalid_argument("singular system (is the chain irreducible?)");
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            if (f == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n, 0.0);
    for (std::size_t r = n; r-- > 0;) {
        double acc = b[r];
        for (std::size_t c = r + 1; c < n; ++c) acc -= a[r][c] * x[c];
        x[r] = acc / a[r][r];
    }
    return x;
}

struct MarkovTables {
    std::vector<double> pi;
    std::vector<std::vector<double>> forward;   // transition rows
    std::vector<std::vector<double>> backward;  // time-reversed rows
};

MarkovTables markov_tables(const Markov& m) {
    MarkovTables t;
    t.pi = stationary_distribution(m.transition);
    t.forward = m.transition;
    const std::size_t k = t.pi.size();
    t.backward.assign(k, std::vector<double>(k, 0.0));
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
            t.backward[i][j] = t.pi[j] * m.transition[j][i] / t.pi[i];
    return t;
}

// Hidden chain state at `site`, replayed from the origin. Pure in (seed, site).
std::size_t markov_state_at(const Markov& m, const MarkovTables& t, uint64_t seed, int64_t site) {
    std::size_t state = pick_index(t.pi, rng::to_unit(rng::hash3(seed, 0, kMarkovInitLane)));
    if (site > 0) {
        for (int64_t x = 1; x <= site; ++x)
            state = pick_index(t.forward[state], rng::to_unit(rng::hash3(seed, x, kMarkovStepLane)));
    } else if (site < 0) {
        for (int64_t x = -1; x >= site; --x)
            state = pick_index(t.backward[state], rng::to_unit(rng::hash3(seed, x, kMarkovStepLane)));
    }
    return state;
}

}  // namespace

// ---------------------------------------------------------------------------
// EnvironmentSpec

int EnvironmentSpec::dimension() const {
    if (const auto* lp = std::get_if<LatticeProduct>(&law)) return lp->dim;
    return 1;
}

bool EnvironmentSpec::is_product() const {
    return std::holds_alternative<Constant>(law) || std::holds_alternative<FiniteSupport>(law);
}

std::string EnvironmentSpec::id() const {
    char buf[64];
    return std::visit(
        [&](const auto& l) -> std::string {
            using T = std::decay_t<decltype(l)>;
            std::string out;
            if constexpr (std::is_same_v<T, Constant>) {
                std::snprintf(buf, sizeof buf, "constant(%g)", l.p);
                out = buf;
            } else if constexpr (std::is_same_v<T, FiniteSupport>) {
                out = "iid{";
                for (std::size_t i = 0; i < l.values.size(); ++i) {
                    std::snprintf(buf, sizeof buf, "%s%g:%g", i ? "," : "", l.values[i], l.weights[i]);
                    out += buf;
                }
                out += "}";
            } else if constexpr (std::is_same_v<T, Periodic>) {
                out = "periodic[";
                for (std::size_t i = 0; i < l.values.size(); ++i) {
                    std::snprintf(buf, sizeof buf, "%s%g", i ? "," : "", l.values[i]);
                    out += buf;
                }
                out += "]";
            } else if constexpr (std::is_same_v<T, Markov>) {
                std::snprintf(buf, sizeof buf, "markov(k=%zu)", l.omega.size());
                out = buf;
            } else {
                std::snprintf(buf, sizeof buf, "lattice(d=%d,m=%zu)", l.dim, l.atoms.size());
                out = buf;
            }
            return out;
        },
        law);
}

void EnvironmentSpec::validate() const {
    const double eps = ellipticity_bound;
    std::visit(
        [&](const auto& l) {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, Constant>) {
                check_omega_value(l.p, eps);
            } else if constexpr (std::is_same_v<T, FiniteSupport>) {
                if (l.values.size() != l.weights.size())
                    throw std::invalid_argument("finite_support: values/weights size mismatch");
                check_weights(l.weights, "finite_support");
                for (double v : l.values) check_omega_value(v, eps);
            } else if constexpr (std::is_same_v<T, Periodic>) {
                if (l.values.empty()) throw std::invalid_argument("periodic: empty period");
                for (double v : l.values) check_omega_value(v, eps);
            } else if constexpr (std::is_same_v<T, Markov>) {
                const std::size_t k = l.omega.size();
                if (k == 0 || l.transition.size() != k)
                    throw std::invalid_argument("markov: transition/omega size mismatch");
                for (const auto& row : l.transition) {
                    if (row.size() != k) throw std::invalid_argument("markov: non-square matrix");
                    check_weights(row, "markov row");
                }
                if (!strongly_connected(l.transition))
                    throw std::invalid_argument("markov: chain is not irreducible");
                for (double v : l.omega) check_omega_value(v, eps);
            } else {
                if (l.dim < 1) throw std::invalid_argument("lattice_product: dimension must be >= 1");
                if (l.atoms.size() != l.weights.size())
                    throw std::invalid_argument("lattice_product: atoms/weights size mismatch");
                check_weights(l.weights, "lattice_product");
                for (const auto& atom : l.atoms) {
                    if (atom.size() != static_cast<std::size_t>(2 * l.dim))
                        throw std::invalid_argument("lattice_product: atom is not a 2d-vector");
                    double sum = 0.0;
                    for (double v : atom) {
                        if (!(v > 0.0)) throw std::invalid_argument("lattice_product: non-elliptic entry");
                        if (eps > 0.0 && v < eps - kProbTol)
                            throw std::invalid_argument("lattice_product: entry below ellipticity bound");
                        sum += v;
                    }
                    if (std::abs(sum - 1.0) > kProbTol)
                        throw std::invalid_argument("lattice_product: atom does not lie on the simplex");
                }
            }
        },
        law);
    if (!(ellipticity_bound > 0.0))
        throw std::invalid_argument("ellipticity bound must be positive");
}

EnvironmentSpec EnvironmentSpec::mirrored() const {
    EnvironmentSpec out = *this;
    std::visit(
        [&](auto& l) {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, Constant>) {
                l.p = 1.0 - l.p;
            } else if constexpr (std::is_same_v<T, FiniteSupport>) {
                for (double& v : l.values) v = 1.0 - v;
            } else if constexpr (std::is_same_v<T, Periodic>) {
                // omega'_x = 1 - omega_{(-x) mod p}
                const std::size_t p = l.values.size();
                std::vector<double> v(p);
                for (std::size_t x = 0; x < p; ++x) v[x] = 1.0 - l.values[(p - x) % p];
                l.values = std::move(v);
            } else if constexpr (std::is_same_v<T, Markov>) {
                const auto t = markov_tables(l);
                l.transition = t.backward;
                for (double& v : l.omega) v = 1.0 - v;
            } else {
                for (auto& atom : l.atoms)
                    for (std::size_t k = 0; k + 1 < atom.size(); k += 2) std::swap(atom[k], atom[k + 1]);
            }
        },
        out.law);
    return out;
}

namespace {
EnvironmentSpec finish(EnvironmentSpec spec) {
    spec.ellipticity_bound = ellipticity_check(spec);
    spec.validate();
    return spec;
}
}  // namespace

EnvironmentSpec make_constant(double p) { return finish({Law{Constant{p}}, 0.0}); }

EnvironmentSpec make_finite_support(std::vector<double> values, std::vector<double> weights) {
    return finish({Law{FiniteSupport{std::move(values), std::move(weights)}}, 0.0});
}

EnvironmentSpec make_two_point(double a, double b) {
    return make_finite_support({a, b}, {0.5, 0.5});
}

EnvironmentSpec make_periodic(std::vector<double> values) {
    return finish({Law{Periodic{std::move(values)}}, 0.0});
}

EnvironmentSpec make_markov(std::vector<std::vector<double>> transition, std::vector<double> omega) {
    return finish({Law{Markov{std::move(transition), std::move(omega)}}, 0.0});
}

EnvironmentSpec make_lattice_product(int dim, std::vector<std::vector<double>> atoms,
                                     std::vector<double> weights) {
    return finish({Law{LatticeProduct{dim, std::move(atoms), std::move(weights)}}, 0.0});
}

// ---------------------------------------------------------------------------
// Environment

Environment::Environment(EnvironmentSpec spec, uint64_t seed) : spec_(std::move(spec)), seed_(seed) {
    spec_.validate();
}

Environment Environment::mirrored_view() const {
    Environment out = *this;
    out.mirrored_ = !out.mirrored_;
    return out;
}

double Environment::omega1_raw(int64_t site) const {
    if (dimension() != 1)
        throw std::invalid_argument("omega1 requires a one-dimensional environment");
    return std::visit(
        [&](const auto& l) -> double {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, Constant>) {
                return l.p;
            } else if constexpr (std::is_same_v<T, FiniteSupport>) {
                return l.values[pick_index(l.weights, rng::unit_at(seed_, site))];
            } else if constexpr (std::is_same_v<T, Periodic>) {
                const auto p = static_cast<int64_t>(l.values.size());
                return l.values[static_cast<std::size_t>(((site % p) + p) % p)];
            } else if constexpr (std::is_same_v<T, Markov>) {
                const auto t = markov_tables(l);
                return l.omega[markov_state_at(l, t, seed_, site)];
            } else {
                return 0.0;  // unreachable: dimension() != 1
            }
        },
        spec_.law);
}

double Environment::omega1(int64_t site) const {
    return mirrored_ ? 1.0 - omega1_raw(-site) : omega1_raw(site);
}

void Environment::fill1(int64_t lo, int64_t hi, std::span<double> out) const {
    if (hi < lo || out.size() < static_cast<std::size_t>(hi - lo))
        throw std::invalid_argument("fill1: bad range");
    if (mirrored_) {
        // raw values over (-hi, -lo], reversed and complemented
        std::vector<double> tmp(static_cast<std::size_t>(hi - lo));
        Environment raw = *this;
        raw.mirrored_ = false;
        raw.fill1(-hi + 1, -lo + 1, tmp);
        for (std::size_t i = 0; i < tmp.size(); ++i) out[i] = 1.0 - tmp[tmp.size() - 1 - i];
        return;
    }
    if (const auto* m = std::get_if<Markov>(&spec_.law)) {
        const auto t = markov_tables(*m);
        // replay the chain once; states at sites outside [lo, hi) are transient
        std::size_t state = pick_index(t.pi, rng::to_unit(rng::hash3(seed_, 0, kMarkovInitLane)));
        if (0 >= lo && 0 < hi) out[static_cast<std::size_t>(-lo)] = m->omega[state];
        std::size_t s = state;
        for (int64_t x = 1; x < hi; ++x) {
            s = pick_index(t.forward[s], rng::to_unit(rng::hash3(seed_, x, kMarkovStepLane)));
            if (x >= lo) out[static_cast<std::size_t>(x - lo)] = m->omega[s];
        }
        s = state;
        for (int64_t x = -1; x >= lo; --x) {
            s = pick_index(t.backward[s], rng::to_unit(rng::hash3(seed_, x, kMarkovStepLane)));
            if (x < hi) out[static_cast<std::size_t>(x - lo)] = m->omega[s];
        }
        return;
    }
    for (int64_t x = lo; x < hi; ++x) out[static_cast<std::size_t>(x - lo)] = omega1_raw(x);
}

std::vector<double> Environment::omega_vec(std::span<const int64_t> site) const {
    if (dimension() == 1) {
        if (site.size() != 1) throw std::invalid_argument("omega_vec: site dimension mismatch");
        const double w = omega1(site[0]);
        return {w, 1.0 - w};
    }
    const auto& lp = std::get<LatticeProduct>(spec_.law);
    if (site.size() != static_cast<std::size_t>(lp.dim))
        throw std::invalid_argument("omega_vec: site dimension mismatch");
    std::vector<int64_t> key(site.begin(), site.end());
    if (mirrored_)
        for (auto& c : key) c = -c;
    const double u = rng::to_unit(rng::hash_coords(seed_, key));
    std::vector<double> atom = lp.atoms[pick_index(lp.weights, u)];
    if (mirrored_)
        for (std::size_t k = 0; k + 1 < atom.size(); k += 2) std::swap(atom[k], atom[k + 1]);
    return atom;
}

std::vector<double> omega_at(const Environment& e, std::span<const int64_t> site) {
    return e.omega_vec(site);
}

// ---------------------------------------------------------------------------
// Analytic functionals

std::vector<std::pair<double, double>> log_rho_support(const EnvironmentSpec& spec) {
    std::vector<std::pair<double, double>> out;
    std::visit(
        [&](const auto& l) {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, Constant>) {
                out.emplace_back(std::log(rho_of(l.p)), 1.0);
            } else if constexpr (std::is_same_v<T, FiniteSupport>) {
                for (std::size_t i = 0; i < l.values.size(); ++i)
                    out.emplace_back(std::log(rho_of(l.values[i])), l.weights[i]);
            } else if constexpr (std::is_same_v<T, Periodic>) {
                const double w = 1.0 / static_cast<double>(l.values.size());
                for (double v : l.values) out.emplace_back(std::log(rho_of(v)), w);
            } else if constexpr (std::is_same_v<T, Markov>) {
                const auto pi = stationary_distribution(l.transition);
                for (std::size_t s = 0; s < l.omega.size(); ++s)
                    out.emplace_back(std::log(rho_of(l.omega[s])), pi[s]);
            } else {
                throw std::invalid_argument("log rho is a one-dimensional quantity");
            }
        },
        spec.law);
    return out;
}

double moments(const EnvironmentSpec& spec, double lambda) {
    double acc = 0.0;
    for (const auto& [lr, w] : log_rho_support(spec)) acc += w * std::exp(lambda * lr);
    return acc;
}

double log_rho_mean(const EnvironmentSpec& spec) {
    double acc = 0.0;
    for (const auto& [lr, w] : log_rho_support(spec)) acc += w * lr;
    return acc;
}

namespace {

// Minimum-norm point of a convex hull by Gilbert's algorithm; membership of
// the origin with certificate-based early exit.
bool hull_contains_origin(const std::vector<std::vector<double>>& pts) {
    const std::size_t d = pts.front().size();
    auto dot = [&](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (std::size_t k = 0; k < d; ++k) s += a[k] * b[k];
        return s;
    };
    double scale = 0.0;
    for (const auto& p : pts) scale = std::max(scale, std::sqrt(dot(p, p)));
    if (scale == 0.0) return true;  // all points are the origin

    std::vector<double> x = pts.front();
    for (const auto& p : pts)
        if (dot(p, p) < dot(x, x)) x = p;

    for (int it = 0; it < 20000; ++it) {
        if (dot(x, x) <= 1e-20 * scale * scale) return true;
        double best = dot(pts.front(), x);
        std::size_t bi = 0;
        for (std::size_t i = 1; i < pts.size(); ++i) {
            const double v = dot(pts[i], x);
            if (v < best) {
                best = v;
                bi = i;
            }
        }
        // x separates the origin from the hull
        if (best > 1e-12 * scale * scale) return false;
        // project the origin onto segment [x, s]
        const auto& s = pts[bi];
        std::vector<double> dxy(d);
        double num = 0.0, den = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            dxy[k] = s[k] - x[k];
            num -= x[k] * dxy[k];
            den += dxy[k] * dxy[k];
        }
        if (den <= 1e-30) break;  // s == x: no progress possible
        const double t = std::clamp(num / den, 0.0, 1.0);
        for (std::size_t k = 0; k < d; ++k) x[k] += t * dxy[k];
    }
    double n2 = dot(x, x);
    return n2 <= 1e-14 * scale * scale;
}

}  // namespace

bool is_nestling(const EnvironmentSpec& spec) {
    if (const auto* lp = std::get_if<LatticeProduct>(&spec.law)) {
        std::vector<std::vector<double>> drifts;
        drifts.reserve(lp->atoms.size());
        for (const auto& atom : lp->atoms) {
            std::vector<double> dr(static_cast<std::size_t>(lp->dim), 0.0);
            for (int k = 0; k < lp->dim; ++k)
                dr[static_cast<std::size_t>(k)] =
                    atom[static_cast<std::size_t>(2 * k)] - atom[static_cast<std::size_t>(2 * k + 1)];
            drifts.push_back(std::move(dr));
        }
        return hull_contains_origin(drifts);
    }
    // 1d: drift support is {2 omega - 1}
    double lo = 1.0, hi = -1.0;
    std::visit(
        [&](const auto& l) {
            using T = std::decay_t<decltype(l)>;
            auto add = [&](double v) {
                lo = std::min(lo, 2.0 * v - 1.0);
                hi = std::max(hi, 2.0 * v - 1.0);
            };
            if constexpr (std::is_same_v<T, Constant>) {
                add(l.p);
            } else if constexpr (std::is_same_v<T, FiniteSupport>) {
                for (double v : l.values) add(v);
            } else if constexpr (std::is_same_v<T, Periodic>) {
                for (double v : l.values) add(v);
            } else if constexpr (std::is_same_v<T, Markov>) {
                for (double v : l.omega) add(v);
            } else {
                // handled above
            }
        },
        spec.law);
    return lo <= 0.0 && 0.0 <= hi;
}

double ellipticity_check(const EnvironmentSpec& spec) {
    double eps = 1.0;
    auto add = [&](double v) { eps = std::min({eps, v, 1.0 - v}); };
    std::visit(
        [&](const auto& l) {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, Constant>) {
                add(l.p);
            } else if constexpr (std::is_same_v<T, FiniteSupport>) {
                for (double v : l.values) add(v);
            } else if constexpr (std::is_same_v<T, Periodic>) {
                for (double v : l.values) add(v);
            } else if constexpr (std::is_same_v<T, Markov>) {
                for (double v : l.omega) add(v);
            } else {
                for (const auto& atom : l.atoms)
                    for (double v : atom) eps = std::min(eps, v);
            }
        },
        spec.law);
    if (!(eps > 0.0)) throw std::invalid_argument("non-elliptic law: a transition entry is 0");
    return eps;
}

std::vector<double> stationary_distribution(const std::vector<std::vector<double>>& transition) {
    const std::size_t k = transition.size();
    if (k == 0) throw std::invalid_argument("empty transition matrix");
    // solve pi (M - I) = 0 with sum(pi) = 1
    std::vector<std::vector<double>> a(k, std::vector<double>(k, 0.0));
    std::vector<double> b(k, 0.0);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) a[i][j] = transition[j][i] - (i == j ? 1.0 : 0.0);
    for (std::size_t j = 0; j < k; ++j) a[k - 1][j] = 1.0;
    b[k - 1] = 1.0;
    auto pi = solve_linear(std::move(a), std::move(b));
    for (double& p : pi) {
        if (p < -1e-10) throw std::invalid_argument("stationary distribution has negative mass");
        p = std::max(p, 0.0);
    }
    return pi;
}

// ---------------------------------------------------------------------------
// SiteCache1D

void SiteCache1D::grow(int64_t site) {
    if (thr_.empty()) {
        lo_ = site - 256;
        thr_.assign(512, 0);
        mark_.assign(512, 0);
        return;
    }
    int64_t lo = lo_;
    int64_t hi = lo_ + static_cast<int64_t>(thr_.size());
    while (site < lo || site >= hi) {
        const int64_t len = hi - lo;
        lo -= len / 2;
        hi += len / 2;
    }
    std::vector<std::uint64_t> thr(static_cast<std::size_t>(hi - lo), 0);
    std::vector<std::uint32_t> mark(static_cast<std::size_t>(hi - lo), 0);
    const std::size_t off = static_cast<std::size_t>(lo_ - lo);
    std::copy(thr_.begin(), thr_.end(), thr.begin() + static_cast<std::ptrdiff_t>(off));
    std::copy(mark_.begin(), mark_.end(), mark.begin() + static_cast<std::ptrdiff_t>(off));
    thr_ = std::move(thr);
    mark_ = std::move(mark);
    lo_ = lo;
    block_ready_ = false;
}

void SiteCache1D::fill(int64_t site, std::size_t u) {
    const bool markov = std::holds_alternative<Markov>(env_->spec().law);
    if (markov) {
        // chain replay is O(range); fill the whole buffer once per epoch
        std::vector<double> w(thr_.size());
        env_->fill1(lo_, lo_ + static_cast<int64_t>(thr_.size()), w);
        for (std::size_t i = 0; i < w.size(); ++i) {
            thr_[i] = static_cast<std::uint64_t>(w[i] * 0x1.0p64);
            mark_[i] = epoch_;
        }
        block_ready_ = true;
        return;
    }
    (void)site;
    thr_[u] = static_cast<std::uint64_t>(env_->omega1(lo_ + static_cast<int64_t>(u)) * 0x1.0p64);
    mark_[u] = epoch_;
}

}  // namespace rwre::env
