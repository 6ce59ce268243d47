#include "rwre/exact1d.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace rwre::exact1d {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kZeroTol = 1e-12;

double log_sum_exp(std::span<const double> logs) {
    double m = -kInf;
    for (double v : logs) m = std::max(m, v);
    if (m == -kInf) return -kInf;
    double acc = 0.0;
    for (double v : logs) acc += std::exp(v - m);
    return m + std::log(acc);
}

// log E rho^lambda and its derivative d/dlambda, overflow-safe at any lambda.
struct CumulantEval {
    double log_m;
    double dlog_m;
};

CumulantEval cumulant(const std::vector<std::pair<double, double>>& support, double lambda) {
    double shift = -kInf;
    for (const auto& [lr, w] : support) shift = std::max(shift, lambda * lr);
    double num = 0.0, dnum = 0.0;
    for (const auto& [lr, w] : support) {
        const double e = w * std::exp(lambda * lr - shift);
        num += e;
        dnum += e * lr;
    }
    return {shift + std::log(num), dnum / num};
}

double golden_max(const std::function<double(double)>& f, double a, double b, double tol,
                  double* arg_out = nullptr) {
    constexpr double phi = 0.6180339887498949;
    double x1 = b - phi * (b - a);
    double x2 = a + phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = f(x1);
        }
    }
    const double xm = 0.5 * (a + b);
    const double fm = f(xm);
    if (arg_out) *arg_out = xm;
    return fm;
}

void require_product(const env::EnvironmentSpec& spec, const char* op) {
    if (!spec.is_product())
        throw std::invalid_argument(std::string(op) + " requires an i.i.d. (product) law");
}

}  // namespace

// ---------------------------------------------------------------------------
// Window / potential

Window::Window(int64_t m_minus_, int64_t m_plus_, int64_t z_)
    : m_minus(m_minus_), m_plus(m_plus_), z(z_) {
    if (m_minus < 1 || m_plus < 1)
        throw std::invalid_argument("window: boundaries must be positive");
    if (!(-m_minus < z && z < m_plus))
        throw std::invalid_argument("window: start site must lie strictly inside");
}

PotentialProfile PotentialProfile::from_log_rho(int64_t lo,
                                                std::span<const double> log_rho_from_lo_plus_1) {
    if (lo > 0) throw std::invalid_argument("potential range must contain 0");
    const int64_t hi = lo + static_cast<int64_t>(log_rho_from_lo_plus_1.size());
    if (hi < 0) throw std::invalid_argument("potential range must contain 0");
    PotentialProfile p;
    p.lo = lo;
    p.w.assign(log_rho_from_lo_plus_1.size() + 1, 0.0);
    // anchor W(0) = 0, then cumulate increments
    double acc = 0.0;
    for (int64_t x = lo + 1; x <= hi; ++x) {
        acc += log_rho_from_lo_plus_1[static_cast<std::size_t>(x - lo - 1)];
        p.w[static_cast<std::size_t>(x - lo)] = acc;
    }
    const double w0 = p.w[static_cast<std::size_t>(-lo)];
    for (double& v : p.w) v -= w0;
    return p;
}

PotentialProfile PotentialProfile::from_environment(const env::Environment& e, int64_t lo,
                                                    int64_t hi) {
    if (lo > 0 || hi < 0) throw std::invalid_argument("potential range must contain 0");
    std::vector<double> omega(static_cast<std::size_t>(hi - lo));
    e.fill1(lo + 1, hi + 1, omega);
    std::vector<double> log_rho(omega.size());
    for (std::size_t i = 0; i < omega.size(); ++i)
        log_rho[i] = std::log((1.0 - omega[i]) / omega[i]);
    return from_log_rho(lo, log_rho);
}

// ---------------------------------------------------------------------------
// Exit probability

double exit_probability_omegas(std::span<const double> omega, int64_t m_minus, int64_t m_plus,
                               int64_t z) {
    Window check(m_minus, m_plus, z);  // validates the geometry
    const int64_t lo = -m_minus + 1;
    if (omega.size() != static_cast<std::size_t>(m_plus - 1 - lo + 1))
        throw std::invalid_argument("exit_probability: omega span does not match the window");
    auto log_rho_at = [&](int64_t site) {
        const double w = omega[static_cast<std::size_t>(site - lo)];
        return std::log((1.0 - w) / w);
    };
    // hit -m_minus before m_plus:
    //   numerator    sum_{i=z+1..m_plus}  prod_{j=z+1..i-1} rho_j
    //   denominator  numerator + sum_{i=-m_minus+1..z} prod_{j=i..z} rho_j^{-1}
    std::vector<double> num_logs, den_logs;
    num_logs.reserve(static_cast<std::size_t>(m_plus - z));
    den_logs.reserve(static_cast<std::size_t>(z + m_minus));
    double acc = 0.0;
    for (int64_t i = z + 1; i <= m_plus; ++i) {
        num_logs.push_back(acc);  // empty product when i == z+1
        if (i < m_plus) acc += log_rho_at(i);
    }
    acc = 0.0;
    for (int64_t i = z; i >= -m_minus + 1; --i) {
        acc -= log_rho_at(i);
        den_logs.push_back(acc);
    }
    const double ln = log_sum_exp(num_logs);
    const double ld = log_sum_exp(den_logs);
    // V = N / (N + D) = 1 / (1 + exp(ld - ln))
    return 1.0 / (1.0 + std::exp(ld - ln));
}

double exit_probability(const env::Environment& e, const Window& w) {
    const int64_t lo = -w.m_minus + 1, hi = w.m_plus - 1;
    std::vector<double> omega(static_cast<std::size_t>(hi - lo + 1));
    e.fill1(lo, hi + 1, omega);
    return exit_probability_omegas(omega, w.m_minus, w.m_plus, w.z);
}

// ---------------------------------------------------------------------------
// Transience / speed

Classification classify(const env::EnvironmentSpec& spec) {
    const double u = env::log_rho_mean(spec);
    if (u < -kZeroTol) return Classification::transient_right;
    if (u > kZeroTol) return Classification::transient_left;
    return Classification::recurrent;
}

double speed(const env::EnvironmentSpec& spec) {
    require_product(spec, "speed");
    const double er = env::moments(spec, 1.0);
    if (er < 1.0) return (1.0 - er) / (1.0 + er);
    const double eri = env::moments(spec, -1.0);
    if (eri < 1.0) return -(1.0 - eri) / (1.0 + eri);
    return 0.0;
}

double annealed_expected_tau(const env::EnvironmentSpec& spec) {
    require_product(spec, "annealed_expected_tau");
    const double er = env::moments(spec, 1.0);
    if (er >= 1.0) return kInf;
    return (1.0 + er) / (1.0 - er);
}

SeriesValue expected_tau(const env::Environment& e, int64_t site, double tol) {
    if (e.dimension() != 1) throw std::invalid_argument("expected_tau: 1d environments only");
    if (!(tol > 0.0)) throw std::invalid_argument("expected_tau: tolerance must be positive");
    constexpr int64_t kMaxTerms = 1'000'000;
    constexpr int64_t kBlock = 4096;
    constexpr double kSumCap = 1e15;

    std::vector<double> omega;
    int64_t block_lo = site + 1;  // omega covers [block_lo, site]
    auto fetch = [&](int64_t x) {
        while (x < block_lo) {
            const int64_t new_lo = block_lo - kBlock;
            std::vector<double> grown(static_cast<std::size_t>(site + 1 - new_lo));
            e.fill1(new_lo, block_lo, std::span<double>(grown.data(), static_cast<std::size_t>(block_lo - new_lo)));
            std::copy(omega.begin(), omega.end(),
                      grown.begin() + static_cast<std::ptrdiff_t>(block_lo - new_lo));
            omega = std::move(grown);
            block_lo = new_lo;
        }
        return omega[static_cast<std::size_t>(x - block_lo)];
    };

    // ring of the last 65 terms for the geometric tail certificate
    double ring[65];
    double sum = 0.0, prod = 1.0;
    for (int64_t k = 0; k < kMaxTerms; ++k) {
        const double w = fetch(site - k);
        const double term = prod / w;
        ring[k % 65] = term;
        sum += term;
        if (term > kSumCap || sum > kSumCap) {
            // growing terms: the walk to the right of `site` has no finite
            // quenched mean hitting time
            const bool growing = k < 64 || term >= ring[(k + 1) % 65];
            if (growing) return {kInf, SeriesStatus::infinite};
            return {sum, SeriesStatus::undetermined};
        }
        if (k >= 64 && term < tol * sum) {
            const double q = std::pow(term / ring[(k + 1) % 65], 1.0 / 64.0);
            if (q < 0.995 && term * q / (1.0 - q) < tol * sum)
                return {sum, SeriesStatus::converged};
        }
        prod *= (1.0 - w) / w;
    }
    return {sum, SeriesStatus::undetermined};
}

ErgodicSpeed speed_ergodic(const env::EnvironmentSpec& spec, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("speed_ergodic: tolerance must be positive");
    if (std::holds_alternative<env::Constant>(spec.law))
        return {speed(spec), SeriesStatus::converged};
    const bool periodic = std::holds_alternative<env::Periodic>(spec.law);
    const bool markov = std::holds_alternative<env::Markov>(spec.law);
    if (!periodic && !markov)
        throw std::invalid_argument("speed_ergodic expects a periodic or Markov law; "
                                    "product laws use speed()");

    const Classification cls = classify(spec);
    if (cls == Classification::recurrent) return {0.0, SeriesStatus::converged};
    if (cls == Classification::transient_left) {
        ErgodicSpeed m = speed_ergodic(spec.mirrored(), tol);
        m.v = -m.v;
        return m;
    }

    constexpr int64_t kMaxTerms = 1'000'000;
    // series criterion: sum_i E prod_{j=0..i} rho_{-j} < infinity
    SeriesStatus crit = SeriesStatus::undetermined;
    if (periodic) {
        const auto& per = std::get<env::Periodic>(spec.law).values;
        const auto p = static_cast<int64_t>(per.size());
        auto rho = [&](int64_t x) {
            const double w = per[static_cast<std::size_t>(((x % p) + p) % p)];
            return (1.0 - w) / w;
        };
        std::vector<double> prods(static_cast<std::size_t>(p));
        for (int64_t s = 0; s < p; ++s) prods[static_cast<std::size_t>(s)] = rho(s);
        double sum = 0.0, prev = kInf;
        for (int64_t i = 1; i <= kMaxTerms; ++i) {
            double term = 0.0;
            for (int64_t s = 0; s < p; ++s) {
                prods[static_cast<std::size_t>(s)] *= rho(s - i);
                term += prods[static_cast<std::size_t>(s)];
            }
            term /= static_cast<double>(p);
            sum += term;
            if (term > 1e30) {
                crit = SeriesStatus::infinite;
                break;
            }
            if (term < tol * sum && term < prev) {
                crit = SeriesStatus::converged;
                break;
            }
            prev = term;
        }
    } else {
        const auto& m = std::get<env::Markov>(spec.law);
        const auto pi = env::stationary_distribution(m.transition);
        const std::size_t k = pi.size();
        std::vector<std::vector<double>> backward(k, std::vector<double>(k, 0.0));
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j)
                backward[i][j] = pi[j] * m.transition[j][i] / pi[i];
        std::vector<double> rho(k);
        for (std::size_t s = 0; s < k; ++s) rho[s] = (1.0 - m.omega[s]) / m.omega[s];
        // term_i = pi^T D_rho (B D_rho)^i 1
        std::vector<double> u(k);
        for (std::size_t s = 0; s < k; ++s) u[s] = pi[s] * rho[s];
        double sum = 0.0, prev = kInf;
        for (int64_t i = 1; i <= kMaxTerms; ++i) {
            std::vector<double> nu(k, 0.0);
            for (std::size_t a = 0; a < k; ++a)
                for (std::size_t b = 0; b < k; ++b) nu[b] += u[a] * backward[a][b] * rho[b];
            u = std::move(nu);
            double term = 0.0;
            for (double x : u) term += x;
            sum += term;
            if (term > 1e30) {
                crit = SeriesStatus::infinite;
                break;
            }
            if (term < tol * sum && term < prev) {
                crit = SeriesStatus::converged;
                break;
            }
            prev = term;
        }
    }
    if (crit == SeriesStatus::infinite) return {0.0, SeriesStatus::converged};  // zero speed
    if (crit == SeriesStatus::undetermined) return {0.0, SeriesStatus::undetermined};

    // positive speed: v = 1 / (site average of the quenched E tau)
    if (periodic) {
        const env::Environment e(spec, 0);
        const auto p = static_cast<int64_t>(std::get<env::Periodic>(spec.law).values.size());
        double acc = 0.0;
        for (int64_t s = 0; s < p; ++s) {
            const SeriesValue t = expected_tau(e, s, tol);
            if (!t.finite()) return {0.0, t.status};
            acc += t.value;
        }
        return {static_cast<double>(p) / acc, SeriesStatus::converged};
    }
    const auto& m = std::get<env::Markov>(spec.law);
    const auto pi = env::stationary_distribution(m.transition);
    const std::size_t k = pi.size();
    std::vector<double> rho(k), inv_w(k);
    for (std::size_t s = 0; s < k; ++s) {
        rho[s] = (1.0 - m.omega[s]) / m.omega[s];
        inv_w[s] = 1.0 / m.omega[s];
    }
    // E tau = sum_k (pi . 1/omega)^T (M D_rho)^k 1, states left-to-right
    std::vector<double> u(k);
    for (std::size_t s = 0; s < k; ++s) u[s] = pi[s] * inv_w[s];
    double tau = 0.0, prev = kInf;
    for (int64_t i = 0; i <= kMaxTerms; ++i) {
        double term = 0.0;
        for (double x : u) term += x;
        tau += term;
        if (term < tol * tau && term < prev) return {1.0 / tau, SeriesStatus::converged};
        prev = term;
        std::vector<double> nu(k, 0.0);
        for (std::size_t a = 0; a < k; ++a)
            for (std::size_t b = 0; b < k; ++b) nu[b] += u[a] * m.transition[a][b] * rho[b];
        u = std::move(nu);
    }
    return {0.0, SeriesStatus::undetermined};
}

// ---------------------------------------------------------------------------
// s-parameter and rate functions

double s_parameter(const env::EnvironmentSpec& spec) {
    require_product(spec, "s_parameter");
    const auto support = env::log_rho_support(spec);
    double u = 0.0, lmax = -kInf;
    for (const auto& [lr, w] : support) {
        u += w * lr;
        lmax = std::max(lmax, lr);
    }
    if (u >= 0.0)
        throw std::invalid_argument("s_parameter requires E log rho < 0 (transient right)");
    if (lmax <= 0.0) return kInf;  // rho <= 1 a.s.

    auto f = [&](double s) { return cumulant(support, s).log_m; };  // log E rho^s
    // bracket the root of log E rho^s = 0
    double a = 0.0, b = 1.0;
    while (f(b) < 0.0) {
        a = b;
        b *= 2.0;
        if (b > 1e6) return kInf;
    }
    for (int it = 0; it < 200 && b - a > 1e-10; ++it) {
        const double mid = 0.5 * (a + b);
        (f(mid) < 0.0 ? a : b) = mid;
    }
    return 0.5 * (a + b);
}

double cramer_rate(const env::EnvironmentSpec& spec, double y) {
    require_product(spec, "cramer_rate");
    const auto support = env::log_rho_support(spec);
    double lmin = kInf, lmax = -kInf;
    for (const auto& [lr, w] : support) {
        lmin = std::min(lmin, lr);
        lmax = std::max(lmax, lr);
    }
    if (y < lmin - kZeroTol || y > lmax + kZeroTol) return kInf;
    auto boundary_mass = [&](double l) {
        double mass = 0.0;
        for (const auto& [lr, w] : support)
            if (std::abs(lr - l) <= kZeroTol) mass += w;
        return mass;
    };
    if (std::abs(y - lmax) <= kZeroTol) return -std::log(boundary_mass(lmax));
    if (std::abs(y - lmin) <= kZeroTol) return -std::log(boundary_mass(lmin));

    // strict interior: bracket the maximizer of g(l) = l y - log E rho^l by
    // the sign of g' = y - K'(l), then golden-section on the concave dual
    auto dK = [&](double l) { return cumulant(support, l).dlog_m; };
    double a = -1.0, b = 1.0;
    while (dK(a) > y) a *= 2.0;
    while (dK(b) < y) b *= 2.0;
    auto g = [&](double l) { return l * y - cumulant(support, l).log_m; };
    return std::max(0.0, golden_max(g, a, b, 1e-10));
}

double s_from_rate(const env::EnvironmentSpec& spec) {
    require_product(spec, "s_from_rate");
    const auto support = env::log_rho_support(spec);
    double u = 0.0, lmax = -kInf;
    for (const auto& [lr, w] : support) {
        u += w * lr;
        lmax = std::max(lmax, lr);
    }
    if (u >= 0.0)
        throw std::invalid_argument("s_from_rate requires E log rho < 0 (transient right)");
    if (lmax <= 0.0) return kInf;

    auto h = [&](double y) { return cramer_rate(spec, y) / y; };
    // coarse grid then golden refinement; h is unimodal on (0, lmax]
    const int grid = 400;
    double best_y = lmax, best = h(lmax);
    for (int i = 1; i < grid; ++i) {
        const double y = lmax * static_cast<double>(i) / grid;
        const double v = h(y);
        if (v < best) {
            best = v;
            best_y = y;
        }
    }
    const double lo = std::max(1e-12, best_y - lmax / grid);
    const double hi = std::min(lmax, best_y + lmax / grid);
    return -golden_max([&](double y) { return -h(y); }, lo, hi, 1e-10 * lmax);
}

// ---------------------------------------------------------------------------
// Quenched Laplace transform and the slowdown rate

namespace {

// Mean over i in [0, n) of log phi_i, where
//   phi_i = omega_i xi / (1 - (1 - omega_i) xi phi_{i-1}),
// seeded with phi = omega xi a burn-in distance left of the window.
// Returns nothing when the recursion blows up (xi > 1 beyond the critical
// point: E exp(mu tau) = infinity in this window).
std::optional<double> mean_log_phi(const env::Environment& e, double xi, int64_t n,
                                   int64_t burn_in) {
    const int64_t lo = -burn_in;
    std::vector<double> omega(static_cast<std::size_t>(n + burn_in));
    e.fill1(lo, n, omega);
    double phi = omega[0] * xi;
    double sum = 0.0;
    for (int64_t i = lo + 1; i < n; ++i) {
        const double w = omega[static_cast<std::size_t>(i - lo)];
        const double denom = 1.0 - (1.0 - w) * xi * phi;
        if (denom <= 1e-12) return std::nullopt;
        phi = w * xi / denom;
        if (phi > 1e9) return std::nullopt;
        if (i >= 0) sum += std::log(phi);
    }
    return sum / static_cast<double>(n);
}

}  // namespace

double quenched_laplace(const env::Environment& e, double lambda, int64_t n, int64_t burn_in) {
    if (lambda < 0.0) throw std::invalid_argument("quenched_laplace: lambda must be >= 0");
    if (n < 1 || burn_in < 1) throw std::invalid_argument("quenched_laplace: bad window");
    const auto v = mean_log_phi(e, std::exp(-lambda), n, burn_in);
    // xi <= 1 keeps phi in (0, 1]; the recursion cannot blow up
    return *v;
}

double quenched_rate_slowdown(const env::Environment& e, double w, int64_t n, int64_t burn_in) {
    if (!(w > 0.0) || w > 1.0)
        throw std::invalid_argument("quenched_rate_slowdown: w must lie in (0, 1]");
    auto lambda_tau = [&](double mu) { return mean_log_phi(e, std::exp(mu), n, burn_in); };

    // locate the critical mu by doubling then bisection
    double ok = 0.0, bad = 1e-4;
    while (lambda_tau(bad).has_value()) {
        ok = bad;
        bad *= 2.0;
        if (bad > 64.0) break;  // tau >= 1 forces blow-up well before this
    }
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (ok + bad);
        (lambda_tau(mid).has_value() ? ok : bad) = mid;
    }
    if (ok <= 0.0) return 0.0;  // no exponential moments at this window

    auto g = [&](double mu) {
        const auto l = lambda_tau(mu);
        if (!l) return -kInf;
        return mu - w * *l;
    };
    const double value = golden_max(g, 0.0, ok, std::max(1e-12, 1e-10 * ok));
    return std::max(0.0, value);
}

RateUpperBound annealed_rate_upper(const env::EnvironmentSpec& spec, double w,
                                   std::span<const double> tilt_grid, std::uint64_t env_seed,
                                   int64_t n, int64_t burn_in) {
    const auto* fs = std::get_if<env::FiniteSupport>(&spec.law);
    if (!fs || fs->values.size() != 2)
        throw std::invalid_argument("annealed_rate_upper expects a two-point product law");
    if (tilt_grid.empty()) throw std::invalid_argument("annealed_rate_upper: empty tilt grid");
    const double p1 = fs->weights[0], p2 = fs->weights[1];

    std::vector<double> grid(tilt_grid.begin(), tilt_grid.end());
    if (std::none_of(grid.begin(), grid.end(),
                     [&](double q) { return std::abs(q - p1) < 1e-15; }))
        grid.push_back(p1);  // the identity tilt always competes

    RateUpperBound best{kInf, p1};
    for (double q : grid) {
        if (!(q > 0.0) || !(q < 1.0))
            throw std::invalid_argument("annealed_rate_upper: tilts must lie in (0, 1)");
        const auto tilted = env::make_finite_support(fs->values, {q, 1.0 - q});
        const env::Environment te(tilted, env_seed);
        const double entropy = q * std::log(q / p1) + (1.0 - q) * std::log((1.0 - q) / p2);
        const double rate = quenched_rate_slowdown(te, w, n, burn_in);
        if (entropy + rate < best.value) best = {entropy + rate, q};
    }
    return best;
}

// ---------------------------------------------------------------------------
// Traps and valleys

std::vector<int64_t> find_traps(const env::Environment& e, int64_t k, double y, int64_t lo,
                                int64_t hi) {
    if (k < 1) throw std::invalid_argument("find_traps: k must be >= 1");
    if (hi < lo) throw std::invalid_argument("find_traps: empty range");
    // need log rho at sites lo+1 .. hi+k
    const int64_t first = lo + 1, last = hi + k;
    std::vector<double> omega(static_cast<std::size_t>(last - first + 1));
    e.fill1(first, last + 1, omega);
    std::vector<double> prefix(omega.size() + 1, 0.0);
    for (std::size_t i = 0; i < omega.size(); ++i)
        prefix[i + 1] = prefix[i] + std::log((1.0 - omega[i]) / omega[i]);
    std::vector<int64_t> out;
    const double need = y * static_cast<double>(k);
    for (int64_t z = lo; z <= hi; ++z) {
        const auto base = static_cast<std::size_t>(z + 1 - first);
        if (prefix[base + static_cast<std::size_t>(k)] - prefix[base] >= need) out.push_back(z);
    }
    return out;
}

std::optional<Valley> find_valley(const PotentialProfile& p, double depth) {
    if (!(depth > 0.0)) throw std::invalid_argument("find_valley: depth must be positive");
    const int64_t lo = p.lo, hi = p.hi();
    int64_t right = hi + 1;
    {
        double run_min = kInf;
        for (int64_t x = 0; x <= hi; ++x) {
            run_min = std::min(run_min, p.at(x));
            if (p.at(x) - run_min >= depth) {
                right = x;
                break;
            }
        }
    }
    int64_t left = lo - 1;
    {
        double run_min = kInf;
        for (int64_t x = 0; x >= lo; --x) {
            run_min = std::min(run_min, p.at(x));
            if (p.at(x) - run_min >= depth) {
                left = x;
                break;
            }
        }
    }
    if (right > hi || left < lo) return std::nullopt;

    int64_t bottom = left;
    double wmin = p.at(left);
    for (int64_t x = left; x <= right; ++x) {
        if (p.at(x) < wmin) {
            wmin = p.at(x);
            bottom = x;
        }
    }
    Valley v;
    v.left = left;
    v.right = right;
    v.bottom = bottom;
    v.depth = std::min(p.at(left) - wmin, p.at(right) - wmin);
    v.b_n = 0.0;
    return v;
}

Valley sinai_valley(const env::Environment& e, int64_t n) {
    if (n < 2) throw std::invalid_argument("sinai_valley: n must be >= 2");
    if (classify(e.spec()) != Classification::recurrent)
        throw std::invalid_argument("sinai_valley requires a recurrent law (E log rho = 0)");
    const double depth = std::log(static_cast<double>(n));
    int64_t reach = 4096;
    constexpr int64_t kMaxReach = int64_t{1} << 24;
    while (true) {
        const auto p = PotentialProfile::from_environment(e, -reach, reach);
        if (auto v = find_valley(p, depth)) {
            v->b_n = static_cast<double>(v->bottom) / (depth * depth);
            return *v;
        }
        reach *= 2;
        if (reach > kMaxReach)
            throw std::runtime_error("sinai_valley: no valley of the requested depth within " +
                                     std::to_string(kMaxReach) + " sites of the origin");
    }
}

}  // namespace rwre::exact1d
