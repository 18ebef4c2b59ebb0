#pragma once

// Test-only reference computations. Nothing here calls into the solver path
// it is used to check.

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "jodstudy/pcm.hpp"

namespace oracle {

inline double phi_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// Inverse normal CDF by plain bisection on erfc.
inline double bisection_probit(double p) {
    double lo = -40.0, hi = 40.0;
    for (int k = 0; k < 200; ++k) {
        const double mid = 0.5 * (lo + hi);
        (phi_cdf(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

inline std::vector<double> central_difference(const std::function<double(const std::vector<double>&)>& f,
                                              std::vector<double> x, double h) {
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double x0 = x[i];
        x[i] = x0 + h;
        const double fp = f(x);
        x[i] = x0 - h;
        const double fm = f(x);
        x[i] = x0;
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

/// -log-likelihood contribution of one pair as a function of d = q_i - q_j.
inline double pair_term(double c, double n, double d, double sigma) {
    const double pw = std::clamp(phi_cdf(d / sigma), 1e-12, 1.0 - 1e-12);
    const double pl = std::clamp(phi_cdf(-d / sigma), 1e-12, 1.0 - 1e-12);
    return -(c * std::log(pw) + (n - c) * std::log(pl));
}

struct GridResult {
    double q1 = 0.0, q2 = 0.0, nll = 0.0;
};

/// Exhaustive grid over (q1, q2) in [-range, range]^2 with q0 = 0. The three
/// pair terms are tabulated once per grid offset, then every grid point is
/// visited.
inline GridResult grid_search_3(const jodstudy::Pcm& pcm, double sigma, double step = 0.001, double range = 6.0) {
    const long m = std::lround(range / step);
    const long width = 2 * m + 1;
    auto value = [&](long k) { return static_cast<double>(k) * step; };
    std::vector<double> t01(width), t02(width), t12(2 * width - 1);
    for (long a = -m; a <= m; ++a) {
        // d = q0 - q1 = -q1
        t01[a + m] = pair_term(pcm.wins(0, 1), pcm.totals(0, 1), -value(a), sigma);
        t02[a + m] = pair_term(pcm.wins(0, 2), pcm.totals(0, 2), -value(a), sigma);
    }
    for (long d = -2 * m; d <= 2 * m; ++d) t12[d + 2 * m] = pair_term(pcm.wins(1, 2), pcm.totals(1, 2), value(d), sigma);

    GridResult best{0, 0, std::numeric_limits<double>::infinity()};
    for (long a = -m; a <= m; ++a) {
        const double base = t01[a + m];
        for (long b = -m; b <= m; ++b) {
            const double f = base + t02[b + m] + t12[a - b + 2 * m];
            if (f < best.nll) best = {value(a), value(b), f};
        }
    }
    return best;
}

/// Random connected PCM: a spanning chain plus random extra edges, counts in
/// half-steps so ties are represented.
inline jodstudy::Pcm random_pcm(std::mt19937_64& rng, std::size_t k, double extra_edge_prob = 0.5) {
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < k; ++i) ids.push_back("c" + std::to_string(i));
    jodstudy::Pcm pcm(ids);
    std::uniform_int_distribution<int> total(4, 30);
    std::bernoulli_distribution extra(extra_edge_prob);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            if (j != i + 1 && !extra(rng)) continue;
            const int n = total(rng);
            std::uniform_int_distribution<int> halves(1, 2 * n - 1);
            pcm.set(i, j, 0.5 * halves(rng), n);
        }
    }
    return pcm;
}

}  // namespace oracle
