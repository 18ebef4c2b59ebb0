#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "jodstudy/error.hpp"
#include "jodstudy/normal.hpp"
#include "jodstudy/pcm.hpp"

namespace jodstudy {

struct SolverConfig {
    double jnd_probability = 0.75;
    std::string anchor;  // empty: first condition of the PCM
    double gradient_tolerance = 1e-8;
    int max_iterations = 10000;
    bool adjust_unanimous = true;
};

struct JodResult {
    std::vector<std::string> conditions;
    std::vector<double> scores;  // JOD, aligned with `conditions`
    std::string anchor;
    bool converged = false;
    double final_gradient_norm = 0.0;
    int iterations = 0;

    double score(std::string_view id) const {
        for (std::size_t k = 0; k < conditions.size(); ++k)
            if (conditions[k] == id) return scores[k];
        throw Error(ErrorCode::UnknownCondition, "no score for '" + std::string(id) + "'");
    }
};

/// Probability clamp used inside logarithms.
inline constexpr double kProbEpsilon = 1e-12;

/// Noise scale that makes a 1 JOD difference detected with `jnd_probability`.
inline double sigma_from_jnd(double jnd_probability) {
    if (!(jnd_probability > 0.5 && jnd_probability < 1.0))
        throw Error(ErrorCode::InvalidProbability, "JND probability must lie in (0.5, 1)");
    return 1.0 / probit(jnd_probability);
}

/// Moves unanimous cells half a count inwards: c_ij in [0.5, n_ij - 0.5].
inline Pcm adjust_unanimous(Pcm pcm) {
    for (std::size_t i = 0; i < pcm.size(); ++i) {
        for (std::size_t j = i + 1; j < pcm.size(); ++j) {
            const double n = pcm.totals(i, j);
            if (n <= 0.0) continue;
            const double c = pcm.wins(i, j);
            const double clamped = std::clamp(c, 0.5, n - 0.5);
            if (clamped != c) pcm.set(i, j, clamped, n);
        }
    }
    return pcm;
}

inline double neg_log_likelihood(std::span<const double> q, const Pcm& pcm, double sigma) {
    if (q.size() != pcm.size()) throw Error(ErrorCode::MalformedInput, "score vector size mismatch");
    double nll = 0.0;
    for (std::size_t i = 0; i < pcm.size(); ++i) {
        for (std::size_t j = i + 1; j < pcm.size(); ++j) {
            const double n = pcm.totals(i, j);
            if (n <= 0.0) continue;
            const double c = pcm.wins(i, j);
            const double z = (q[i] - q[j]) / sigma;
            const double p_win = std::clamp(normal_cdf(z), kProbEpsilon, 1.0 - kProbEpsilon);
            const double p_loss = std::clamp(normal_cdf(-z), kProbEpsilon, 1.0 - kProbEpsilon);
            nll -= c * std::log(p_win) + (n - c) * std::log(p_loss);
        }
    }
    return nll;
}

inline std::vector<double> gradient(std::span<const double> q, const Pcm& pcm, double sigma) {
    if (q.size() != pcm.size()) throw Error(ErrorCode::MalformedInput, "score vector size mismatch");
    std::vector<double> g(q.size(), 0.0);
    for (std::size_t i = 0; i < pcm.size(); ++i) {
        for (std::size_t j = i + 1; j < pcm.size(); ++j) {
            const double n = pcm.totals(i, j);
            if (n <= 0.0) continue;
            const double c = pcm.wins(i, j);
            const double z = (q[i] - q[j]) / sigma;
            const double p_win = std::clamp(normal_cdf(z), kProbEpsilon, 1.0 - kProbEpsilon);
            const double p_loss = std::clamp(normal_cdf(-z), kProbEpsilon, 1.0 - kProbEpsilon);
            // d(NLL)/d(q_i) for this pair; q_j receives the negation.
            const double term = -(normal_pdf(z) / sigma) * (c / p_win - (n - c) / p_loss);
            g[i] += term;
            g[j] -= term;
        }
    }
    return g;
}

/// True when every condition is reachable from `root` over cells with n_ij > 0.
inline bool is_connected(const Pcm& pcm, std::size_t root) {
    std::vector<bool> seen(pcm.size(), false);
    std::queue<std::size_t> todo;
    seen[root] = true;
    todo.push(root);
    std::size_t reached = 1;
    while (!todo.empty()) {
        const auto i = todo.front();
        todo.pop();
        for (std::size_t j = 0; j < pcm.size(); ++j) {
            if (!seen[j] && pcm.totals(i, j) > 0.0) {
                seen[j] = true;
                ++reached;
                todo.push(j);
            }
        }
    }
    return reached == pcm.size();
}

/// Maximum-likelihood JOD scores under Thurstone Case V. The anchor is held
/// at 0 and the remaining coordinates are optimised with BFGS plus an Armijo
/// backtracking line search, starting from all zeros.
inline JodResult solve(const Pcm& input, const SolverConfig& config = {}) {
    if (input.size() == 0) throw Error(ErrorCode::EmptyInput, "PCM has no conditions");
    const double sigma = sigma_from_jnd(config.jnd_probability);
    const std::size_t anchor = config.anchor.empty() ? 0 : input.index_of(config.anchor);
    if (!is_connected(input, anchor))
        throw Error(ErrorCode::DisconnectedGraph, "comparison graph does not connect every condition");

    const Pcm pcm = config.adjust_unanimous ? adjust_unanimous(input) : input;
    const std::size_t k = pcm.size();
    const auto dim = static_cast<Eigen::Index>(k - 1);

    // Free coordinates x map to q with the anchor slot fixed at zero.
    std::vector<double> q(k, 0.0);
    auto expand = [&](const Eigen::VectorXd& x) {
        for (std::size_t i = 0, f = 0; i < k; ++i) q[i] = i == anchor ? 0.0 : x[static_cast<Eigen::Index>(f++)];
    };
    auto reduced_gradient = [&]() {
        const auto full = gradient(q, pcm, sigma);
        Eigen::VectorXd g(dim);
        for (std::size_t i = 0, f = 0; i < k; ++i)
            if (i != anchor) g[static_cast<Eigen::Index>(f++)] = full[i];
        return g;
    };

    JodResult result;
    result.conditions = pcm.conditions();
    result.anchor = pcm.conditions()[anchor];

    Eigen::VectorXd x = Eigen::VectorXd::Zero(dim);
    expand(x);
    double f = neg_log_likelihood(q, pcm, sigma);
    Eigen::VectorXd g = reduced_gradient();
    Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(dim, dim);

    int iter = 0;
    for (; iter < config.max_iterations && g.norm() > config.gradient_tolerance; ++iter) {
        Eigen::VectorXd dir = -h_inv * g;
        if (dir.dot(g) >= 0.0) {
            h_inv.setIdentity();
            dir = -g;
        }
        const double slope = dir.dot(g);
        double step = 1.0;
        Eigen::VectorXd x_new;
        double f_new = f;
        bool accepted = false;
        for (int halvings = 0; halvings < 60; ++halvings, step *= 0.5) {
            x_new = x + step * dir;
            expand(x_new);
            f_new = neg_log_likelihood(q, pcm, sigma);
            if (f_new <= f + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            expand(x);
            if (h_inv.isIdentity()) break;  // no further progress possible at this precision
            h_inv.setIdentity();
            continue;
        }
        const Eigen::VectorXd g_new = reduced_gradient();
        const Eigen::VectorXd s = x_new - x;
        const Eigen::VectorXd y = g_new - g;
        const double sy = s.dot(y);
        if (sy > 1e-12) {
            const double rho = 1.0 / sy;
            const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(dim, dim);
            h_inv = (eye - rho * s * y.transpose()) * h_inv * (eye - rho * y * s.transpose()) +
                    rho * s * s.transpose();
        }
        x = x_new;
        f = f_new;
        g = g_new;
    }

    expand(x);
    result.scores = q;
    result.iterations = iter;
    result.final_gradient_norm = g.norm();
    result.converged = result.final_gradient_norm <= config.gradient_tolerance;
    return result;
}

}  // namespace jodstudy
