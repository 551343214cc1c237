// Derivative-free minimizers with a hard budget on objective evaluations.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

namespace qdlane::opt {

struct Evaluation {
    int index;          // 1-based evaluation number
    double objective;
    double best_so_far;
};

struct Result {
    Eigen::VectorXd best;
    double best_value = std::numeric_limits<double>::infinity();
    std::vector<Evaluation> trace;
};

using Objective = std::function<double(const Eigen::VectorXd&)>;

namespace detail {

class Budget {
public:
    Budget(Objective f, int max_evals, Result& out) : f_(std::move(f)), max_(max_evals), out_(out) {}

    bool exhausted() const { return static_cast<int>(out_.trace.size()) >= max_; }

    double operator()(const Eigen::VectorXd& x) {
        const double v = f_(x);
        if (v < out_.best_value) {
            out_.best_value = v;
            out_.best = x;
        }
        out_.trace.push_back(Evaluation{static_cast<int>(out_.trace.size()) + 1, v, out_.best_value});
        return v;
    }

private:
    Objective f_;
    int max_;
    Result& out_;
};

} // namespace detail

struct LinearTrustRegionOptions {
    int max_evals = 30;
    double rho_begin = 1.0;
    double rho_end = 1e-4;
};

// Unconstrained linear-interpolation trust-region search in the style of
// COBYLA. A simplex of n+1 points defines a linear model of the objective;
// each iteration steps a distance rho down the model gradient from the best
// vertex and swaps the new point into the simplex. rho halves whenever a
// step fails to improve on the best vertex.
inline Result minimize_linear_trust_region(const Objective& f, Eigen::VectorXd x0,
                                           const LinearTrustRegionOptions& opt = {}) {
    const auto n = x0.size();
    if (n < 1) throw std::invalid_argument("optimizer needs at least one parameter");
    if (opt.max_evals < 1) throw std::invalid_argument("optimizer needs a positive evaluation budget");
    Result res;
    res.best = x0;
    detail::Budget eval(f, opt.max_evals, res);
    double rho = opt.rho_begin;

    std::vector<Eigen::VectorXd> sim;
    std::vector<double> fv;
    sim.push_back(x0);
    fv.push_back(eval(x0));
    for (Eigen::Index i = 0; i < n && !eval.exhausted(); ++i) {
        Eigen::VectorXd v = x0;
        v(i) += rho;
        sim.push_back(v);
        fv.push_back(eval(v));
    }
    if (static_cast<Eigen::Index>(sim.size()) < n + 1) return res;

    auto farthest_from = [&](const Eigen::VectorXd& p, std::size_t skip) {
        std::size_t idx = skip == 0 ? 1 : 0;
        double dmax = -1.0;
        for (std::size_t i = 0; i < sim.size(); ++i) {
            if (i == skip) continue;
            const double d = (sim[i] - p).norm();
            if (d > dmax) {
                dmax = d;
                idx = i;
            }
        }
        return std::pair{idx, dmax};
    };

    while (!eval.exhausted()) {
        // Best vertex first.
        const auto best_it = std::min_element(fv.begin(), fv.end());
        const auto b = static_cast<std::size_t>(best_it - fv.begin());
        std::swap(sim[0], sim[b]);
        std::swap(fv[0], fv[b]);

        Eigen::MatrixXd edges(n, n);
        Eigen::VectorXd df(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            edges.row(i) = (sim[static_cast<std::size_t>(i) + 1] - sim[0]).transpose();
            df(i) = fv[static_cast<std::size_t>(i) + 1] - fv[0];
        }
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(edges, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const auto& sv = svd.singularValues();
        if (sv(n - 1) <= 1e-8 * std::max(sv(0), 1e-300)) {
            // Degenerate simplex: move the farthest vertex along the lost direction.
            const auto [far, dist] = farthest_from(sim[0], 0);
            (void)dist;
            sim[far] = sim[0] + rho * svd.matrixV().col(n - 1);
            fv[far] = eval(sim[far]);
            continue;
        }
        const Eigen::VectorXd grad = svd.solve(df);
        const double gnorm = grad.norm();
        if (gnorm <= 1e-12) {
            if (rho <= opt.rho_end) break;
            rho *= 0.5;
            const auto [far, dist] = farthest_from(sim[0], 0);
            (void)dist;
            sim[far] = sim[0] + rho * (sim[far] - sim[0]).normalized();
            fv[far] = eval(sim[far]);
            continue;
        }

        const Eigen::VectorXd trial = sim[0] - (rho / gnorm) * grad;
        const double ft = eval(trial);
        if (ft < fv[0]) {
            const auto [far, dist] = farthest_from(trial, 0);
            (void)dist;
            sim[far] = trial;
            fv[far] = ft;
            continue;
        }

        // No progress: keep the point if it beats the worst vertex, then
        // shrink the region.
        const auto worst = static_cast<std::size_t>(std::max_element(fv.begin(), fv.end()) - fv.begin());
        if (worst != 0 && ft < fv[worst]) {
            sim[worst] = trial;
            fv[worst] = ft;
        }
        if (rho <= opt.rho_end) break;
        rho *= 0.5;
        const auto [far, dist] = farthest_from(sim[0], 0);
        if (dist > 2.0 * rho && !eval.exhausted()) {
            sim[far] = sim[0] + rho * (sim[far] - sim[0]) / dist;
            fv[far] = eval(sim[far]);
        }
    }
    return res;
}

struct CompassOptions {
    int max_evals = 30;
    double step_begin = 1.0;
    double step_end = 1e-4;
};

// Coordinate pattern search: try +/- step on each axis in order, accept the
// first improvement, halve the step after a full unsuccessful sweep.
inline Result minimize_compass(const Objective& f, Eigen::VectorXd x, const CompassOptions& opt = {}) {
    if (x.size() < 1) throw std::invalid_argument("optimizer needs at least one parameter");
    if (opt.max_evals < 1) throw std::invalid_argument("optimizer needs a positive evaluation budget");
    Result res;
    res.best = x;
    detail::Budget eval(f, opt.max_evals, res);
    double fx = eval(x);
    double step = opt.step_begin;
    while (!eval.exhausted() && step > opt.step_end) {
        bool improved = false;
        for (Eigen::Index i = 0; i < x.size() && !improved && !eval.exhausted(); ++i) {
            for (double sign : {1.0, -1.0}) {
                if (eval.exhausted()) break;
                Eigen::VectorXd y = x;
                y(i) += sign * step;
                const double fy = eval(y);
                if (fy < fx) {
                    x = y;
                    fx = fy;
                    improved = true;
                    break;
                }
            }
        }
        if (!improved) step *= 0.5;
    }
    return res;
}

} // namespace qdlane::opt
