#pragma once

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <unordered_map>
#include <vector>

#include "relsim/executor.hpp"
#include "relsim/faults.hpp"
#include "relsim/presim.hpp"
#include "relsim/stats.hpp"

namespace relsim {

// Exact continuous-time Markov chain over the reachable joint states of an
// all-exponential composite. Macro-state identity is (active states +
// variable values); the transition function is one executor cycle per
// candidate fault, so the chain cannot drift from simulation semantics.
struct CtmcModel {
    std::vector<SystemState> states;  // index 0 = initial
    std::vector<std::vector<std::pair<std::int32_t, double>>> transitions;  // (target, rate)
    std::vector<std::optional<FailureMode>> absorbing;

    std::size_t size() const { return states.size(); }
};

struct CtmcSolution {
    double mttf_h = 0.0;
    std::map<FailureMode, double> absorb_probability;
    std::map<FailureMode, double> conditional_mttf_h;
    double max_residual = 0.0;  // ||Ax - b||_inf / ||b||_inf over all solves
};

// Breadth-first exploration of the reachable macro-states. From each
// transient state every fault row that still changes the state contributes
// one edge at its exponential rate. Requires a forward cascade (states
// quiescent between cycles) and a purely exponential table.
inline CtmcModel build_ctmc(const CompiledSystem& system, const FaultTable& table,
                            std::size_t state_cap = 1000000) {
    if (table.empty()) throw ModelError("build_ctmc: fault table is empty");
    for (const auto& row : table.rows)
        if (row.distribution.kind != Distribution::Kind::exponential)
            throw ModelError("build_ctmc: non-exponential annotation on '" + row.instance +
                             "." + row.event + "' (the chain oracle is exact only for "
                             "exponential faults)");
    ResolvedFaultTable resolved(system, table);

    CtmcModel model;
    std::unordered_map<std::size_t, std::vector<std::int32_t>> index;
    auto find_or_insert = [&](SystemState&& s) -> std::pair<std::int32_t, bool> {
        std::size_t h = s.core_hash();
        auto& bucket = index[h];
        for (std::int32_t i : bucket)
            if (model.states[i].core_equal(s)) return {i, false};
        auto i = static_cast<std::int32_t>(model.states.size());
        model.states.push_back(std::move(s));
        bucket.push_back(i);
        return {i, true};
    };

    find_or_insert(system.initial_state());
    model.transitions.emplace_back();
    model.absorbing.push_back(system.absorbing_failure(model.states[0]));

    ExecScratch scratch;
    std::size_t frontier = 0;
    while (frontier < model.states.size()) {
        auto si = static_cast<std::int32_t>(frontier++);
        if (model.absorbing[si]) continue;  // do not expand absorbed states
        for (std::uint32_t row = 0; row < table.size(); ++row) {
            SystemState next = model.states[si];
            CompiledSystem::ExternalEvent ev[1] = {resolved.event(row)};
            system.execute_cycle_fast(next, ev, scratch);
            if (!next.quiescent())
                throw ModelError(
                    "build_ctmc: composite is not a forward cascade (signals pending across "
                    "cycles); the chain oracle does not support backward channels");
            if (next.core_equal(model.states[si])) continue;  // fault has no effect here
            auto [ti, inserted] = find_or_insert(std::move(next));
            if (inserted) {
                if (model.states.size() > state_cap)
                    throw ModelError("build_ctmc: reachable state space exceeds cap of " +
                                     std::to_string(state_cap));
                model.transitions.emplace_back();
                model.absorbing.push_back(system.absorbing_failure(model.states[ti]));
            }
            model.transitions[si].emplace_back(ti, table.rows[row].distribution.rate);
        }
    }
    return model;
}

// Expected absorption time, absorption probabilities per failure mode, and
// conditional mean absorption times, via the fundamental-matrix linear
// systems solved with a direct sparse LU factorization.
inline CtmcSolution solve_ctmc(const CtmcModel& model) {
    if (model.absorbing.empty() || model.absorbing[0])
        throw ModelError("solve_ctmc: initial state must be transient");

    std::vector<std::int32_t> transient_index(model.size(), -1);
    std::vector<std::int32_t> transient;
    for (std::size_t i = 0; i < model.size(); ++i) {
        if (!model.absorbing[i]) {
            transient_index[i] = static_cast<std::int32_t>(transient.size());
            transient.push_back(static_cast<std::int32_t>(i));
        }
    }
    const auto nt = static_cast<Eigen::Index>(transient.size());

    // A = -Q restricted to transient states.
    std::vector<Eigen::Triplet<double>> triplets;
    std::map<FailureMode, Eigen::VectorXd> mode_rate;
    for (std::size_t s = 0; s < model.size(); ++s) {
        if (model.absorbing[s]) continue;
        std::int32_t row = transient_index[s];
        double total = 0.0;
        for (const auto& [target, rate] : model.transitions[s]) {
            total += rate;
            if (model.absorbing[target]) {
                mode_rate.try_emplace(*model.absorbing[target], Eigen::VectorXd::Zero(nt))
                    .first->second[row] += rate;
            } else {
                triplets.emplace_back(row, transient_index[target], -rate);
            }
        }
        if (total <= 0.0)
            throw ModelError("solve_ctmc: transient state " + std::to_string(s) +
                             " cannot reach absorption (singular system)");
        triplets.emplace_back(row, row, total);
    }

    Eigen::SparseMatrix<double> A(nt, nt);
    A.setFromTriplets(triplets.begin(), triplets.end());
    A.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.analyzePattern(A);
    lu.factorize(A);
    if (lu.info() != Eigen::Success)
        throw ModelError("solve_ctmc: singular generator (absorption unreachable)");

    CtmcSolution solution;
    auto solve_checked = [&](const Eigen::VectorXd& rhs) {
        Eigen::VectorXd x = lu.solve(rhs);
        double rhs_norm = rhs.lpNorm<Eigen::Infinity>();
        if (rhs_norm > 0.0) {
            double res = (A * x - rhs).lpNorm<Eigen::Infinity>() / rhs_norm;
            solution.max_residual = std::max(solution.max_residual, res);
        }
        return x;
    };

    Eigen::VectorXd tau = solve_checked(Eigen::VectorXd::Ones(nt));
    solution.mttf_h = tau[0];
    for (const auto& [mode, rates] : mode_rate) {
        Eigen::VectorXd prob = solve_checked(rates);   // P(absorb in mode | start s)
        Eigen::VectorXd time = solve_checked(prob);    // E[T ; absorb in mode | start s]
        solution.absorb_probability[mode] = prob[0];
        if (prob[0] > 0.0) solution.conditional_mttf_h[mode] = time[0] / prob[0];
    }
    return solution;
}

// ---------------------------------------------------------------------------
// Weibull maximum likelihood (validation oracle for the gradient fitter)

struct MleResult {
    double scale_h = 0.0;  // eta
    double shape = 0.0;    // beta
    int iterations = 0;
    bool converged = false;
};

namespace detail {

// Profile score in beta after maximizing eta in closed form:
//   g(beta) = sum(t^b ln t)/sum(t^b) - 1/beta - mean(ln t).
// Strictly increasing with a unique root for non-degenerate samples.
struct ProfileScore {
    const std::vector<double>& log_times;
    double mean_log;

    double operator()(double beta, double* derivative = nullptr) const {
        double m = -std::numeric_limits<double>::infinity();
        for (double x : log_times) m = std::max(m, beta * x);
        double s0 = 0.0, s1 = 0.0, s2 = 0.0;
        for (double x : log_times) {
            double e = std::exp(beta * x - m);
            s0 += e;
            s1 += x * e;
            s2 += x * x * e;
        }
        double ratio = s1 / s0;
        if (derivative) *derivative = (s2 / s0 - ratio * ratio) + 1.0 / (beta * beta);
        return ratio - 1.0 / beta - mean_log;
    }

    double eta(double beta) const {
        double m = -std::numeric_limits<double>::infinity();
        for (double x : log_times) m = std::max(m, beta * x);
        double s0 = 0.0;
        for (double x : log_times) s0 += std::exp(beta * x - m);
        return std::exp((m + std::log(s0 / static_cast<double>(log_times.size()))) / beta);
    }
};

}  // namespace detail

// Solves the Weibull score equations by safeguarded Newton on the profile
// likelihood (bisection fallback), then the scale from its closed form.
// Requires at least two distinct positive samples.
inline MleResult weibull_mle(std::span<const double> times, int max_iterations = 200) {
    if (times.size() < 2)
        throw std::invalid_argument("weibull_mle requires at least two samples");
    std::vector<double> logs;
    logs.reserve(times.size());
    for (double t : times) {
        if (!(t > 0.0) || !std::isfinite(t))
            throw std::invalid_argument("weibull_mle requires positive finite samples");
        logs.push_back(std::log(t));
    }
    auto [mn, mx] = std::minmax_element(logs.begin(), logs.end());
    if (*mn == *mx) throw std::invalid_argument("weibull_mle: degenerate (constant) samples");

    detail::ProfileScore score{logs, mean_of(logs)};

    // Bracket the root; g is increasing, negative near 0.
    double lo = 1e-6, hi = 1.0;
    while (score(hi) < 0.0) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e9) throw SimulationError("weibull_mle: shape diverged while bracketing");
    }
    // Method-of-moments style start from the log-sample spread.
    double beta = std::min(std::max(1.2825 / sample_stddev(logs), lo), hi);

    MleResult result;
    for (int it = 0; it < max_iterations; ++it) {
        double deriv = 0.0;
        double g = score(beta, &deriv);
        result.iterations = it + 1;
        if (std::abs(g) < 1e-13) {
            result.converged = true;
            break;
        }
        if (g > 0.0)
            hi = beta;
        else
            lo = beta;
        double next = beta - g / deriv;
        if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);  // bisection safeguard
        if (next == beta) {
            result.converged = true;
            break;
        }
        beta = next;
    }
    if (!result.converged)
        throw SimulationError("weibull_mle failed to converge after " +
                              std::to_string(max_iterations) + " iterations");
    result.shape = beta;
    result.scale_h = score.eta(beta);
    return result;
}

// Normalized score-equation residual at (eta, beta); the MLE drives this
// below 1e-10.
inline double weibull_score_residual(std::span<const double> times, double eta, double beta) {
    double n = static_cast<double>(times.size());
    double log_eta = std::log(eta);
    double d_eta = 0.0, d_beta = 0.0;
    for (double t : times) {
        double z = std::log(t) - log_eta;
        double p = std::exp(beta * z);
        d_eta += beta * (p - 1.0);          // eta * dlogf/deta
        d_beta += 1.0 / beta + z * (1.0 - p);  // dlogf/dbeta
    }
    return std::max(std::abs(d_eta), std::abs(d_beta)) / n;
}

}  // namespace relsim
