#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "relsim/presim.hpp"
#include "relsim/stats.hpp"

namespace relsim {

// ---------------------------------------------------------------------------
// Lifetime summaries

struct LifetimeSummary {
    std::size_t n = 0;         // outcomes summarized
    std::size_t n_failed = 0;  // outcomes that reached a failure state
    double mean_ttf_h = 0.0;   // over failed outcomes
    double std_error_h = 0.0;
    std::map<double, double> quantiles_h;        // {0.01,0.05,0.5,0.95,0.99} -> hours
    std::map<FailureMode, double> mode_split;    // empirical, sums to 1 over failed
    double survived_fraction = 0.0;              // horizon runs only
};

inline const std::vector<double>& summary_quantile_levels() {
    static const std::vector<double> levels{0.01, 0.05, 0.5, 0.95, 0.99};
    return levels;
}

namespace detail {

inline LifetimeSummary summarize_times(std::vector<double> failed_times, std::size_t n_total,
                                       const std::map<FailureMode, std::size_t>& mode_counts) {
    LifetimeSummary s;
    s.n = n_total;
    s.n_failed = failed_times.size();
    s.survived_fraction =
        static_cast<double>(n_total - failed_times.size()) / static_cast<double>(n_total);
    if (!failed_times.empty()) {
        s.mean_ttf_h = mean_of(failed_times);
        s.std_error_h = std_error(failed_times);
        std::sort(failed_times.begin(), failed_times.end());
        for (double p : summary_quantile_levels())
            s.quantiles_h[p] = quantile_type7_sorted(failed_times, p);
        for (const auto& [mode, count] : mode_counts)
            s.mode_split[mode] =
                static_cast<double>(count) / static_cast<double>(failed_times.size());
    }
    return s;
}

}  // namespace detail

// Mean, standard error, type-7 quantiles and failure-mode frequencies of a
// batch. Survived (horizon-censored) outcomes are excluded from the time
// statistics and reported as a fraction.
inline LifetimeSummary summarize_lifetime(std::span<const SimOutcome> outcomes) {
    if (outcomes.empty()) throw std::invalid_argument("summarize_lifetime of empty batch");
    std::vector<double> failed;
    failed.reserve(outcomes.size());
    std::map<FailureMode, std::size_t> counts;
    for (const auto& o : outcomes) {
        if (o.survived()) continue;
        failed.push_back(o.failure_time_h);
        ++counts[*o.failure_mode];
    }
    return detail::summarize_times(std::move(failed), outcomes.size(), counts);
}

// ---------------------------------------------------------------------------
// Weibull fitting by stochastic gradient ascent on the mean log-density
// (the fitting objective with an empty conditioning set reduces to the
// negative cross-entropy, maximized at the maximum-likelihood parameters).

struct FitOptions {
    std::size_t n_steps = 10000;
    double learning_rate = 0.05;
    std::uint64_t seed = 0;
    std::size_t minibatch = 64;  // fresh-draw mode only
    bool record_trace = true;
};

struct WeibullFit {
    double scale_h = 0.0;  // eta
    double shape = 0.0;    // beta
    std::vector<double> objective_trace;  // mean log-density per step
    std::size_t n_steps = 0;
    double learning_rate = 0.0;
    std::uint64_t seed = 0;
    // Informational goodness metric: KS distance between the fitted CDF and
    // the fitted sample (fixed-set mode only; NaN otherwise).
    double ks_distance = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

// mean log Weibull density and its gradient in (a, b) = (log eta, log beta).
struct WeibullObjective {
    double value = 0.0;
    double grad_a = 0.0;
    double grad_b = 0.0;
};

inline WeibullObjective weibull_log_density_stats(std::span<const double> log_times, double a,
                                                  double b) {
    double beta = std::exp(b);
    double mean_e = 0.0, mean_xe = 0.0, mean_x = 0.0, n = static_cast<double>(log_times.size());
    for (double x : log_times) {
        double r = beta * (x - a);
        double e = std::exp(std::min(r, 700.0));
        mean_e += e;
        mean_xe += (x - a) * e;
        mean_x += x;
    }
    mean_e /= n;
    mean_xe /= n;
    mean_x /= n;
    WeibullObjective out;
    out.value = b - beta * a + (beta - 1.0) * mean_x - mean_e;
    out.grad_a = beta * (mean_e - 1.0);
    out.grad_b = 1.0 + beta * ((mean_x - a) - mean_xe);
    return out;
}

struct AdamState {
    double m_a = 0.0, v_a = 0.0, m_b = 0.0, v_b = 0.0;
    std::size_t t = 0;
    static constexpr double beta1 = 0.9;
    static constexpr double beta2 = 0.999;
    static constexpr double eps = 1e-8;

    void step(double lr, double grad_a, double grad_b, double& a, double& b) {
        ++t;
        m_a = beta1 * m_a + (1.0 - beta1) * grad_a;
        m_b = beta1 * m_b + (1.0 - beta1) * grad_b;
        v_a = beta2 * v_a + (1.0 - beta2) * grad_a * grad_a;
        v_b = beta2 * v_b + (1.0 - beta2) * grad_b * grad_b;
        double c1 = 1.0 - std::pow(beta1, static_cast<double>(t));
        double c2 = 1.0 - std::pow(beta2, static_cast<double>(t));
        a += lr * (m_a / c1) / (std::sqrt(v_a / c2) + eps);
        b += lr * (m_b / c1) / (std::sqrt(v_b / c2) + eps);
    }
};

inline std::vector<double> to_log_times(std::span<const double> times) {
    std::vector<double> logs;
    logs.reserve(times.size());
    for (double t : times) {
        if (!(t > 0.0) || !std::isfinite(t))
            throw SimulationError(
                "weibull fit requires positive finite failure times (non-finite objective)");
        logs.push_back(std::log(t));
    }
    return logs;
}

}  // namespace detail

// Fits (eta, beta) to a fixed sample set by full-batch Adam ascent over
// (log eta, log beta). Deterministic. Throws on degenerate input (empty,
// non-positive, or constant samples).
inline WeibullFit fit_weibull(std::span<const double> times, const FitOptions& options = {}) {
    if (times.empty()) throw std::invalid_argument("fit_weibull on empty sample");
    if (options.n_steps < 1) throw std::invalid_argument("fit_weibull requires n_steps >= 1");
    if (!(options.learning_rate > 0.0))
        throw std::invalid_argument("fit_weibull requires learning_rate > 0");
    std::vector<double> logs = detail::to_log_times(times);
    auto [mn, mx] = std::minmax_element(logs.begin(), logs.end());
    if (*mn == *mx)
        throw SimulationError(
            "weibull fit is degenerate: all failure times equal (shape diverges)");

    // Start at the sample scale so the exp(beta*(x-a)) terms stay tame.
    double a = mean_of(logs);
    double b = 0.0;
    detail::AdamState adam;
    WeibullFit fit;
    fit.n_steps = options.n_steps;
    fit.learning_rate = options.learning_rate;
    fit.seed = options.seed;
    if (options.record_trace) fit.objective_trace.reserve(options.n_steps);
    for (std::size_t step = 0; step < options.n_steps; ++step) {
        auto obj = detail::weibull_log_density_stats(logs, a, b);
        if (!std::isfinite(obj.value))
            throw SimulationError("weibull fit objective became non-finite");
        if (options.record_trace) fit.objective_trace.push_back(obj.value);
        adam.step(options.learning_rate, obj.grad_a, obj.grad_b, a, b);
    }
    fit.scale_h = std::exp(a);
    fit.shape = std::exp(b);
    std::vector<double> copy(times.begin(), times.end());
    Distribution fitted = Distribution::weibull(fit.shape, fit.scale_h);
    fit.ks_distance = ks_distance(std::move(copy), [&](double t) { return fitted.cdf(t); });
    return fit;
}

// Fresh-draw mode: every step draws `options.minibatch` new failure times
// from the sampler (step-indexed substreams keep it deterministic per seed).
inline WeibullFit fit_weibull_stream(
    const std::function<double(CounterRng&)>& draw_failure_time, const FitOptions& options) {
    if (options.n_steps < 1) throw std::invalid_argument("fit_weibull requires n_steps >= 1");
    if (!(options.learning_rate > 0.0))
        throw std::invalid_argument("fit_weibull requires learning_rate > 0");
    if (options.minibatch < 1) throw std::invalid_argument("minibatch must be >= 1");
    double a = 0.0, b = 0.0;
    bool first = true;
    detail::AdamState adam;
    WeibullFit fit;
    fit.n_steps = options.n_steps;
    fit.learning_rate = options.learning_rate;
    fit.seed = options.seed;
    if (options.record_trace) fit.objective_trace.reserve(options.n_steps);
    std::vector<double> times(options.minibatch);
    for (std::size_t step = 0; step < options.n_steps; ++step) {
        CounterRng rng(derive_stream_key(options.seed, step, 0x66697473u));
        for (auto& t : times) t = draw_failure_time(rng);
        std::vector<double> logs = detail::to_log_times(times);
        if (first) {
            a = mean_of(logs);
            first = false;
        }
        auto obj = detail::weibull_log_density_stats(logs, a, b);
        if (!std::isfinite(obj.value))
            throw SimulationError("weibull fit objective became non-finite");
        if (options.record_trace) fit.objective_trace.push_back(obj.value);
        adam.step(options.learning_rate, obj.grad_a, obj.grad_b, a, b);
    }
    fit.scale_h = std::exp(a);
    fit.shape = std::exp(b);
    return fit;
}

// ---------------------------------------------------------------------------
// Conditional (posterior) analysis via indicator importance weights

struct WeightedSampleSet {
    std::vector<std::pair<double, double>> samples;  // (failure_time_h, weight)
    std::string condition;

    double total_weight() const {
        double s = 0.0;
        for (const auto& [t, w] : samples) s += w;
        return s;
    }
    // (sum w)^2 / sum w^2
    double effective_sample_size() const {
        double s = 0.0, s2 = 0.0;
        for (const auto& [t, w] : samples) {
            s += w;
            s2 += w * w;
        }
        return s2 == 0.0 ? 0.0 : s * s / s2;
    }
    double weighted_mean() const {
        double s = 0.0, sw = 0.0;
        for (const auto& [t, w] : samples) {
            s += w * t;
            sw += w;
        }
        return s / sw;
    }
    // Standard error with reliability-weight correction; for indicator
    // weights this equals the plain subset standard error.
    double weighted_std_error() const {
        double sw = 0.0, sw2 = 0.0;
        for (const auto& [t, w] : samples) {
            sw += w;
            sw2 += w * w;
        }
        if (sw == 0.0) return 0.0;
        double m = weighted_mean();
        double ss = 0.0;
        for (const auto& [t, w] : samples) ss += w * (t - m) * (t - m);
        double denom = sw - sw2 / sw;  // ddof-1 analogue
        if (denom <= 0.0) return 0.0;
        double var = ss / denom;
        return std::sqrt(var / effective_sample_size());
    }
    // Positive-weight failure times (the conditioned subsample when weights
    // are indicators).
    std::vector<double> positive_support() const {
        std::vector<double> xs;
        for (const auto& [t, w] : samples)
            if (w > 0.0) xs.push_back(t);
        return xs;
    }
};

// Raised when an observed condition has zero posterior mass in the batch;
// carries the raw mode frequencies for reporting.
class ConditionNeverObserved : public SimulationError {
public:
    ConditionNeverObserved(const std::string& condition,
                           std::map<std::string, std::size_t> frequencies)
        : SimulationError(make_message(condition, frequencies)),
          frequencies_(std::move(frequencies)) {}

    const std::map<std::string, std::size_t>& frequencies() const { return frequencies_; }

private:
    static std::string make_message(const std::string& condition,
                                    const std::map<std::string, std::size_t>& freq) {
        std::string s = "condition never observed: " + condition + " (raw frequencies:";
        for (const auto& [k, v] : freq) s += " " + k + "=" + std::to_string(v);
        s += ")";
        return s;
    }
    std::map<std::string, std::size_t> frequencies_;
};

inline std::map<std::string, std::size_t> mode_frequencies(
    std::span<const SimOutcome> outcomes) {
    std::map<std::string, std::size_t> freq;
    for (const auto& o : outcomes)
        ++freq[o.survived() ? "survived" : to_string(*o.failure_mode)];
    return freq;
}

// Conditions the simulated lifetime on a point failure mode. A point
// condition on a discrete output makes the importance weights indicators, so
// the posterior is the reweighted batch itself.
inline WeightedSampleSet conditional_lifetime(const CompiledSystem& system,
                                              const FaultTable& table, std::uint64_t seed,
                                              FailureMode mode, std::size_t n,
                                              std::optional<double> horizon = std::nullopt,
                                              unsigned workers = 1) {
    auto outcomes = run_batch(system, table, seed, n, horizon, workers);
    WeightedSampleSet set;
    set.condition = std::string("failure_mode == ") + to_string(mode);
    set.samples.reserve(outcomes.size());
    for (const auto& o : outcomes)
        set.samples.emplace_back(o.failure_time_h,
                                 (!o.survived() && *o.failure_mode == mode) ? 1.0 : 0.0);
    if (set.effective_sample_size() == 0.0)
        throw ConditionNeverObserved(set.condition, mode_frequencies(outcomes));
    return set;
}

inline LifetimeSummary summarize_weighted(const WeightedSampleSet& set) {
    std::vector<double> support = set.positive_support();
    if (support.empty()) throw std::invalid_argument("summarize_weighted on zero-mass set");
    LifetimeSummary s;
    s.n = set.samples.size();
    s.n_failed = support.size();
    s.mean_ttf_h = set.weighted_mean();
    s.std_error_h = set.weighted_std_error();
    std::sort(support.begin(), support.end());
    for (double p : summary_quantile_levels())
        s.quantiles_h[p] = quantile_type7_sorted(support, p);
    s.survived_fraction = 0.0;
    return s;
}

// ---------------------------------------------------------------------------
// Component sensitivity: condition on "the target instance fails within the
// mission horizon". The indicator reads the target rows' sampled fault
// times, which the per-row substreams make recomputable for every replica,
// so the condition is independent of whether the system outlived the fault.

struct SensitivityResult {
    LifetimeSummary unconditioned;
    LifetimeSummary conditioned;
    double mttf_delta_h = 0.0;  // conditioned - unconditioned
    double effective_sample_size = 0.0;
    std::string condition;
};

inline SensitivityResult sensitivity(const CompiledSystem& system, const FaultTable& table,
                                     std::uint64_t seed, const std::string& target_instance,
                                     double horizon_h, std::size_t n,
                                     unsigned workers = 1) {
    if (!(horizon_h > 0.0)) throw std::invalid_argument("sensitivity requires horizon > 0");
    std::vector<std::size_t> target_rows;
    for (std::size_t i = 0; i < table.rows.size(); ++i)
        if (table.rows[i].instance == target_instance) target_rows.push_back(i);
    if (target_rows.empty())
        throw ModelError("instance '" + target_instance + "' has no fault annotation");

    auto outcomes = run_batch(system, table, seed, n, std::nullopt, workers);
    std::vector<SimOutcome> conditioned;
    for (const auto& o : outcomes) {
        bool hit = false;
        for (std::size_t row : target_rows) {
            CounterRng rng(derive_stream_key(seed, o.replica, table.rows[row].identity));
            if (table.rows[row].distribution.sample(rng) <= horizon_h) hit = true;
        }
        if (hit) conditioned.push_back(o);
    }
    SensitivityResult result;
    result.condition = "a fault of " + target_instance + " occurs within " +
                       std::to_string(horizon_h) + " h";
    if (conditioned.empty())
        throw ConditionNeverObserved(result.condition, mode_frequencies(outcomes));
    result.unconditioned = summarize_lifetime(outcomes);
    result.conditioned = summarize_lifetime(conditioned);
    result.mttf_delta_h = result.conditioned.mean_ttf_h - result.unconditioned.mean_ttf_h;
    result.effective_sample_size = static_cast<double>(conditioned.size());
    return result;
}

// ---------------------------------------------------------------------------
// Histograms

struct Histogram {
    std::vector<double> edges;  // bin_count + 1, left-closed bins over [0, max]
    std::vector<double> mass;   // weighted mass per bin; conserves total weight
};

struct HistogramSpec {
    std::size_t bin_count = 0;  // one of the two must be set
    double bin_width = 0.0;
};

inline Histogram make_histogram(const WeightedSampleSet& set, const HistogramSpec& spec) {
    double max_t = 0.0;
    double total = 0.0;
    for (const auto& [t, w] : set.samples) {
        if (w > 0.0) max_t = std::max(max_t, t);
        total += w;
    }
    if (total <= 0.0) throw std::invalid_argument("histogram of zero-mass sample set");
    if (max_t <= 0.0) max_t = 1.0;

    std::size_t bins;
    double width;
    if (spec.bin_count > 0) {
        bins = spec.bin_count;
        width = max_t / static_cast<double>(bins);
    } else if (spec.bin_width > 0.0) {
        width = spec.bin_width;
        bins = static_cast<std::size_t>(std::ceil(max_t / width));
        if (bins == 0) bins = 1;
    } else {
        throw std::invalid_argument("histogram needs bin_count or bin_width");
    }
    Histogram h;
    h.edges.resize(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i) h.edges[i] = width * static_cast<double>(i);
    h.mass.assign(bins, 0.0);
    for (const auto& [t, w] : set.samples) {
        if (w <= 0.0) continue;
        auto idx = static_cast<std::size_t>(t / width);
        if (idx >= bins) idx = bins - 1;  // max sample closes the last bin
        h.mass[idx] += w;
    }
    return h;
}

inline Histogram make_histogram(std::span<const double> times, const HistogramSpec& spec) {
    WeightedSampleSet set;
    set.samples.reserve(times.size());
    for (double t : times) set.samples.emplace_back(t, 1.0);
    return make_histogram(set, spec);
}

}  // namespace relsim
