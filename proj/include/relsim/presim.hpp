#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <thread>
#include <vector>

#include "relsim/executor.hpp"
#include "relsim/faults.hpp"

namespace relsim {

// One sampled fault arrival. `row` indexes the fault table, which carries
// the instance / port / event names.
struct FaultEvent {
    double time_h = 0.0;
    std::uint32_t row = 0;
};

// Result of one simulation replica. `failure_mode` is empty when a horizon
// was set and the system survived it (failure_time_h then equals the
// horizon). consumed_faults lists the fault events fed to the executor, in
// chronological order, up to and including the one that triggered failure.
struct SimOutcome {
    double failure_time_h = 0.0;
    std::optional<FailureMode> failure_mode;
    std::vector<FaultEvent> consumed_faults;
    std::uint64_t master_seed = 0;
    std::uint64_t replica = 0;

    bool survived() const { return !failure_mode.has_value(); }
};

// Samples one arrival time per table row and orders them chronologically.
// Each row draws from its own substream keyed on (master seed, replica, row
// content identity), so row order in the file never affects the draw. Ties
// break on the row's table position.
inline std::vector<FaultEvent> generate_fault_series(
    const FaultTable& table, const std::function<double(std::size_t)>& sample_row) {
    if (table.empty()) throw SimulationError("fault table is empty; the model can never fail");
    std::vector<FaultEvent> series;
    series.reserve(table.size());
    for (std::size_t i = 0; i < table.size(); ++i) {
        double t = sample_row(i);
        if (!(t >= 0.0) || !std::isfinite(t))
            throw SimulationError("sampled fault time is not a finite non-negative number");
        series.push_back({t, static_cast<std::uint32_t>(i)});
    }
    std::sort(series.begin(), series.end(), [](const FaultEvent& a, const FaultEvent& b) {
        if (a.time_h != b.time_h) return a.time_h < b.time_h;
        return a.row < b.row;
    });
    return series;
}

inline std::vector<FaultEvent> generate_fault_series(const FaultTable& table,
                                                     std::uint64_t master_seed,
                                                     std::uint64_t replica) {
    return generate_fault_series(table, [&](std::size_t i) {
        CounterRng rng(derive_stream_key(master_seed, replica, table.rows[i].identity));
        return table.rows[i].distribution.sample(rng);
    });
}

// Fault-port resolution cache: one pre-resolved boundary event per table row.
class ResolvedFaultTable {
public:
    ResolvedFaultTable(const CompiledSystem& system, const FaultTable& table) : table_(&table) {
        events_.reserve(table.rows.size());
        for (const auto& row : table.rows)
            events_.push_back(system.resolve_external(row.system_port, row.event));
    }

    const FaultTable& table() const { return *table_; }
    CompiledSystem::ExternalEvent event(std::uint32_t row) const { return events_[row]; }

private:
    const FaultTable* table_;
    std::vector<CompiledSystem::ExternalEvent> events_;
};

namespace detail {

inline SimOutcome simulate_series(const CompiledSystem& system,
                                  const ResolvedFaultTable& resolved,
                                  const std::vector<FaultEvent>& series,
                                  std::optional<double> horizon, ExecScratch& scratch,
                                  std::uint64_t master_seed, std::uint64_t replica) {
    SimOutcome outcome;
    outcome.master_seed = master_seed;
    outcome.replica = replica;
    SystemState state = system.initial_state();

    if (auto mode = system.absorbing_failure(state)) {
        outcome.failure_mode = mode;
        return outcome;
    }
    for (const FaultEvent& fault : series) {
        if (horizon && fault.time_h > *horizon) break;
        CompiledSystem::ExternalEvent ev[1] = {resolved.event(fault.row)};
        system.execute_cycle_fast(state, ev, scratch);
        outcome.consumed_faults.push_back(fault);
        if (auto mode = system.absorbing_failure(state)) {
            outcome.failure_mode = mode;
            outcome.failure_time_h = fault.time_h;
            return outcome;
        }
    }
    if (horizon) {
        outcome.failure_time_h = *horizon;  // survived the mission window
        return outcome;
    }
    // Name the terminal state to make the modeling hole findable.
    std::string detail = "{";
    for (std::size_t i = 0; i < system.instance_count(); ++i) {
        if (i) detail += ", ";
        detail += system.instance_name(i) + ":" +
                  system.active_state(state, system.instance_name(i));
    }
    detail += "}";
    throw SimulationError(
        "fault series exhausted without reaching a failure state (non-absorbing model); "
        "final system state " +
        detail);
}

}  // namespace detail

// Runs one replica: sample all fault times, order them, feed them to the
// executor one per cycle, stop at the first absorbing failure.
inline SimOutcome simulate(const CompiledSystem& system, const ResolvedFaultTable& resolved,
                           std::uint64_t master_seed, std::uint64_t replica,
                           std::optional<double> horizon = std::nullopt) {
    auto series = generate_fault_series(resolved.table(), master_seed, replica);
    ExecScratch scratch;
    return detail::simulate_series(system, resolved, series, horizon, scratch, master_seed,
                                   replica);
}

// Convenience overload compiling nothing: callers in inner loops should
// reuse a ResolvedFaultTable.
inline SimOutcome simulate(const CompiledSystem& system, const FaultTable& table,
                           std::uint64_t master_seed, std::uint64_t replica,
                           std::optional<double> horizon = std::nullopt) {
    ResolvedFaultTable resolved(system, table);
    return simulate(system, resolved, master_seed, replica, horizon);
}

// Deterministic test/diagnosis entry: run a fixed fault series instead of a
// sampled one.
inline SimOutcome simulate_with_series(const CompiledSystem& system, const FaultTable& table,
                                       const std::vector<FaultEvent>& series,
                                       std::optional<double> horizon = std::nullopt) {
    ResolvedFaultTable resolved(system, table);
    ExecScratch scratch;
    return detail::simulate_series(system, resolved, series, horizon, scratch, 0, 0);
}

// n replicas, indices first_replica..first_replica+n-1, optionally on
// several worker threads. Substreams are keyed by absolute replica index, so
// a batch split into sub-ranges concatenates to the full batch, and the
// outcome list is identical for every worker count. Exceptions from workers
// are rethrown on the caller thread.
inline std::vector<SimOutcome> run_batch(const CompiledSystem& system, const FaultTable& table,
                                         std::uint64_t master_seed, std::size_t n,
                                         std::optional<double> horizon = std::nullopt,
                                         unsigned workers = 1, std::uint64_t first_replica = 0) {
    if (n == 0) throw SimulationError("run_batch requires n >= 1");
    ResolvedFaultTable resolved(system, table);
    std::vector<SimOutcome> outcomes(n);
    if (workers == 0) workers = 1;
    workers = std::min<unsigned>(workers, static_cast<unsigned>(n));

    auto worker_fn = [&](unsigned worker_idx, std::exception_ptr& error) {
        try {
            ExecScratch scratch;
            for (std::size_t i = worker_idx; i < n; i += workers) {
                std::uint64_t replica = first_replica + i;
                auto series = generate_fault_series(resolved.table(), master_seed, replica);
                outcomes[i] = detail::simulate_series(system, resolved, series, horizon,
                                                      scratch, master_seed, replica);
            }
        } catch (...) {
            error = std::current_exception();
        }
    };

    if (workers == 1) {
        std::exception_ptr error;
        worker_fn(0, error);
        if (error) std::rethrow_exception(error);
        return outcomes;
    }
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(workers);
    threads.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
        threads.emplace_back(worker_fn, w, std::ref(errors[w]));
    for (auto& t : threads) t.join();
    for (auto& error : errors)
        if (error) std::rethrow_exception(error);
    return outcomes;
}

}  // namespace relsim
