#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "relsim/validate.hpp"

namespace relsim {

// An event on a named port, as delivered to (or emitted by) the system
// boundary. Argument count and types must match the event declaration.
struct EventInstance {
    std::string port;
    std::string event;
    std::vector<Value> args;
};

struct FiredTransition {
    std::string instance;
    std::string region;
    std::string from;
    std::string to;
    std::vector<std::string> raised;  // "Port.event" of each raise executed
};

struct CycleResult {
    std::vector<EventInstance> system_outputs;
    std::vector<FiredTransition> fired_transitions;
};

// Joint state of all instances: one active state per region, all variable
// values, and the sampled input signals that have arrived since each
// instance last executed. Plain value type; copy freely.
struct SystemState {
    std::vector<std::int32_t> active;
    std::vector<Value> vars;
    std::vector<std::uint8_t> present;
    std::vector<Value> args;

    bool operator==(const SystemState&) const = default;

    // Identity used for state-space exploration: control states + variables.
    bool core_equal(const SystemState& other) const {
        return active == other.active && vars == other.vars;
    }
    std::size_t core_hash() const {
        std::uint64_t h = 0x9e3779b97f4a7c15ull;
        auto mix = [&](std::uint64_t v) {
            h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        };
        for (auto a : active) mix(static_cast<std::uint64_t>(a) + 1);
        for (auto v : vars) mix(static_cast<std::uint64_t>(v) + 0x517cc1b727220a95ull);
        return static_cast<std::size_t>(h);
    }
    bool quiescent() const {
        for (auto p : present)
            if (p) return false;
        return true;
    }
};

// Reusable per-thread scratch buffers for cycle execution.
struct ExecScratch {
    std::vector<std::uint8_t> sampled;
    std::vector<Value> sampled_args;
    std::vector<std::uint8_t> consumed;  // region-major: region * n_slots + slot
};

// A cascade composite compiled to dense indices for deterministic lockstep
// execution. Immutable after construction; a CompiledSystem may drive any
// number of SystemStates concurrently (one thread per state).
class CompiledSystem {
public:
    // Validates the composite and every referenced statechart; throws
    // ModelError carrying the first diagnostic on failure.
    CompiledSystem(const CompositeDef& def, const ModelLibrary& library) {
        auto creport = validate_composite(def, library);
        if (!creport.empty())
            throw ModelError("cannot compile '" + def.name +
                             "': " + format_diagnostic(creport.front()));
        for (const auto& inst : def.instances) {
            const StatechartDef* chart = library.find_statechart(inst.statechart);
            auto sreport = validate_statechart(*chart, library);
            if (!sreport.empty())
                throw ModelError("cannot compile '" + def.name +
                                 "': " + format_diagnostic(sreport.front()));
        }
        compile(def, library);
    }

    // --- state construction -------------------------------------------------

    // Every instance in its initial state per region, variables at their
    // declared initial values, all signal buffers empty. Entry actions of
    // initial states are not executed.
    SystemState initial_state() const {
        SystemState s;
        s.active.resize(total_regions_);
        s.vars.resize(total_vars_);
        s.present.assign(total_slots_, 0);
        s.args.assign(total_args_, 0);
        for (const auto& inst : instances_) {
            const Chart& chart = charts_[inst.chart];
            for (std::size_t r = 0; r < chart.regions.size(); ++r)
                s.active[inst.region_base + r] = chart.regions[r].initial;
            for (std::size_t v = 0; v < chart.vars.size(); ++v)
                s.vars[inst.var_base + v] = chart.vars[v].initial;
        }
        return s;
    }

    // --- cycle execution ----------------------------------------------------

    // Delivers the external events, then executes every instance once in
    // execution order. Events raised by an instance are routed immediately:
    // instances later in the order see them within this cycle, earlier ones
    // at their next execution. Returns the trace of the cycle.
    CycleResult execute_cycle(SystemState& state,
                              const std::vector<EventInstance>& external) const {
        CycleResult result;
        for (const auto& ev : external) deliver(state, ev);
        ExecScratch scratch;
        run_all(state, scratch, &result);
        return result;
    }

    // Pre-resolved parameterless external event (the fault-injection path).
    struct ExternalEvent {
        std::int32_t slot = -1;  // global input slot on the target instance
    };

    ExternalEvent resolve_external(const std::string& system_port,
                                   const std::string& event) const {
        auto it = external_in_.find(std::make_pair(system_port, event));
        if (it == external_in_.end())
            throw ModelError("unknown port or event '" + system_port + "." + event +
                             "' at the system boundary");
        return ExternalEvent{it->second};
    }

    // Trace-free cycle used by batched simulation.
    void execute_cycle_fast(SystemState& state, std::span<const ExternalEvent> external,
                            ExecScratch& scratch) const {
        for (const auto& ev : external) state.present[ev.slot] = 1;
        run_all(state, scratch, nullptr);
    }

    // --- failure evaluation ---------------------------------------------------

    // Failure mode shown by the designated evaluation instance, if any.
    // Throws ModelError when the composite declares no evaluation instance.
    std::optional<FailureMode> absorbing_failure(const SystemState& state) const {
        if (eval_instance_ < 0)
            throw ModelError("composite '" + name_ + "' designates no evaluation instance");
        for (const auto& fs : eval_states_)
            if (state.active[fs.region_global] == fs.state) return fs.mode;
        return std::nullopt;
    }

    bool has_evaluation() const { return eval_instance_ >= 0; }

    // --- introspection --------------------------------------------------------

    const std::string& name() const { return name_; }
    std::size_t instance_count() const { return instances_.size(); }
    const std::string& instance_name(std::size_t i) const { return instances_[i].name; }

    std::string active_state(const SystemState& state, const std::string& instance,
                             const std::string& region = "") const {
        const Instance& inst = find_instance(instance);
        const Chart& chart = charts_[inst.chart];
        for (std::size_t r = 0; r < chart.regions.size(); ++r) {
            if (!region.empty() && chart.regions[r].name != region) continue;
            return chart.regions[r].states[state.active[inst.region_base + r]].name;
        }
        throw ModelError("unknown region '" + region + "' in instance '" + instance + "'");
    }

    Value variable(const SystemState& state, const std::string& instance,
                   const std::string& var) const {
        const Instance& inst = find_instance(instance);
        const Chart& chart = charts_[inst.chart];
        for (std::size_t v = 0; v < chart.vars.size(); ++v)
            if (chart.vars[v].name == var) return state.vars[inst.var_base + v];
        throw ModelError("unknown variable '" + var + "' in instance '" + instance + "'");
    }

    // Product over instances of per-chart state counts (regions multiply).
    // Joint discrete state-space size estimate, ignoring variables.
    double state_space_estimate() const {
        double product = 1.0;
        for (const auto& inst : instances_) {
            const Chart& chart = charts_[inst.chart];
            for (const auto& region : chart.regions)
                product *= static_cast<double>(region.states.size());
        }
        return product;
    }

    static constexpr int kRunToCompletionCap = 1000;

private:
    // ---- compiled representation ----
    struct CExpr {
        enum class Op {
            lit,
            var,
            param,
            neg,
            lnot,
            add,
            sub,
            lt,
            le,
            gt,
            ge,
            eq,
            ne,
            land,
            lor
        } op;
        Value value = 0;
        std::int32_t a = -1;
        std::int32_t b = -1;
    };
    struct CAction {
        enum class Kind { assign, raise } kind = Kind::assign;
        std::int32_t var = -1;       // assign: chart-local variable index
        std::int32_t expr = -1;      // assign: value expression
        std::int32_t out_slot = -1;  // raise: chart-local output slot
        std::vector<std::int32_t> args;
    };
    struct CTransition {
        std::int32_t trigger_slot = -1;  // chart-local input slot, -1 = none
        std::int32_t guard = -1;
        std::vector<CAction> actions;
        std::int32_t target = 0;
    };
    struct CState {
        std::string name;
        std::vector<CAction> entry;
        std::vector<CTransition> transitions;
    };
    struct CRegion {
        std::string name;
        std::int32_t initial = 0;
        std::vector<CState> states;
    };
    struct SlotMeta {
        std::string port;
        std::string event;
        std::int32_t arg_offset = 0;  // chart-local
        std::vector<ScalarType> types;
    };
    struct Chart {
        std::string name;
        std::vector<CRegion> regions;
        std::vector<VariableDecl> vars;
        std::vector<SlotMeta> in_slots;
        std::map<std::pair<std::string, std::string>, std::int32_t> in_index;
        std::vector<SlotMeta> out_slots;
        std::map<std::pair<std::string, std::string>, std::int32_t> out_index;
        std::int32_t total_args = 0;
        std::vector<CExpr> pool;
    };
    struct Instance {
        std::string name;
        std::int32_t chart = 0;
        std::int32_t region_base = 0;
        std::int32_t var_base = 0;
        std::int32_t slot_base = 0;
        std::int32_t arg_base = 0;
    };
    struct OutRoute {
        // (global input slot, global argument offset) per internal receiver
        std::vector<std::pair<std::int32_t, std::int32_t>> targets;
        std::vector<std::int32_t> sinks;  // indices into system_sinks_
    };
    struct EvalState {
        std::int32_t region_global = 0;
        std::int32_t state = 0;
        FailureMode mode = FailureMode::loss_of_assist;
    };

    // ---- compilation ----
    void compile(const CompositeDef& def, const ModelLibrary& library) {
        name_ = def.name;
        std::map<std::string, std::int32_t> chart_index;
        for (const auto& inst : def.instances) {
            const StatechartDef& chart_def = *library.find_statechart(inst.statechart);
            auto it = chart_index.find(chart_def.name);
            std::int32_t ci;
            if (it == chart_index.end()) {
                ci = static_cast<std::int32_t>(charts_.size());
                charts_.push_back(compile_chart(chart_def, library));
                chart_index.emplace(chart_def.name, ci);
            } else {
                ci = it->second;
            }
            Instance instance;
            instance.name = inst.name;
            instance.chart = ci;
            instance.region_base = total_regions_;
            instance.var_base = total_vars_;
            instance.slot_base = total_slots_;
            instance.arg_base = total_args_;
            const Chart& chart = charts_[ci];
            total_regions_ += static_cast<std::int32_t>(chart.regions.size());
            total_vars_ += static_cast<std::int32_t>(chart.vars.size());
            total_slots_ += static_cast<std::int32_t>(chart.in_slots.size());
            total_args_ += chart.total_args;
            instance_index_.emplace(inst.name, static_cast<std::int32_t>(instances_.size()));
            instances_.push_back(std::move(instance));
            max_region_count_ = std::max(
                max_region_count_, static_cast<std::int32_t>(chart.regions.size()));
            max_slot_count_ = std::max(max_slot_count_,
                                       static_cast<std::int32_t>(chart.in_slots.size()));
            max_arg_count_ = std::max(max_arg_count_, chart.total_args);
        }
        for (const auto& name : def.execution_order())
            exec_order_.push_back(instance_index_.at(name));

        // Routing: per instance, per output slot.
        out_routes_.resize(instances_.size());
        for (std::size_t i = 0; i < instances_.size(); ++i)
            out_routes_[i].resize(charts_[instances_[i].chart].out_slots.size());
        for (const auto& channel : def.channels) {
            std::int32_t si = instance_index_.at(channel.source_instance);
            std::int32_t ti = instance_index_.at(channel.target_instance);
            const Chart& schart = charts_[instances_[si].chart];
            const Chart& tchart = charts_[instances_[ti].chart];
            const InterfaceDef& iface = *library.find_interface(
                library.find_statechart(schart.name)->find_port(channel.source_port)->interface);
            for (const auto& event : iface.events) {
                auto out_it = schart.out_index.find({channel.source_port, event.name});
                if (out_it == schart.out_index.end()) continue;
                std::int32_t tslot = tchart.in_index.at({channel.target_port, event.name});
                out_routes_[si][out_it->second].targets.emplace_back(
                    instances_[ti].slot_base + tslot,
                    instances_[ti].arg_base + tchart.in_slots[tslot].arg_offset);
            }
        }
        for (const auto& binding : def.bindings) {
            std::int32_t ii = instance_index_.at(binding.instance);
            const Chart& chart = charts_[instances_[ii].chart];
            const PortDef* system_port = def.find_system_port(binding.system_port);
            const InterfaceDef& iface = *library.find_interface(system_port->interface);
            for (const auto& event : iface.events) {
                if (system_port->effective_direction(event.direction) == EventDirection::in) {
                    std::int32_t slot = chart.in_index.at({binding.port, event.name});
                    external_in_.emplace(std::make_pair(binding.system_port, event.name),
                                         instances_[ii].slot_base + slot);
                } else {
                    std::int32_t slot = chart.out_index.at({binding.port, event.name});
                    out_routes_[ii][slot].sinks.push_back(
                        static_cast<std::int32_t>(system_sinks_.size()));
                    system_sinks_.emplace_back(binding.system_port, event.name);
                }
            }
        }

        if (def.evaluation) {
            eval_instance_ = instance_index_.at(def.evaluation->instance);
            const Instance& inst = instances_[eval_instance_];
            const Chart& chart = charts_[inst.chart];
            for (const auto& [state_name, mode] : def.evaluation->failure_states) {
                for (std::size_t r = 0; r < chart.regions.size(); ++r) {
                    const auto& states = chart.regions[r].states;
                    for (std::size_t s = 0; s < states.size(); ++s)
                        if (states[s].name == state_name)
                            eval_states_.push_back(
                                {inst.region_base + static_cast<std::int32_t>(r),
                                 static_cast<std::int32_t>(s), mode});
                }
            }
        }
    }

    Chart compile_chart(const StatechartDef& def, const ModelLibrary& library) {
        Chart chart;
        chart.name = def.name;
        chart.vars = def.variables;
        for (const auto& port : def.ports) {
            const InterfaceDef& iface = *library.find_interface(port.interface);
            for (const auto& event : iface.events) {
                SlotMeta meta;
                meta.port = port.name;
                meta.event = event.name;
                for (const auto& p : event.params) meta.types.push_back(p.type);
                if (port.effective_direction(event.direction) == EventDirection::in) {
                    meta.arg_offset = chart.total_args;
                    chart.total_args += static_cast<std::int32_t>(event.params.size());
                    chart.in_index.emplace(std::make_pair(port.name, event.name),
                                           static_cast<std::int32_t>(chart.in_slots.size()));
                    chart.in_slots.push_back(std::move(meta));
                } else {
                    chart.out_index.emplace(std::make_pair(port.name, event.name),
                                            static_cast<std::int32_t>(chart.out_slots.size()));
                    chart.out_slots.push_back(std::move(meta));
                }
            }
        }
        for (const auto& region_def : def.regions) {
            CRegion region;
            region.name = region_def.name;
            std::map<std::string, std::int32_t> state_index;
            for (const auto& s : region_def.states)
                state_index.emplace(s.name, static_cast<std::int32_t>(state_index.size()));
            region.initial = state_index.at(region_def.initial);
            for (const auto& state_def : region_def.states) {
                CState state;
                state.name = state_def.name;
                for (const auto& a : state_def.entry_actions)
                    state.entry.push_back(compile_action(chart, def, a, nullptr));
                for (const auto& tr : state_def.transitions) {
                    CTransition ct;
                    const std::vector<EventParam>* params = nullptr;
                    if (tr.trigger) {
                        ct.trigger_slot = chart.in_index.at({tr.trigger->port, tr.trigger->event});
                        const PortDef* port = def.find_port(tr.trigger->port);
                        const InterfaceDef& iface = *library.find_interface(port->interface);
                        params = &iface.find_event(tr.trigger->event)->params;
                    }
                    if (tr.guard) ct.guard = compile_expr(chart, def, *tr.guard, params);
                    for (const auto& a : tr.actions)
                        ct.actions.push_back(compile_action(chart, def, a, params));
                    ct.target = state_index.at(tr.target);
                    state.transitions.push_back(std::move(ct));
                }
                region.states.push_back(std::move(state));
            }
            chart.regions.push_back(std::move(region));
        }
        return chart;
    }

    CAction compile_action(Chart& chart, const StatechartDef& def, const Action& action,
                           const std::vector<EventParam>* params) {
        CAction ca;
        if (action.kind == Action::Kind::assign) {
            ca.kind = CAction::Kind::assign;
            for (std::size_t v = 0; v < def.variables.size(); ++v)
                if (def.variables[v].name == action.variable)
                    ca.var = static_cast<std::int32_t>(v);
            ca.expr = compile_expr(chart, def, *action.value, params);
            return ca;
        }
        ca.kind = CAction::Kind::raise;
        ca.out_slot = chart.out_index.at({action.port, action.event});
        for (const auto& arg : action.args)
            ca.args.push_back(compile_expr(chart, def, *arg, params));
        return ca;
    }

    std::int32_t compile_expr(Chart& chart, const StatechartDef& def, const Expr& e,
                              const std::vector<EventParam>* params) {
        CExpr ce;
        switch (e.kind) {
            case Expr::Kind::literal:
                ce.op = CExpr::Op::lit;
                ce.value = e.value;
                break;
            case Expr::Kind::name_ref: {
                ce.op = CExpr::Op::var;
                if (params) {
                    for (std::size_t p = 0; p < params->size(); ++p)
                        if ((*params)[p].name == e.name) {
                            ce.op = CExpr::Op::param;
                            ce.a = static_cast<std::int32_t>(p);
                        }
                }
                if (ce.op == CExpr::Op::var) {
                    for (std::size_t v = 0; v < def.variables.size(); ++v)
                        if (def.variables[v].name == e.name)
                            ce.a = static_cast<std::int32_t>(v);
                }
                break;
            }
            case Expr::Kind::unary:
                ce.op = e.unary_op == UnaryOp::negate ? CExpr::Op::neg : CExpr::Op::lnot;
                ce.a = compile_expr(chart, def, *e.lhs, params);
                break;
            case Expr::Kind::binary: {
                switch (e.binary_op) {
                    case BinaryOp::add: ce.op = CExpr::Op::add; break;
                    case BinaryOp::sub: ce.op = CExpr::Op::sub; break;
                    case BinaryOp::lt: ce.op = CExpr::Op::lt; break;
                    case BinaryOp::le: ce.op = CExpr::Op::le; break;
                    case BinaryOp::gt: ce.op = CExpr::Op::gt; break;
                    case BinaryOp::ge: ce.op = CExpr::Op::ge; break;
                    case BinaryOp::eq: ce.op = CExpr::Op::eq; break;
                    case BinaryOp::ne: ce.op = CExpr::Op::ne; break;
                    case BinaryOp::logical_and: ce.op = CExpr::Op::land; break;
                    case BinaryOp::logical_or: ce.op = CExpr::Op::lor; break;
                }
                ce.a = compile_expr(chart, def, *e.lhs, params);
                ce.b = compile_expr(chart, def, *e.rhs, params);
                break;
            }
        }
        chart.pool.push_back(ce);
        return static_cast<std::int32_t>(chart.pool.size() - 1);
    }

    // ---- execution ----
    static Value eval(const std::vector<CExpr>& pool, std::int32_t idx, const Value* vars,
                      const Value* params) {
        const CExpr& e = pool[idx];
        switch (e.op) {
            case CExpr::Op::lit: return e.value;
            case CExpr::Op::var: return vars[e.a];
            case CExpr::Op::param: return params[e.a];
            case CExpr::Op::neg: return -eval(pool, e.a, vars, params);
            case CExpr::Op::lnot: return eval(pool, e.a, vars, params) ? 0 : 1;
            case CExpr::Op::add:
                return eval(pool, e.a, vars, params) + eval(pool, e.b, vars, params);
            case CExpr::Op::sub:
                return eval(pool, e.a, vars, params) - eval(pool, e.b, vars, params);
            case CExpr::Op::lt:
                return eval(pool, e.a, vars, params) < eval(pool, e.b, vars, params) ? 1 : 0;
            case CExpr::Op::le:
                return eval(pool, e.a, vars, params) <= eval(pool, e.b, vars, params) ? 1 : 0;
            case CExpr::Op::gt:
                return eval(pool, e.a, vars, params) > eval(pool, e.b, vars, params) ? 1 : 0;
            case CExpr::Op::ge:
                return eval(pool, e.a, vars, params) >= eval(pool, e.b, vars, params) ? 1 : 0;
            case CExpr::Op::eq:
                return eval(pool, e.a, vars, params) == eval(pool, e.b, vars, params) ? 1 : 0;
            case CExpr::Op::ne:
                return eval(pool, e.a, vars, params) != eval(pool, e.b, vars, params) ? 1 : 0;
            case CExpr::Op::land:
                return (eval(pool, e.a, vars, params) && eval(pool, e.b, vars, params)) ? 1 : 0;
            case CExpr::Op::lor:
                return (eval(pool, e.a, vars, params) || eval(pool, e.b, vars, params)) ? 1 : 0;
        }
        return 0;
    }

    void deliver(SystemState& state, const EventInstance& ev) const {
        auto it = external_in_.find(std::make_pair(ev.port, ev.event));
        if (it == external_in_.end())
            throw ModelError("unknown port or event '" + ev.port + "." + ev.event +
                             "' at the system boundary");
        std::int32_t slot = it->second;
        // locate owning instance to validate and store arguments
        const Instance* owner = nullptr;
        for (const auto& inst : instances_) {
            const Chart& chart = charts_[inst.chart];
            if (slot >= inst.slot_base &&
                slot < inst.slot_base + static_cast<std::int32_t>(chart.in_slots.size())) {
                owner = &inst;
                break;
            }
        }
        const SlotMeta& meta = charts_[owner->chart].in_slots[slot - owner->slot_base];
        if (ev.args.size() != meta.types.size())
            throw ModelError("event '" + ev.port + "." + ev.event + "' expects " +
                             std::to_string(meta.types.size()) + " argument(s), got " +
                             std::to_string(ev.args.size()));
        for (std::size_t i = 0; i < ev.args.size(); ++i) {
            if (meta.types[i] == ScalarType::boolean && ev.args[i] != 0 && ev.args[i] != 1)
                throw ModelError("argument " + std::to_string(i) + " of '" + ev.port + "." +
                                 ev.event + "' must be boolean");
            state.args[owner->arg_base + meta.arg_offset + i] = ev.args[i];
        }
        state.present[slot] = 1;  // sampled, not queued: repeats overwrite
    }

    void run_all(SystemState& state, ExecScratch& scratch, CycleResult* result) const {
        scratch.sampled.assign(static_cast<std::size_t>(max_slot_count_), 0);
        scratch.sampled_args.assign(static_cast<std::size_t>(max_arg_count_), 0);
        scratch.consumed.assign(
            static_cast<std::size_t>(max_region_count_) * max_slot_count_, 0);
        for (std::int32_t idx : exec_order_) run_instance(state, idx, scratch, result);
    }

    void run_instance(SystemState& state, std::int32_t inst_idx, ExecScratch& scratch,
                      CycleResult* result) const {
        const Instance& inst = instances_[inst_idx];
        const Chart& chart = charts_[inst.chart];
        const auto n_slots = static_cast<std::int32_t>(chart.in_slots.size());
        const auto n_regions = static_cast<std::int32_t>(chart.regions.size());

        // Sample: move pending signals into a local view; the shared buffer
        // empties so that signals raised later this cycle wait for the next
        // execution of this instance.
        for (std::int32_t s = 0; s < n_slots; ++s) {
            scratch.sampled[s] = state.present[inst.slot_base + s];
            state.present[inst.slot_base + s] = 0;
        }
        for (std::int32_t a = 0; a < chart.total_args; ++a)
            scratch.sampled_args[a] = state.args[inst.arg_base + a];
        std::fill(scratch.consumed.begin(),
                  scratch.consumed.begin() + static_cast<std::size_t>(n_regions) * n_slots, 0);

        Value* vars = state.vars.data() + inst.var_base;
        int steps = 0;
        for (;;) {
            bool fired = false;
            for (std::int32_t r = 0; r < n_regions; ++r) {
                const CRegion& region = chart.regions[r];
                std::int32_t& active = state.active[inst.region_base + r];
                const CState& current = region.states[active];
                for (const CTransition& tr : current.transitions) {
                    const Value* params = nullptr;
                    if (tr.trigger_slot >= 0) {
                        if (!scratch.sampled[tr.trigger_slot]) continue;
                        if (scratch.consumed[r * n_slots + tr.trigger_slot]) continue;
                        params = scratch.sampled_args.data() +
                                 chart.in_slots[tr.trigger_slot].arg_offset;
                    }
                    if (tr.guard >= 0 && !eval(chart.pool, tr.guard, vars, params)) continue;

                    if (tr.trigger_slot >= 0) scratch.consumed[r * n_slots + tr.trigger_slot] = 1;
                    FiredTransition* trace = nullptr;
                    if (result) {
                        result->fired_transitions.push_back(
                            {inst.name, region.name, current.name,
                             region.states[tr.target].name, {}});
                        trace = &result->fired_transitions.back();
                    }
                    for (const CAction& action : tr.actions)
                        run_action(state, inst, chart, action, vars, params, result, trace);
                    active = tr.target;
                    for (const CAction& action : region.states[active].entry)
                        run_action(state, inst, chart, action, vars, nullptr, result, trace);
                    fired = true;
                    break;  // next region; re-examine this one next micro-step
                }
            }
            if (!fired) break;
            if (++steps > kRunToCompletionCap)
                throw SimulationError(
                    "run-to-completion cap exceeded in instance '" + inst.name +
                    "' (modeling livelock)");
        }
    }

    void run_action(SystemState& state, const Instance& inst, const Chart& chart,
                    const CAction& action, Value* vars, const Value* params,
                    CycleResult* result, FiredTransition* trace) const {
        if (action.kind == CAction::Kind::assign) {
            vars[action.var] = eval(chart.pool, action.expr, vars, params);
            return;
        }
        const OutRoute& route = out_routes_[&inst - instances_.data()][action.out_slot];
        const SlotMeta& meta = chart.out_slots[action.out_slot];
        if (trace) trace->raised.push_back(meta.port + "." + meta.event);
        for (const auto& [slot, arg_offset] : route.targets) {
            state.present[slot] = 1;
            for (std::size_t i = 0; i < action.args.size(); ++i)
                state.args[arg_offset + static_cast<std::int32_t>(i)] =
                    eval(chart.pool, action.args[i], vars, params);
        }
        if (result) {
            for (std::int32_t sink : route.sinks) {
                EventInstance out;
                out.port = system_sinks_[sink].first;
                out.event = system_sinks_[sink].second;
                for (auto arg : action.args)
                    out.args.push_back(eval(chart.pool, arg, vars, params));
                result->system_outputs.push_back(std::move(out));
            }
        }
    }

    const Instance& find_instance(const std::string& name) const {
        auto it = instance_index_.find(name);
        if (it == instance_index_.end()) throw ModelError("unknown instance '" + name + "'");
        return instances_[it->second];
    }

    std::string name_;
    std::vector<Chart> charts_;
    std::vector<Instance> instances_;
    std::map<std::string, std::int32_t> instance_index_;
    std::vector<std::int32_t> exec_order_;
    std::vector<std::vector<OutRoute>> out_routes_;
    std::map<std::pair<std::string, std::string>, std::int32_t> external_in_;
    std::vector<std::pair<std::string, std::string>> system_sinks_;
    std::int32_t eval_instance_ = -1;
    std::vector<EvalState> eval_states_;
    std::int32_t total_regions_ = 0;
    std::int32_t total_vars_ = 0;
    std::int32_t total_slots_ = 0;
    std::int32_t total_args_ = 0;
    std::int32_t max_region_count_ = 0;
    std::int32_t max_slot_count_ = 0;
    std::int32_t max_arg_count_ = 0;
};

// JSON-lines trace record for one fired transition. Identifiers in the model
// language are ASCII [A-Za-z0-9_], so no escaping is needed.
inline std::string trace_json_line(std::uint64_t cycle, const FiredTransition& t) {
    std::string s = "{\"cycle\":" + std::to_string(cycle) + ",\"instance\":\"" + t.instance +
                    "\",\"from\":\"" + t.from + "\",\"to\":\"" + t.to + "\",\"raised\":[";
    for (std::size_t i = 0; i < t.raised.size(); ++i) {
        if (i) s += ",";
        s += "\"" + t.raised[i] + "\"";
    }
    s += "]}";
    return s;
}

}  // namespace relsim
