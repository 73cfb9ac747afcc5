#pragma once

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "relsim/model.hpp"

namespace relsim {
namespace detail {

// name -> type scope for guards and action expressions; trigger parameters
// shadow chart variables.
struct ExprScope {
    const StatechartDef* chart = nullptr;
    const std::vector<EventParam>* params = nullptr;

    std::optional<ScalarType> lookup(const std::string& name) const {
        if (params) {
            for (const auto& p : *params)
                if (p.name == name) return p.type;
        }
        if (chart) {
            if (const VariableDecl* v = chart->find_variable(name)) return v->type;
        }
        return std::nullopt;
    }
};

inline std::optional<ScalarType> type_of(const Expr& e, const ExprScope& scope,
                                         const std::string& path, ValidationReport& report) {
    auto mismatch = [&](const std::string& msg) -> std::optional<ScalarType> {
        report.push_back({path, e.pos, msg});
        return std::nullopt;
    };
    switch (e.kind) {
        case Expr::Kind::literal: return e.literal_type;
        case Expr::Kind::name_ref: {
            auto t = scope.lookup(e.name);
            if (!t) return mismatch("unresolved name '" + e.name + "'");
            return t;
        }
        case Expr::Kind::unary: {
            auto t = type_of(*e.lhs, scope, path, report);
            if (!t) return std::nullopt;
            if (e.unary_op == UnaryOp::negate) {
                if (*t != ScalarType::integer) return mismatch("operand of '-' must be integer");
                return ScalarType::integer;
            }
            if (*t != ScalarType::boolean) return mismatch("operand of '!' must be boolean");
            return ScalarType::boolean;
        }
        case Expr::Kind::binary: {
            auto lt = type_of(*e.lhs, scope, path, report);
            auto rt = type_of(*e.rhs, scope, path, report);
            if (!lt || !rt) return std::nullopt;
            switch (e.binary_op) {
                case BinaryOp::add:
                case BinaryOp::sub:
                    if (*lt != ScalarType::integer || *rt != ScalarType::integer)
                        return mismatch(std::string("operands of '") + to_string(e.binary_op) +
                                        "' must be integer");
                    return ScalarType::integer;
                case BinaryOp::lt:
                case BinaryOp::le:
                case BinaryOp::gt:
                case BinaryOp::ge:
                    if (*lt != ScalarType::integer || *rt != ScalarType::integer)
                        return mismatch(std::string("operands of '") + to_string(e.binary_op) +
                                        "' must be integer");
                    return ScalarType::boolean;
                case BinaryOp::eq:
                case BinaryOp::ne:
                    if (*lt != *rt)
                        return mismatch("comparison of mismatched types");
                    return ScalarType::boolean;
                case BinaryOp::logical_and:
                case BinaryOp::logical_or:
                    if (*lt != ScalarType::boolean || *rt != ScalarType::boolean)
                        return mismatch(std::string("operands of '") + to_string(e.binary_op) +
                                        "' must be boolean");
                    return ScalarType::boolean;
            }
            return std::nullopt;
        }
    }
    return std::nullopt;
}

inline void check_actions(const StatechartDef& chart, const ModelLibrary& library,
                          const std::vector<Action>& actions, const ExprScope& scope,
                          const std::string& path, ValidationReport& report) {
    for (const auto& action : actions) {
        if (action.kind == Action::Kind::assign) {
            const VariableDecl* var = chart.find_variable(action.variable);
            if (!var) {
                report.push_back({path, action.pos,
                                  "assignment to unresolved variable '" + action.variable + "'"});
                continue;
            }
            auto t = type_of(*action.value, scope, path, report);
            if (t && *t != var->type)
                report.push_back({path, action.pos,
                                  "assignment to '" + var->name + "' has type " +
                                      to_string(*t) + ", expected " + to_string(var->type)});
            continue;
        }
        const PortDef* port = chart.find_port(action.port);
        if (!port) {
            report.push_back({path, action.pos, "raise on unresolved port '" + action.port + "'"});
            continue;
        }
        const InterfaceDef* iface = library.find_interface(port->interface);
        if (!iface) {
            report.push_back(
                {path, action.pos, "port '" + port->name + "' has unresolved interface '" +
                                       port->interface + "'"});
            continue;
        }
        const EventDecl* event = iface->find_event(action.event);
        if (!event) {
            report.push_back({path, action.pos,
                              "unresolved event '" + action.event + "' on interface '" +
                                  iface->name + "'"});
            continue;
        }
        if (port->effective_direction(event->direction) != EventDirection::out) {
            report.push_back({path, action.pos,
                              "event '" + action.event + "' is not an output on port '" +
                                  port->name + "'"});
            continue;
        }
        if (action.args.size() != event->params.size()) {
            report.push_back({path, action.pos,
                              "event '" + action.event + "' expects " +
                                  std::to_string(event->params.size()) + " argument(s), got " +
                                  std::to_string(action.args.size())});
            continue;
        }
        for (std::size_t i = 0; i < action.args.size(); ++i) {
            auto t = type_of(*action.args[i], scope, path, report);
            if (t && *t != event->params[i].type)
                report.push_back({path, action.pos,
                                  "argument '" + event->params[i].name + "' has type " +
                                      to_string(*t) + ", expected " +
                                      to_string(event->params[i].type)});
        }
    }
}

}  // namespace detail

// Checks every structural invariant of a statechart definition. An empty
// report means the chart is well-formed and can be compiled for execution.
inline ValidationReport validate_statechart(const StatechartDef& def,
                                            const ModelLibrary& library) {
    ValidationReport report;
    const std::string base = def.name;

    std::set<std::string> port_names;
    for (const auto& port : def.ports) {
        if (!port_names.insert(port.name).second)
            report.push_back({base, port.pos, "duplicate port '" + port.name + "'"});
        if (!library.find_interface(port.interface))
            report.push_back({base, port.pos,
                              "port '" + port.name + "' references unresolved interface '" +
                                  port.interface + "'"});
    }
    std::set<std::string> var_names;
    for (const auto& var : def.variables) {
        if (!var_names.insert(var.name).second)
            report.push_back({base, var.pos, "duplicate variable '" + var.name + "'"});
        if (var.type == ScalarType::boolean && var.initial != 0 && var.initial != 1)
            report.push_back({base, var.pos,
                              "boolean variable '" + var.name + "' initialized to non-boolean"});
    }

    if (def.regions.empty()) report.push_back({base, def.pos, "statechart has no regions"});
    std::set<std::string> region_names;
    for (const auto& region : def.regions) {
        const std::string rpath = base + "/" + region.name;
        if (!region_names.insert(region.name).second)
            report.push_back({base, region.pos, "duplicate region '" + region.name + "'"});
        std::set<std::string> state_names;
        for (const auto& state : region.states)
            if (!state_names.insert(state.name).second)
                report.push_back({rpath, state.pos, "duplicate state '" + state.name + "'"});
        if (region.initial.empty() || region.states.empty()) {
            report.push_back({rpath, region.pos, "region has no initial state"});
        } else if (!region.find_state(region.initial)) {
            report.push_back(
                {rpath, region.pos, "unresolved initial state '" + region.initial + "'"});
        }
        for (const auto& state : region.states) {
            const std::string spath = rpath + "/" + state.name;
            detail::ExprScope entry_scope{&def, nullptr};
            detail::check_actions(def, library, state.entry_actions, entry_scope, spath, report);
            int index = 0;
            for (const auto& tr : state.transitions) {
                const std::string tpath = spath + "/transition#" + std::to_string(index++);
                const std::vector<EventParam>* params = nullptr;
                if (tr.trigger) {
                    const PortDef* port = def.find_port(tr.trigger->port);
                    if (!port) {
                        report.push_back({tpath, tr.pos,
                                          "unresolved port '" + tr.trigger->port + "'"});
                    } else if (const InterfaceDef* iface = library.find_interface(port->interface)) {
                        const EventDecl* event = iface->find_event(tr.trigger->event);
                        if (!event) {
                            report.push_back({tpath, tr.pos,
                                              "unresolved event '" + tr.trigger->event +
                                                  "' on interface '" + iface->name + "'"});
                        } else if (port->effective_direction(event->direction) !=
                                   EventDirection::in) {
                            report.push_back({tpath, tr.pos,
                                              "trigger event '" + tr.trigger->event +
                                                  "' is not an input on port '" + port->name +
                                                  "'"});
                        } else {
                            params = &event->params;
                        }
                    }
                }
                detail::ExprScope scope{&def, params};
                if (tr.guard) {
                    auto t = detail::type_of(*tr.guard, scope, tpath, report);
                    if (t && *t != ScalarType::boolean)
                        report.push_back({tpath, tr.pos, "guard is not boolean"});
                }
                detail::check_actions(def, library, tr.actions, scope, tpath, report);
                if (!region.find_state(tr.target))
                    report.push_back(
                        {tpath, tr.pos, "unresolved target state '" + tr.target + "'"});
            }
        }
    }
    return report;
}

// Checks composite-level invariants: instance resolution, channel interface
// compatibility, binding uniqueness, evaluation declaration consistency.
// Assumes nothing about the referenced charts beyond their declared ports.
inline ValidationReport validate_composite(const CompositeDef& def,
                                           const ModelLibrary& library) {
    ValidationReport report;
    const std::string base = def.name;

    std::set<std::string> port_names;
    for (const auto& port : def.system_ports) {
        if (!port_names.insert(port.name).second)
            report.push_back({base, port.pos, "duplicate system port '" + port.name + "'"});
        if (!library.find_interface(port.interface))
            report.push_back({base, port.pos,
                              "system port '" + port.name + "' references unresolved interface '" +
                                  port.interface + "'"});
    }
    std::set<std::string> instance_names;
    for (const auto& inst : def.instances) {
        if (!instance_names.insert(inst.name).second)
            report.push_back({base, inst.pos, "duplicate instance '" + inst.name + "'"});
        if (!library.find_statechart(inst.statechart))
            report.push_back({base, inst.pos,
                              "instance '" + inst.name + "' references unknown statechart '" +
                                  inst.statechart + "'"});
    }

    auto instance_port = [&](const std::string& instance,
                             const std::string& port) -> const PortDef* {
        const InstanceDecl* inst = def.find_instance(instance);
        if (!inst) return nullptr;
        const StatechartDef* chart = library.find_statechart(inst->statechart);
        if (!chart) return nullptr;
        return chart->find_port(port);
    };

    std::map<std::string, int> binding_counts;
    int index = 0;
    for (const auto& binding : def.bindings) {
        const std::string bpath = base + "/bind#" + std::to_string(index++);
        const PortDef* system_port = def.find_system_port(binding.system_port);
        if (!system_port) {
            report.push_back(
                {bpath, binding.pos, "unresolved system port '" + binding.system_port + "'"});
            continue;
        }
        ++binding_counts[binding.system_port];
        if (!def.find_instance(binding.instance)) {
            report.push_back(
                {bpath, binding.pos, "unresolved instance '" + binding.instance + "'"});
            continue;
        }
        const PortDef* port = instance_port(binding.instance, binding.port);
        if (!port) {
            report.push_back({bpath, binding.pos,
                              "unresolved port '" + binding.instance + "." + binding.port + "'"});
            continue;
        }
        if (port->interface != system_port->interface) {
            report.push_back({bpath, binding.pos,
                              "interface mismatch: system port '" + binding.system_port +
                                  "' realizes '" + system_port->interface + "', instance port '" +
                                  binding.instance + "." + binding.port + "' realizes '" +
                                  port->interface + "'"});
            continue;
        }
        if (port->mode != system_port->mode)
            report.push_back({bpath, binding.pos,
                              "mode mismatch: system port '" + binding.system_port + "' is " +
                                  to_string(system_port->mode) + ", instance port is " +
                                  to_string(port->mode)});
    }
    for (const auto& port : def.system_ports) {
        auto it = binding_counts.find(port.name);
        int count = it == binding_counts.end() ? 0 : it->second;
        if (count == 0)
            report.push_back({base, port.pos, "system port '" + port.name + "' is not bound"});
        else if (count > 1)
            report.push_back({base, port.pos,
                              "system port '" + port.name + "' bound " + std::to_string(count) +
                                  " times"});
    }

    index = 0;
    std::set<std::pair<std::string, std::string>> seen_channels;
    for (const auto& channel : def.channels) {
        const std::string cpath = base + "/channel#" + std::to_string(index++);
        const PortDef* source = instance_port(channel.source_instance, channel.source_port);
        const PortDef* target = instance_port(channel.target_instance, channel.target_port);
        if (!def.find_instance(channel.source_instance))
            report.push_back({cpath, channel.pos,
                              "unresolved instance '" + channel.source_instance + "'"});
        else if (!source)
            report.push_back({cpath, channel.pos,
                              "unresolved port '" + channel.source_instance + "." +
                                  channel.source_port + "'"});
        if (!def.find_instance(channel.target_instance))
            report.push_back({cpath, channel.pos,
                              "unresolved instance '" + channel.target_instance + "'"});
        else if (!target)
            report.push_back({cpath, channel.pos,
                              "unresolved port '" + channel.target_instance + "." +
                                  channel.target_port + "'"});
        if (!source || !target) continue;
        if (source->mode != PortMode::provides || target->mode != PortMode::requires_interface) {
            report.push_back({cpath, channel.pos, "channel must join provided and required"});
            continue;
        }
        if (source->interface != target->interface) {
            report.push_back({cpath, channel.pos,
                              "interface mismatch: '" + channel.source_instance + "." +
                                  channel.source_port + "' realizes '" + source->interface +
                                  "', '" + channel.target_instance + "." + channel.target_port +
                                  "' realizes '" + target->interface + "'"});
            continue;
        }
        auto key = std::make_pair(channel.source_instance + "." + channel.source_port,
                                  channel.target_instance + "." + channel.target_port);
        if (!seen_channels.insert(key).second)
            report.push_back({cpath, channel.pos, "duplicate channel"});
    }

    for (const auto& name : def.execution_list)
        if (!def.find_instance(name))
            report.push_back({base + "/execution", def.pos,
                              "execution list references unresolved instance '" + name + "'"});

    if (def.evaluation) {
        const auto& eval = *def.evaluation;
        const std::string epath = base + "/evaluation";
        const InstanceDecl* inst = def.find_instance(eval.instance);
        if (!inst) {
            report.push_back({epath, eval.pos, "unresolved instance '" + eval.instance + "'"});
        } else if (const StatechartDef* chart = library.find_statechart(inst->statechart)) {
            std::set<std::string> seen;
            for (const auto& [state, mode] : eval.failure_states) {
                (void)mode;
                bool found = false;
                for (const auto& region : chart->regions)
                    if (region.find_state(state)) found = true;
                if (!found)
                    report.push_back({epath, eval.pos,
                                      "failure state '" + state + "' not found in statechart '" +
                                          chart->name + "'"});
                if (!seen.insert(state).second)
                    report.push_back({epath, eval.pos, "duplicate failure state '" + state + "'"});
            }
        }
    }
    return report;
}

// (instance, port, event) endpoint; an empty instance name denotes the
// system boundary (bound system ports).
struct Endpoint {
    std::string instance;
    std::string port;
    std::string event;

    auto operator<=>(const Endpoint&) const = default;

    bool is_system() const { return instance.empty(); }
    std::string str() const {
        return (is_system() ? "<system>" : instance) + "." + port + "." + event;
    }
};

// Static event routing of a composite: every out-direction endpoint maps to
// its receivers, and every bound system input maps to the instance port it
// feeds. Deterministic by construction (ordered map, declaration-ordered
// receiver lists).
struct RoutingTable {
    std::map<Endpoint, std::vector<Endpoint>> routes;

    const std::vector<Endpoint>* receivers(const Endpoint& source) const {
        auto it = routes.find(source);
        return it == routes.end() ? nullptr : &it->second;
    }
};

// Builds the routing table of a validated composite. Throws ModelError when
// the composite (or a referenced chart interface) does not validate.
inline RoutingTable build_routing_table(const CompositeDef& def, const ModelLibrary& library) {
    ValidationReport report = validate_composite(def, library);
    if (!report.empty())
        throw ModelError("build_routing_table: composite '" + def.name +
                         "' failed validation: " + format_diagnostic(report.front()));

    RoutingTable table;
    // Seed: one (possibly empty) entry per out-direction event per instance.
    for (const auto& inst : def.instances) {
        const StatechartDef* chart = library.find_statechart(inst.statechart);
        for (const auto& port : chart->ports) {
            const InterfaceDef* iface = library.find_interface(port.interface);
            if (!iface) continue;
            for (const auto& event : iface->events)
                if (port.effective_direction(event.direction) == EventDirection::out)
                    table.routes[{inst.name, port.name, event.name}];
        }
    }
    // Channels: provider events reach the required side.
    for (const auto& channel : def.channels) {
        const InstanceDecl* src = def.find_instance(channel.source_instance);
        const StatechartDef* chart = library.find_statechart(src->statechart);
        const PortDef* sport = chart->find_port(channel.source_port);
        const InterfaceDef* iface = library.find_interface(sport->interface);
        for (const auto& event : iface->events)
            if (sport->effective_direction(event.direction) == EventDirection::out)
                table.routes[{channel.source_instance, channel.source_port, event.name}]
                    .push_back({channel.target_instance, channel.target_port, event.name});
    }
    // Bindings: external sources for inputs, external sinks for outputs.
    for (const auto& binding : def.bindings) {
        const PortDef* system_port = def.find_system_port(binding.system_port);
        const InterfaceDef* iface = library.find_interface(system_port->interface);
        for (const auto& event : iface->events) {
            if (system_port->effective_direction(event.direction) == EventDirection::in) {
                table.routes[{"", binding.system_port, event.name}].push_back(
                    {binding.instance, binding.port, event.name});
            } else {
                table.routes[{binding.instance, binding.port, event.name}].push_back(
                    {"", binding.system_port, event.name});
            }
        }
    }
    return table;
}

}  // namespace relsim
