#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "relsim/diagnostics.hpp"
#include "relsim/expr.hpp"

namespace relsim {

enum class EventDirection { in, out };
enum class PortMode { provides, requires_interface };

inline const char* to_string(EventDirection d) { return d == EventDirection::in ? "in" : "out"; }
inline const char* to_string(PortMode m) {
    return m == PortMode::provides ? "provides" : "requires";
}

// The two system failure modes recognized by the evaluation layer.
enum class FailureMode { loss_of_assist, self_steering };

inline const char* to_string(FailureMode m) {
    return m == FailureMode::loss_of_assist ? "LossOfAssist" : "SelfSteering";
}

inline std::optional<FailureMode> failure_mode_from_string(const std::string& s) {
    if (s == "LossOfAssist" || s == "loa") return FailureMode::loss_of_assist;
    if (s == "SelfSteering" || s == "ss") return FailureMode::self_steering;
    return std::nullopt;
}

struct EventParam {
    std::string name;
    ScalarType type = ScalarType::integer;
};

struct EventDecl {
    std::string name;
    EventDirection direction = EventDirection::out;
    std::vector<EventParam> params;
    SourcePos pos;
};

struct InterfaceDef {
    std::string name;
    std::vector<EventDecl> events;
    SourcePos pos;

    const EventDecl* find_event(const std::string& event) const {
        for (const auto& e : events)
            if (e.name == event) return &e;
        return nullptr;
    }
};

struct PortDef {
    std::string name;
    std::string interface;
    PortMode mode = PortMode::provides;
    SourcePos pos;

    // A required interface flips the declared event directions.
    EventDirection effective_direction(EventDirection declared) const {
        if (mode == PortMode::provides) return declared;
        return declared == EventDirection::in ? EventDirection::out : EventDirection::in;
    }
};

struct VariableDecl {
    std::string name;
    ScalarType type = ScalarType::integer;
    Value initial = 0;
    SourcePos pos;
};

struct Trigger {
    std::string port;
    std::string event;
};

struct Action {
    enum class Kind { assign, raise } kind = Kind::assign;
    // assign
    std::string variable;
    ExprPtr value;
    // raise
    std::string port;
    std::string event;
    std::vector<ExprPtr> args;
    SourcePos pos;
};

struct TransitionDef {
    std::optional<Trigger> trigger;  // absent = guard-only completion transition
    ExprPtr guard;                   // absent = always enabled
    std::vector<Action> actions;
    std::string target;
    SourcePos pos;
};

struct StateDef {
    std::string name;
    std::vector<Action> entry_actions;
    std::vector<TransitionDef> transitions;  // document order = priority order
    SourcePos pos;
};

struct Region {
    std::string name;
    std::string initial;  // may be empty in malformed input; validation flags it
    std::vector<StateDef> states;
    SourcePos pos;

    const StateDef* find_state(const std::string& name_) const {
        for (const auto& s : states)
            if (s.name == name_) return &s;
        return nullptr;
    }
};

struct StatechartDef {
    std::string name;
    std::vector<PortDef> ports;
    std::vector<VariableDecl> variables;
    std::vector<Region> regions;
    std::vector<std::string> imports;  // informational, resolved by the loader
    SourcePos pos;

    const PortDef* find_port(const std::string& port) const {
        for (const auto& p : ports)
            if (p.name == port) return &p;
        return nullptr;
    }
    const VariableDecl* find_variable(const std::string& var) const {
        for (const auto& v : variables)
            if (v.name == var) return &v;
        return nullptr;
    }
};

struct InstanceDecl {
    std::string name;
    std::string statechart;
    SourcePos pos;
};

struct PortBinding {
    std::string system_port;
    std::string instance;
    std::string port;
    SourcePos pos;
};

struct Channel {
    std::string source_instance;
    std::string source_port;  // provided realization
    std::string target_instance;
    std::string target_port;  // required realization
    SourcePos pos;
};

// Names the instance whose active state decides system failure, and which of
// its states mean which failure mode.
struct EvaluationDecl {
    std::string instance;
    std::vector<std::pair<std::string, FailureMode>> failure_states;
    SourcePos pos;
};

struct CompositeDef {
    std::string name;
    std::vector<PortDef> system_ports;
    std::vector<InstanceDecl> instances;
    std::vector<PortBinding> bindings;
    std::vector<Channel> channels;
    std::vector<std::string> execution_list;  // empty = instantiation order
    std::optional<EvaluationDecl> evaluation;
    std::vector<std::string> imports;
    SourcePos pos;

    const InstanceDecl* find_instance(const std::string& name_) const {
        for (const auto& i : instances)
            if (i.name == name_) return &i;
        return nullptr;
    }
    const PortDef* find_system_port(const std::string& name_) const {
        for (const auto& p : system_ports)
            if (p.name == name_) return &p;
        return nullptr;
    }
    std::vector<std::string> execution_order() const {
        if (!execution_list.empty()) return execution_list;
        std::vector<std::string> order;
        order.reserve(instances.size());
        for (const auto& i : instances) order.push_back(i.name);
        return order;
    }
};

// Parsed definitions addressable by name. Statechart port interfaces resolve
// against `interfaces`; composite instances resolve against `statecharts`.
struct ModelLibrary {
    std::map<std::string, InterfaceDef> interfaces;
    std::map<std::string, StatechartDef> statecharts;

    const InterfaceDef* find_interface(const std::string& name) const {
        auto it = interfaces.find(name);
        return it == interfaces.end() ? nullptr : &it->second;
    }
    const StatechartDef* find_statechart(const std::string& name) const {
        auto it = statecharts.find(name);
        return it == statecharts.end() ? nullptr : &it->second;
    }
};

// ---------------------------------------------------------------------------
// Structural equality (source positions and import lists do not participate).

inline bool structurally_equal(const EventDecl& a, const EventDecl& b) {
    if (a.name != b.name || a.direction != b.direction || a.params.size() != b.params.size())
        return false;
    for (std::size_t i = 0; i < a.params.size(); ++i)
        if (a.params[i].name != b.params[i].name || a.params[i].type != b.params[i].type)
            return false;
    return true;
}

inline bool structurally_equal(const InterfaceDef& a, const InterfaceDef& b) {
    if (a.name != b.name || a.events.size() != b.events.size()) return false;
    for (std::size_t i = 0; i < a.events.size(); ++i)
        if (!structurally_equal(a.events[i], b.events[i])) return false;
    return true;
}

inline bool structurally_equal(const std::vector<InterfaceDef>& a,
                               const std::vector<InterfaceDef>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!structurally_equal(a[i], b[i])) return false;
    return true;
}

inline bool structurally_equal(const PortDef& a, const PortDef& b) {
    return a.name == b.name && a.interface == b.interface && a.mode == b.mode;
}

inline bool structurally_equal(const Action& a, const Action& b) {
    if (a.kind != b.kind) return false;
    if (a.kind == Action::Kind::assign)
        return a.variable == b.variable && expr_equal(a.value, b.value);
    if (a.port != b.port || a.event != b.event || a.args.size() != b.args.size()) return false;
    for (std::size_t i = 0; i < a.args.size(); ++i)
        if (!expr_equal(a.args[i], b.args[i])) return false;
    return true;
}

inline bool structurally_equal(const TransitionDef& a, const TransitionDef& b) {
    if (a.trigger.has_value() != b.trigger.has_value()) return false;
    if (a.trigger && (a.trigger->port != b.trigger->port || a.trigger->event != b.trigger->event))
        return false;
    if (!expr_equal(a.guard, b.guard)) return false;
    if (a.actions.size() != b.actions.size() || a.target != b.target) return false;
    for (std::size_t i = 0; i < a.actions.size(); ++i)
        if (!structurally_equal(a.actions[i], b.actions[i])) return false;
    return true;
}

inline bool structurally_equal(const StateDef& a, const StateDef& b) {
    if (a.name != b.name || a.entry_actions.size() != b.entry_actions.size() ||
        a.transitions.size() != b.transitions.size())
        return false;
    for (std::size_t i = 0; i < a.entry_actions.size(); ++i)
        if (!structurally_equal(a.entry_actions[i], b.entry_actions[i])) return false;
    for (std::size_t i = 0; i < a.transitions.size(); ++i)
        if (!structurally_equal(a.transitions[i], b.transitions[i])) return false;
    return true;
}

inline bool structurally_equal(const Region& a, const Region& b) {
    if (a.name != b.name || a.initial != b.initial || a.states.size() != b.states.size())
        return false;
    for (std::size_t i = 0; i < a.states.size(); ++i)
        if (!structurally_equal(a.states[i], b.states[i])) return false;
    return true;
}

inline bool structurally_equal(const StatechartDef& a, const StatechartDef& b) {
    if (a.name != b.name || a.ports.size() != b.ports.size() ||
        a.variables.size() != b.variables.size() || a.regions.size() != b.regions.size())
        return false;
    for (std::size_t i = 0; i < a.ports.size(); ++i)
        if (!structurally_equal(a.ports[i], b.ports[i])) return false;
    for (std::size_t i = 0; i < a.variables.size(); ++i) {
        const auto& va = a.variables[i];
        const auto& vb = b.variables[i];
        if (va.name != vb.name || va.type != vb.type || va.initial != vb.initial) return false;
    }
    for (std::size_t i = 0; i < a.regions.size(); ++i)
        if (!structurally_equal(a.regions[i], b.regions[i])) return false;
    return true;
}

inline bool structurally_equal(const CompositeDef& a, const CompositeDef& b) {
    if (a.name != b.name || a.system_ports.size() != b.system_ports.size() ||
        a.instances.size() != b.instances.size() || a.bindings.size() != b.bindings.size() ||
        a.channels.size() != b.channels.size() || a.execution_list != b.execution_list ||
        a.evaluation.has_value() != b.evaluation.has_value())
        return false;
    for (std::size_t i = 0; i < a.system_ports.size(); ++i)
        if (!structurally_equal(a.system_ports[i], b.system_ports[i])) return false;
    for (std::size_t i = 0; i < a.instances.size(); ++i)
        if (a.instances[i].name != b.instances[i].name ||
            a.instances[i].statechart != b.instances[i].statechart)
            return false;
    for (std::size_t i = 0; i < a.bindings.size(); ++i) {
        const auto& x = a.bindings[i];
        const auto& y = b.bindings[i];
        if (x.system_port != y.system_port || x.instance != y.instance || x.port != y.port)
            return false;
    }
    for (std::size_t i = 0; i < a.channels.size(); ++i) {
        const auto& x = a.channels[i];
        const auto& y = b.channels[i];
        if (x.source_instance != y.source_instance || x.source_port != y.source_port ||
            x.target_instance != y.target_instance || x.target_port != y.target_port)
            return false;
    }
    if (a.evaluation) {
        if (a.evaluation->instance != b.evaluation->instance ||
            a.evaluation->failure_states != b.evaluation->failure_states)
            return false;
    }
    return true;
}

}  // namespace relsim
