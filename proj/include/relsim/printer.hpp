#pragma once

#include <sstream>
#include <string>

#include "relsim/model.hpp"

namespace relsim {
namespace detail {

inline int expr_precedence(const Expr& e) {
    switch (e.kind) {
        case Expr::Kind::literal:
        case Expr::Kind::name_ref: return 6;
        case Expr::Kind::unary: return 5;
        case Expr::Kind::binary:
            switch (e.binary_op) {
                case BinaryOp::add:
                case BinaryOp::sub: return 4;
                case BinaryOp::lt:
                case BinaryOp::le:
                case BinaryOp::gt:
                case BinaryOp::ge:
                case BinaryOp::eq:
                case BinaryOp::ne: return 3;
                case BinaryOp::logical_and: return 2;
                case BinaryOp::logical_or: return 1;
            }
    }
    return 6;
}

inline void print_expr(std::ostream& os, const Expr& e, int parent_prec, bool right_operand) {
    int prec = expr_precedence(e);
    // Equal precedence needs parentheses on the right of left-associative
    // operators and on both sides of the non-associative comparisons.
    bool parens = prec < parent_prec || (prec == parent_prec && (right_operand || prec == 3));
    if (parens) os << "(";
    switch (e.kind) {
        case Expr::Kind::literal:
            if (e.literal_type == ScalarType::boolean)
                os << (e.value ? "true" : "false");
            else
                os << e.value;
            break;
        case Expr::Kind::name_ref: os << e.name; break;
        case Expr::Kind::unary:
            os << (e.unary_op == UnaryOp::negate ? "-" : "!");
            print_expr(os, *e.lhs, prec, false);
            break;
        case Expr::Kind::binary:
            print_expr(os, *e.lhs, prec, false);
            os << " " << to_string(e.binary_op) << " ";
            print_expr(os, *e.rhs, prec, true);
            break;
    }
    if (parens) os << ")";
}

inline void print_expr(std::ostream& os, const Expr& e) { print_expr(os, e, 0, false); }

inline void print_action(std::ostream& os, const Action& a) {
    if (a.kind == Action::Kind::assign) {
        os << a.variable << " := ";
        print_expr(os, *a.value);
        return;
    }
    os << "raise " << a.port << "." << a.event;
    if (!a.args.empty()) {
        os << "(";
        for (std::size_t i = 0; i < a.args.size(); ++i) {
            if (i) os << ", ";
            print_expr(os, *a.args[i]);
        }
        os << ")";
    }
}

inline void print_actions(std::ostream& os, const std::vector<Action>& actions) {
    for (std::size_t i = 0; i < actions.size(); ++i) {
        if (i) os << "; ";
        print_action(os, actions[i]);
    }
}

inline void print_port(std::ostream& os, const PortDef& p, const char* indent) {
    os << indent << "port " << p.name << ": " << to_string(p.mode) << " " << p.interface
       << "\n";
}

}  // namespace detail

inline std::string pretty_print(const std::vector<InterfaceDef>& interfaces) {
    std::ostringstream os;
    for (std::size_t i = 0; i < interfaces.size(); ++i) {
        if (i) os << "\n";
        const auto& def = interfaces[i];
        os << "interface " << def.name << " {\n";
        for (const auto& e : def.events) {
            os << "    " << to_string(e.direction) << " event " << e.name;
            if (!e.params.empty()) {
                os << "(";
                for (std::size_t k = 0; k < e.params.size(); ++k) {
                    if (k) os << ", ";
                    os << e.params[k].name << ": " << to_string(e.params[k].type);
                }
                os << ")";
            }
            os << "\n";
        }
        os << "}\n";
    }
    return os.str();
}

inline std::string pretty_print(const StatechartDef& def) {
    std::ostringstream os;
    os << "statechart " << def.name << " [\n";
    for (const auto& p : def.ports) detail::print_port(os, p, "    ");
    os << "] {\n";
    for (const auto& v : def.variables) {
        os << "    var " << v.name << ": " << to_string(v.type) << " := ";
        if (v.type == ScalarType::boolean)
            os << (v.initial ? "true" : "false");
        else
            os << v.initial;
        os << "\n";
    }
    for (const auto& region : def.regions) {
        os << "    region " << region.name << " {\n";
        if (!region.initial.empty()) os << "        initial " << region.initial << "\n";
        for (const auto& state : region.states) {
            os << "        state " << state.name << " {\n";
            if (!state.entry_actions.empty()) {
                os << "            entry / ";
                detail::print_actions(os, state.entry_actions);
                os << "\n";
            }
            for (const auto& tr : state.transitions) {
                os << "            ";
                if (tr.trigger) os << "on " << tr.trigger->port << "." << tr.trigger->event;
                if (tr.guard) {
                    if (tr.trigger) os << " ";
                    os << "[";
                    detail::print_expr(os, *tr.guard);
                    os << "]";
                }
                if (!tr.actions.empty()) {
                    os << " / ";
                    detail::print_actions(os, tr.actions);
                }
                os << " -> " << tr.target << "\n";
            }
            os << "        }\n";
        }
        os << "    }\n";
    }
    os << "}\n";
    return os.str();
}

inline std::string pretty_print(const CompositeDef& def) {
    std::ostringstream os;
    os << "cascade " << def.name << " [\n";
    for (const auto& p : def.system_ports) detail::print_port(os, p, "    ");
    os << "] {\n";
    for (const auto& inst : def.instances)
        os << "    component " << inst.name << ": " << inst.statechart << "\n";
    for (const auto& b : def.bindings)
        os << "    bind " << b.system_port << "->" << b.instance << "." << b.port << "\n";
    for (const auto& c : def.channels)
        os << "    channel [" << c.source_instance << "." << c.source_port << "] -o)- ["
           << c.target_instance << "." << c.target_port << "]\n";
    if (!def.execution_list.empty()) {
        os << "    execution ";
        for (std::size_t i = 0; i < def.execution_list.size(); ++i) {
            if (i) os << ", ";
            os << def.execution_list[i];
        }
        os << "\n";
    }
    if (def.evaluation) {
        os << "    evaluation " << def.evaluation->instance << " {\n";
        for (const auto& [state, mode] : def.evaluation->failure_states)
            os << "        " << state << " -> " << to_string(mode) << "\n";
        os << "    }\n";
    }
    os << "}\n";
    return os.str();
}

}  // namespace relsim
