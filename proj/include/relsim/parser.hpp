#pragma once

#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include "relsim/lexer.hpp"
#include "relsim/model.hpp"

namespace relsim {

enum class SourceKind { interfaces, statechart, composite, fault_table };

// One loadable file. Kind comes from the top-level keyword (interface /
// statechart / cascade); fault tables are recognized by their extension.
struct SourceUnit {
    std::string path;
    SourceKind kind = SourceKind::interfaces;
    std::string text;
};

namespace detail {

inline std::string first_toplevel_keyword(std::string_view text) {
    std::size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            ++i;
            continue;
        }
        if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
            while (i < text.size() && text[i] != '\n') ++i;
            continue;
        }
        std::size_t start = i;
        while (i < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_'))
            ++i;
        if (i == start) return "";
        std::string word(text.substr(start, i - start));
        // Skip over the unit header; the defining keyword follows it.
        if (word == "package" || word == "import") {
            // consume the rest of the line (package name / import path)
            while (i < text.size() && text[i] != '\n') ++i;
            continue;
        }
        return word;
    }
    return "";
}

inline bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() &&
           s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace detail

inline SourceUnit make_source_unit(std::string path, std::string text) {
    SourceUnit unit;
    unit.path = std::move(path);
    unit.text = std::move(text);
    if (detail::ends_with(unit.path, ".faults.csv")) {
        unit.kind = SourceKind::fault_table;
        return unit;
    }
    std::string kw = detail::first_toplevel_keyword(unit.text);
    if (kw == "interface")
        unit.kind = SourceKind::interfaces;
    else if (kw == "statechart")
        unit.kind = SourceKind::statechart;
    else if (kw == "cascade")
        unit.kind = SourceKind::composite;
    else if (detail::ends_with(unit.path, ".gi"))
        unit.kind = SourceKind::interfaces;
    else if (detail::ends_with(unit.path, ".gsc"))
        unit.kind = SourceKind::statechart;
    else if (detail::ends_with(unit.path, ".gcd"))
        unit.kind = SourceKind::composite;
    else
        throw ParseError(unit.path, SourcePos{1, 1},
                         "cannot determine unit kind (expected interface, statechart or "
                         "cascade at top level)");
    return unit;
}

namespace detail {

class UnitParser {
public:
    UnitParser(const SourceUnit& unit, bool recognize_connector)
        : unit_(unit.path), lexer_(unit.text, unit.path, recognize_connector), index_(0) {}

    // ---- token helpers ----
    const Token& peek(std::size_t ahead = 0) const {
        std::size_t i = index_ + ahead;
        const auto& toks = lexer_.tokens();
        return i < toks.size() ? toks[i] : toks.back();
    }
    const Token& advance() {
        const Token& t = peek();
        if (t.kind != TokenKind::end_of_input) ++index_;
        return t;
    }
    bool check(TokenKind kind) const { return peek().kind == kind; }
    bool check_word(const char* word) const {
        return peek().kind == TokenKind::identifier && peek().text == word;
    }
    bool accept(TokenKind kind) {
        if (!check(kind)) return false;
        advance();
        return true;
    }
    bool accept_word(const char* word) {
        if (!check_word(word)) return false;
        advance();
        return true;
    }
    const Token& expect(TokenKind kind, const char* what) {
        if (!check(kind)) fail(std::string("expected ") + what);
        return advance();
    }
    void expect_word(const char* word) {
        if (!accept_word(word)) fail(std::string("expected '") + word + "'");
    }
    std::string expect_identifier(const char* what) {
        if (!check(TokenKind::identifier)) fail(std::string("expected ") + what);
        return advance().text;
    }
    [[noreturn]] void fail(const std::string& message) const {
        throw ParseError(unit_, peek().pos, message + " (found '" +
                                                (peek().kind == TokenKind::end_of_input
                                                     ? std::string("end of input")
                                                     : peek().text) +
                                                "')");
    }

    void parse_header(std::vector<std::string>* imports) {
        if (accept_word("package")) expect_identifier("package name");
        while (accept_word("import")) {
            const Token& t = expect(TokenKind::string, "import path string");
            if (imports) imports->push_back(t.text);
        }
    }

    // ---- shared pieces ----
    ScalarType parse_type() {
        SourcePos pos = peek().pos;
        std::string name = expect_identifier("type name");
        if (name == "integer") return ScalarType::integer;
        if (name == "boolean") return ScalarType::boolean;
        throw ParseError(unit_, pos, "unknown type '" + name + "'");
    }

    PortDef parse_port_decl() {
        PortDef port;
        port.pos = peek().pos;
        expect_word("port");
        port.name = expect_identifier("port name");
        expect(TokenKind::colon, "':'");
        if (accept_word("provides"))
            port.mode = PortMode::provides;
        else if (accept_word("requires"))
            port.mode = PortMode::requires_interface;
        else
            fail("expected 'provides' or 'requires'");
        port.interface = expect_identifier("interface name");
        return port;
    }

    // ---- expressions ----
    ExprPtr parse_expr() { return parse_or(); }

    ExprPtr parse_or() {
        ExprPtr lhs = parse_and();
        while (check(TokenKind::logical_or)) {
            SourcePos pos = advance().pos;
            lhs = make_binary(BinaryOp::logical_or, lhs, parse_and(), pos);
        }
        return lhs;
    }
    ExprPtr parse_and() {
        ExprPtr lhs = parse_comparison();
        while (check(TokenKind::logical_and)) {
            SourcePos pos = advance().pos;
            lhs = make_binary(BinaryOp::logical_and, lhs, parse_comparison(), pos);
        }
        return lhs;
    }
    ExprPtr parse_comparison() {
        ExprPtr lhs = parse_additive();
        BinaryOp op;
        switch (peek().kind) {
            case TokenKind::lt: op = BinaryOp::lt; break;
            case TokenKind::le: op = BinaryOp::le; break;
            case TokenKind::gt: op = BinaryOp::gt; break;
            case TokenKind::ge: op = BinaryOp::ge; break;
            case TokenKind::eq: op = BinaryOp::eq; break;
            case TokenKind::ne: op = BinaryOp::ne; break;
            default: return lhs;
        }
        SourcePos pos = advance().pos;
        return make_binary(op, lhs, parse_additive(), pos);
    }
    ExprPtr parse_additive() {
        ExprPtr lhs = parse_unary();
        while (check(TokenKind::plus) || check(TokenKind::minus)) {
            BinaryOp op = check(TokenKind::plus) ? BinaryOp::add : BinaryOp::sub;
            SourcePos pos = advance().pos;
            lhs = make_binary(op, lhs, parse_unary(), pos);
        }
        return lhs;
    }
    ExprPtr parse_unary() {
        if (check(TokenKind::bang)) {
            SourcePos pos = advance().pos;
            return make_unary(UnaryOp::logical_not, parse_unary(), pos);
        }
        if (check(TokenKind::minus)) {
            SourcePos pos = advance().pos;
            return make_unary(UnaryOp::negate, parse_unary(), pos);
        }
        return parse_primary();
    }
    ExprPtr parse_primary() {
        const Token& t = peek();
        if (t.kind == TokenKind::integer) {
            advance();
            return make_int_literal(std::strtoll(t.text.c_str(), nullptr, 10), t.pos);
        }
        if (t.kind == TokenKind::identifier) {
            if (t.text == "true") {
                advance();
                return make_bool_literal(true, t.pos);
            }
            if (t.text == "false") {
                advance();
                return make_bool_literal(false, t.pos);
            }
            advance();
            return make_name_ref(t.text, t.pos);
        }
        if (accept(TokenKind::lparen)) {
            ExprPtr inner = parse_expr();
            expect(TokenKind::rparen, "')'");
            return inner;
        }
        fail("expected expression");
    }

    // ---- actions ----
    std::vector<Action> parse_action_list() {
        std::vector<Action> actions;
        actions.push_back(parse_action());
        while (accept(TokenKind::semicolon)) actions.push_back(parse_action());
        return actions;
    }

    Action parse_action() {
        Action action;
        action.pos = peek().pos;
        if (accept_word("raise")) {
            action.kind = Action::Kind::raise;
            action.port = expect_identifier("port name");
            expect(TokenKind::dot, "'.'");
            action.event = expect_identifier("event name");
            if (accept(TokenKind::lparen)) {
                if (!check(TokenKind::rparen)) {
                    action.args.push_back(parse_expr());
                    while (accept(TokenKind::comma)) action.args.push_back(parse_expr());
                }
                expect(TokenKind::rparen, "')'");
            }
            return action;
        }
        action.kind = Action::Kind::assign;
        action.variable = expect_identifier("variable name");
        expect(TokenKind::assign, "':='");
        action.value = parse_expr();
        return action;
    }

    std::string unit_;

private:
    Lexer lexer_;
    std::size_t index_;
};

}  // namespace detail

// Parses an interfaces unit into its declared interfaces, in declaration
// order. Throws ParseError on the first syntax error or duplicate name.
inline std::vector<InterfaceDef> parse_interfaces(const SourceUnit& unit) {
    if (unit.kind != SourceKind::interfaces)
        throw ParseError(unit.path, SourcePos{1, 1}, "not an interfaces unit");
    detail::UnitParser p(unit, false);
    p.parse_header(nullptr);
    std::vector<InterfaceDef> result;
    while (!p.check(TokenKind::end_of_input)) {
        SourcePos pos = p.peek().pos;
        p.expect_word("interface");
        InterfaceDef def;
        def.pos = pos;
        def.name = p.expect_identifier("interface name");
        for (const auto& existing : result)
            if (existing.name == def.name)
                throw ParseError(unit.path, pos, "duplicate interface '" + def.name + "'");
        p.expect(TokenKind::lbrace, "'{'");
        while (!p.accept(TokenKind::rbrace)) {
            EventDecl event;
            event.pos = p.peek().pos;
            if (p.accept_word("in"))
                event.direction = EventDirection::in;
            else if (p.accept_word("out"))
                event.direction = EventDirection::out;
            else
                p.fail("expected 'in' or 'out' event declaration");
            p.expect_word("event");
            event.name = p.expect_identifier("event name");
            if (def.find_event(event.name))
                throw ParseError(unit.path, event.pos,
                                 "duplicate event '" + event.name + "' in interface '" +
                                     def.name + "'");
            if (p.accept(TokenKind::lparen)) {
                if (!p.check(TokenKind::rparen)) {
                    do {
                        EventParam param;
                        SourcePos ppos = p.peek().pos;
                        param.name = p.expect_identifier("parameter name");
                        p.expect(TokenKind::colon, "':'");
                        param.type = p.parse_type();
                        for (const auto& existing : event.params)
                            if (existing.name == param.name)
                                throw ParseError(unit.path, ppos,
                                                 "duplicate parameter '" + param.name + "'");
                        event.params.push_back(std::move(param));
                    } while (p.accept(TokenKind::comma));
                }
                p.expect(TokenKind::rparen, "')'");
            }
            def.events.push_back(std::move(event));
        }
        result.push_back(std::move(def));
    }
    return result;
}

// Parses a statechart unit. Interface references are resolved against
// `library`; an unknown interface is a parse-time error because event
// declarations cannot be checked without it.
inline StatechartDef parse_statechart(const SourceUnit& unit, const ModelLibrary& library) {
    if (unit.kind != SourceKind::statechart)
        throw ParseError(unit.path, SourcePos{1, 1}, "not a statechart unit");
    detail::UnitParser p(unit, false);
    StatechartDef def;
    p.parse_header(&def.imports);
    def.pos = p.peek().pos;
    p.expect_word("statechart");
    def.name = p.expect_identifier("statechart name");
    p.expect(TokenKind::lbracket, "'['");
    while (!p.accept(TokenKind::rbracket)) {
        PortDef port = p.parse_port_decl();
        if (!library.find_interface(port.interface))
            throw ParseError(unit.path, port.pos,
                             "unresolved interface '" + port.interface + "'");
        def.ports.push_back(std::move(port));
    }
    p.expect(TokenKind::lbrace, "'{'");
    while (!p.accept(TokenKind::rbrace)) {
        if (p.check_word("var")) {
            p.advance();
            VariableDecl var;
            var.pos = p.peek().pos;
            var.name = p.expect_identifier("variable name");
            p.expect(TokenKind::colon, "':'");
            var.type = p.parse_type();
            if (p.accept(TokenKind::assign)) {
                ExprPtr init = p.parse_expr();
                // initializers are constant literals, optionally negated
                const Expr* e = init.get();
                bool negated = false;
                if (e->kind == Expr::Kind::unary && e->unary_op == UnaryOp::negate) {
                    negated = true;
                    e = e->lhs.get();
                }
                if (e->kind != Expr::Kind::literal)
                    throw ParseError(unit.path, var.pos,
                                     "variable initializer must be a literal");
                var.initial = negated ? -e->value : e->value;
            }
            def.variables.push_back(std::move(var));
            continue;
        }
        if (p.check_word("region")) {
            p.advance();
            Region region;
            region.pos = p.peek().pos;
            region.name = p.expect_identifier("region name");
            p.expect(TokenKind::lbrace, "'{'");
            while (!p.accept(TokenKind::rbrace)) {
                if (p.accept_word("initial")) {
                    region.initial = p.expect_identifier("initial state name");
                    continue;
                }
                p.expect_word("state");
                StateDef state;
                state.pos = p.peek().pos;
                state.name = p.expect_identifier("state name");
                p.expect(TokenKind::lbrace, "'{'");
                while (!p.accept(TokenKind::rbrace)) {
                    if (p.accept_word("entry")) {
                        p.expect(TokenKind::slash, "'/'");
                        state.entry_actions = p.parse_action_list();
                        continue;
                    }
                    TransitionDef tr;
                    tr.pos = p.peek().pos;
                    if (p.accept_word("on")) {
                        Trigger trigger;
                        trigger.port = p.expect_identifier("port name");
                        p.expect(TokenKind::dot, "'.'");
                        trigger.event = p.expect_identifier("event name");
                        tr.trigger = std::move(trigger);
                    }
                    if (p.accept(TokenKind::lbracket)) {
                        tr.guard = p.parse_expr();
                        p.expect(TokenKind::rbracket, "']'");
                    }
                    if (p.accept(TokenKind::slash)) tr.actions = p.parse_action_list();
                    p.expect(TokenKind::arrow, "'->'");
                    tr.target = p.expect_identifier("target state name");
                    state.transitions.push_back(std::move(tr));
                }
                region.states.push_back(std::move(state));
            }
            def.regions.push_back(std::move(region));
            continue;
        }
        p.fail("expected 'var', 'region' or '}'");
    }
    return def;
}

// Parses a cascade composite unit. Instance statechart types must exist in
// `library`; channel/binding endpoints must name declared instances.
inline CompositeDef parse_composite(const SourceUnit& unit, const ModelLibrary& library) {
    if (unit.kind != SourceKind::composite)
        throw ParseError(unit.path, SourcePos{1, 1}, "not a composite unit");
    detail::UnitParser p(unit, true);
    CompositeDef def;
    p.parse_header(&def.imports);
    def.pos = p.peek().pos;
    p.expect_word("cascade");
    def.name = p.expect_identifier("composite name");
    p.expect(TokenKind::lbracket, "'['");
    while (!p.accept(TokenKind::rbracket)) def.system_ports.push_back(p.parse_port_decl());
    p.expect(TokenKind::lbrace, "'{'");
    auto require_instance = [&](const std::string& name, SourcePos pos) {
        if (!def.find_instance(name))
            throw ParseError(unit.path, pos, "unresolved instance '" + name + "'");
    };
    while (!p.accept(TokenKind::rbrace)) {
        SourcePos pos = p.peek().pos;
        if (p.accept_word("component")) {
            InstanceDecl inst;
            inst.pos = pos;
            inst.name = p.expect_identifier("instance name");
            p.expect(TokenKind::colon, "':'");
            inst.statechart = p.expect_identifier("statechart type name");
            if (def.find_instance(inst.name))
                throw ParseError(unit.path, pos, "duplicate instance '" + inst.name + "'");
            if (!library.find_statechart(inst.statechart))
                throw ParseError(unit.path, pos,
                                 "unknown statechart type '" + inst.statechart + "'");
            def.instances.push_back(std::move(inst));
            continue;
        }
        if (p.accept_word("bind")) {
            PortBinding binding;
            binding.pos = pos;
            binding.system_port = p.expect_identifier("system port name");
            p.expect(TokenKind::arrow, "'->'");
            binding.instance = p.expect_identifier("instance name");
            p.expect(TokenKind::dot, "'.'");
            binding.port = p.expect_identifier("port name");
            require_instance(binding.instance, pos);
            def.bindings.push_back(std::move(binding));
            continue;
        }
        if (p.accept_word("channel")) {
            Channel channel;
            channel.pos = pos;
            p.expect(TokenKind::lbracket, "'['");
            channel.source_instance = p.expect_identifier("instance name");
            p.expect(TokenKind::dot, "'.'");
            channel.source_port = p.expect_identifier("port name");
            p.expect(TokenKind::rbracket, "']'");
            p.expect(TokenKind::connector, "'-o)-'");
            p.expect(TokenKind::lbracket, "'['");
            channel.target_instance = p.expect_identifier("instance name");
            p.expect(TokenKind::dot, "'.'");
            channel.target_port = p.expect_identifier("port name");
            p.expect(TokenKind::rbracket, "']'");
            require_instance(channel.source_instance, pos);
            require_instance(channel.target_instance, pos);
            def.channels.push_back(std::move(channel));
            continue;
        }
        if (p.accept_word("execution")) {
            do {
                SourcePos ipos = p.peek().pos;
                std::string name = p.expect_identifier("instance name");
                require_instance(name, ipos);
                def.execution_list.push_back(std::move(name));
            } while (p.accept(TokenKind::comma));
            continue;
        }
        if (p.accept_word("evaluation")) {
            if (def.evaluation)
                throw ParseError(unit.path, pos, "duplicate evaluation declaration");
            EvaluationDecl eval;
            eval.pos = pos;
            eval.instance = p.expect_identifier("instance name");
            require_instance(eval.instance, pos);
            p.expect(TokenKind::lbrace, "'{'");
            while (!p.accept(TokenKind::rbrace)) {
                SourcePos spos = p.peek().pos;
                std::string state = p.expect_identifier("state name");
                p.expect(TokenKind::arrow, "'->'");
                std::string mode_name = p.expect_identifier("failure mode name");
                auto mode = failure_mode_from_string(mode_name);
                if (!mode)
                    throw ParseError(unit.path, spos,
                                     "unknown failure mode '" + mode_name + "'");
                eval.failure_states.emplace_back(std::move(state), *mode);
            }
            def.evaluation = std::move(eval);
            continue;
        }
        p.fail("expected 'component', 'bind', 'channel', 'execution', 'evaluation' or '}'");
    }
    return def;
}

}  // namespace relsim
