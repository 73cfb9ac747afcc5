#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "relsim/diagnostics.hpp"

namespace relsim {

// Runtime scalar. Booleans are stored as 0/1; the declared type lives in the
// model and is enforced by validation, not by the carrier.
using Value = std::int64_t;

enum class ScalarType { integer, boolean };

inline const char* to_string(ScalarType t) {
    return t == ScalarType::integer ? "integer" : "boolean";
}

enum class UnaryOp { negate, logical_not };
enum class BinaryOp { add, sub, lt, le, gt, ge, eq, ne, logical_and, logical_or };

// Guard / action expression tree. Immutable after parse; nodes are shared so
// model values stay cheap to copy.
struct Expr {
    // A name_ref resolves to a trigger parameter when the enclosing
    // transition declares one of that name, otherwise to a chart variable.
    enum class Kind { literal, name_ref, unary, binary } kind;

    // literal
    Value value = 0;
    ScalarType literal_type = ScalarType::integer;
    // name_ref
    std::string name;
    // unary / binary
    UnaryOp unary_op = UnaryOp::negate;
    BinaryOp binary_op = BinaryOp::add;
    std::shared_ptr<const Expr> lhs;
    std::shared_ptr<const Expr> rhs;

    SourcePos pos;
};

using ExprPtr = std::shared_ptr<const Expr>;

inline ExprPtr make_int_literal(Value v, SourcePos pos = {}) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::literal;
    e->value = v;
    e->literal_type = ScalarType::integer;
    e->pos = pos;
    return e;
}

inline ExprPtr make_bool_literal(bool v, SourcePos pos = {}) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::literal;
    e->value = v ? 1 : 0;
    e->literal_type = ScalarType::boolean;
    e->pos = pos;
    return e;
}

inline ExprPtr make_name_ref(std::string name, SourcePos pos = {}) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::name_ref;
    e->name = std::move(name);
    e->pos = pos;
    return e;
}

inline ExprPtr make_unary(UnaryOp op, ExprPtr operand, SourcePos pos = {}) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::unary;
    e->unary_op = op;
    e->lhs = std::move(operand);
    e->pos = pos;
    return e;
}

inline ExprPtr make_binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs, SourcePos pos = {}) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::binary;
    e->binary_op = op;
    e->lhs = std::move(lhs);
    e->rhs = std::move(rhs);
    e->pos = pos;
    return e;
}

inline const char* to_string(BinaryOp op) {
    switch (op) {
        case BinaryOp::add: return "+";
        case BinaryOp::sub: return "-";
        case BinaryOp::lt: return "<";
        case BinaryOp::le: return "<=";
        case BinaryOp::gt: return ">";
        case BinaryOp::ge: return ">=";
        case BinaryOp::eq: return "==";
        case BinaryOp::ne: return "!=";
        case BinaryOp::logical_and: return "&&";
        case BinaryOp::logical_or: return "||";
    }
    return "?";
}

// Structural equality, ignoring source positions.
inline bool expr_equal(const Expr* a, const Expr* b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case Expr::Kind::literal:
            return a->value == b->value && a->literal_type == b->literal_type;
        case Expr::Kind::name_ref:
            return a->name == b->name;
        case Expr::Kind::unary:
            return a->unary_op == b->unary_op && expr_equal(a->lhs.get(), b->lhs.get());
        case Expr::Kind::binary:
            return a->binary_op == b->binary_op && expr_equal(a->lhs.get(), b->lhs.get()) &&
                   expr_equal(a->rhs.get(), b->rhs.get());
    }
    return false;
}

inline bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
    return expr_equal(a.get(), b.get());
}

}  // namespace relsim
