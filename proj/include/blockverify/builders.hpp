#pragma once

// Small construction helpers for building programs in code (tests, generators,
// examples). Node ids are left empty; call assign_block_ids() on the finished
// Program.

#include <initializer_list>
#include <string>
#include <vector>

#include "blockverify/ast.hpp"

namespace blockverify::build {

inline Expr make(Expr::Node n) { return Expr{{}, std::move(n)}; }
inline Stmt make(Stmt::Node n) { return Stmt{{}, std::move(n)}; }

inline Expr num(double v) { return make(expr::Literal{Value::number(v)}); }
inline Expr boolean(bool v) { return make(expr::Literal{Value::boolean(v)}); }
inline Expr text(std::string v) { return make(expr::Literal{Value::text(std::move(v))}); }
inline Expr literal(Value v) { return make(expr::Literal{std::move(v)}); }
inline Expr var(std::string name) { return make(expr::VarRef{std::move(name)}); }
inline Expr old(std::string name) { return make(expr::Old{std::move(name)}); }
inline Expr result() { return make(expr::Result{}); }

inline Expr arith(ArithOp op, Expr a, Expr b) { return make(expr::Arith{op, std::move(a), std::move(b)}); }
inline Expr add(Expr a, Expr b) { return arith(ArithOp::Add, std::move(a), std::move(b)); }
inline Expr sub(Expr a, Expr b) { return arith(ArithOp::Sub, std::move(a), std::move(b)); }
inline Expr mul(Expr a, Expr b) { return arith(ArithOp::Mul, std::move(a), std::move(b)); }

inline Expr cmp(CompareOp op, Expr a, Expr b) { return make(expr::Compare{op, std::move(a), std::move(b)}); }
inline Expr eq(Expr a, Expr b) { return cmp(CompareOp::Eq, std::move(a), std::move(b)); }
inline Expr lt(Expr a, Expr b) { return cmp(CompareOp::Lt, std::move(a), std::move(b)); }
inline Expr le(Expr a, Expr b) { return cmp(CompareOp::Le, std::move(a), std::move(b)); }
inline Expr ge(Expr a, Expr b) { return cmp(CompareOp::Ge, std::move(a), std::move(b)); }
inline Expr gt(Expr a, Expr b) { return cmp(CompareOp::Gt, std::move(a), std::move(b)); }

inline Expr logic(LogicOp op, std::vector<Expr> operands) { return make(expr::Logic{op, std::move(operands)}); }
inline Expr land(Expr a, Expr b) { return logic(LogicOp::And, {std::move(a), std::move(b)}); }
inline Expr lor(Expr a, Expr b) { return logic(LogicOp::Or, {std::move(a), std::move(b)}); }
inline Expr lnot(Expr a) { return logic(LogicOp::Not, {std::move(a)}); }
inline Expr implies(Expr a, Expr b) { return logic(LogicOp::Implies, {std::move(a), std::move(b)}); }

inline Expr forall_range(std::string v, Expr lo, Expr hi, Expr body)
{
    return make(expr::Quantifier{QuantKind::ForAll, std::move(v), expr::RangeDomain{std::move(lo), std::move(hi)},
                                 std::move(body)});
}
inline Expr exists_range(std::string v, Expr lo, Expr hi, Expr body)
{
    return make(expr::Quantifier{QuantKind::Exists, std::move(v), expr::RangeDomain{std::move(lo), std::move(hi)},
                                 std::move(body)});
}
inline Expr forall_in(std::string v, Expr list, Expr body)
{
    return make(expr::Quantifier{QuantKind::ForAll, std::move(v), expr::ElementsDomain{std::move(list)},
                                 std::move(body)});
}
inline Expr item(Expr index, Expr list) { return make(expr::ItemOf{std::move(index), std::move(list)}); }
inline Expr length(Expr list) { return make(expr::LengthOf{std::move(list)}); }
inline Expr contains(Expr list, Expr element) { return make(expr::Contains{std::move(list), std::move(element)}); }
inline Expr call(std::string block, std::vector<Expr> args = {}) { return make(expr::Call{std::move(block), std::move(args)}); }

inline Stmt declare(std::vector<std::string> names) { return make(stmt::DeclareLocals{std::move(names)}); }
inline Stmt set(std::string name, Expr value) { return make(stmt::SetVar{std::move(name), std::move(value)}); }
inline Stmt change(std::string name, Expr delta) { return make(stmt::ChangeVar{std::move(name), std::move(delta)}); }
inline Stmt if_else(Expr cond, std::vector<Stmt> then_branch, std::vector<Stmt> else_branch = {})
{
    return make(stmt::IfElse{std::move(cond), std::move(then_branch), std::move(else_branch)});
}
inline Stmt repeat(Expr count, std::vector<Expr> invariant, std::vector<Stmt> body)
{
    return make(stmt::RepeatN{std::move(count), std::move(invariant), std::move(body)});
}
inline Stmt repeat_until(Expr cond, std::vector<Expr> invariant, std::vector<Stmt> body)
{
    return make(stmt::RepeatUntil{std::move(cond), std::move(invariant), std::move(body)});
}
inline Stmt assert_that(Expr cond) { return make(stmt::Assert{std::move(cond)}); }
inline Stmt report(Expr value) { return make(stmt::Report{std::move(value)}); }
inline Stmt run(std::string block, std::vector<Expr> args = {}) { return make(stmt::CallCommand{std::move(block), std::move(args)}); }
inline Stmt add_to(Expr element, std::string list) { return make(stmt::AddToList{std::move(element), std::move(list)}); }
inline Stmt replace_item(Expr index, std::string list, Expr element)
{
    return make(stmt::ReplaceItem{std::move(index), std::move(list), std::move(element)});
}

inline Value int_list(std::initializer_list<double> xs)
{
    Value::List l;
    for (double x : xs)
        l.push_back(Value::number(x));
    return Value::list(std::move(l));
}

} // namespace blockverify::build
