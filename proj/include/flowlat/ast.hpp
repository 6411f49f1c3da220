// SPDX-License-Identifier: MIT
#ifndef FLOWLAT_AST_HPP
#define FLOWLAT_AST_HPP

#include <compare>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace flowlat {

/// Program values are unbounded signed integers.
using Value = boost::multiprecision::cpp_int;

/// A variable occurrence: a plain (floating) variable `x`, or a fixed
/// variable `x@T` whose security level is pinned to the lattice element
/// named `T`. The level is kept as written; it is resolved against a
/// concrete lattice by the operations that need it.
struct VarRef {
  std::string base;
  std::string level; // empty for floating variables

  bool fixed() const { return !level.empty(); }

  auto operator<=>(const VarRef&) const = default;

  std::string str() const { return fixed() ? base + "@" + level : base; }
};

enum class BinOp { Add, Sub, Mul, Eq, Ne, Lt, Le };

inline const char* op_symbol(BinOp op) {
  switch (op) {
  case BinOp::Add: return "+";
  case BinOp::Sub: return "-";
  case BinOp::Mul: return "*";
  case BinOp::Eq: return "==";
  case BinOp::Ne: return "!=";
  case BinOp::Lt: return "<";
  case BinOp::Le: return "<=";
  }
  return "?";
}

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Expressions: integer literals, variables, binary operations.
struct Expr {
  struct Lit {
    Value value;
  };
  struct Var {
    VarRef ref;
  };
  struct Bin {
    BinOp op;
    ExprPtr lhs;
    ExprPtr rhs;
  };

  std::variant<Lit, Var, Bin> node;
};

inline ExprPtr lit(Value v) {
  return std::make_shared<Expr>(Expr{Expr::Lit{std::move(v)}});
}
inline ExprPtr var(std::string name) {
  return std::make_shared<Expr>(Expr{Expr::Var{VarRef{std::move(name), {}}}});
}
inline ExprPtr fixed_var(std::string name, std::string level) {
  return std::make_shared<Expr>(
      Expr{Expr::Var{VarRef{std::move(name), std::move(level)}}});
}
inline ExprPtr var_ref(VarRef ref) {
  return std::make_shared<Expr>(Expr{Expr::Var{std::move(ref)}});
}
inline ExprPtr bin(BinOp op, ExprPtr lhs, ExprPtr rhs) {
  return std::make_shared<Expr>(
      Expr{Expr::Bin{op, std::move(lhs), std::move(rhs)}});
}

struct Command;
using CommandPtr = std::shared_ptr<const Command>;

/// Commands of the While language. A one-armed conditional is represented
/// as a two-armed one whose else branch is `skip`.
struct Command {
  struct Skip {};
  struct Assign {
    VarRef target;
    ExprPtr rhs;
  };
  struct Seq {
    CommandPtr first;
    CommandPtr second;
  };
  struct If {
    ExprPtr cond;
    CommandPtr then_branch;
    CommandPtr else_branch;
  };
  struct While {
    ExprPtr cond;
    CommandPtr body;
  };

  std::variant<Skip, Assign, Seq, If, While> node;
};

inline CommandPtr skip() {
  return std::make_shared<Command>(Command{Command::Skip{}});
}
inline CommandPtr assign(VarRef target, ExprPtr rhs) {
  return std::make_shared<Command>(
      Command{Command::Assign{std::move(target), std::move(rhs)}});
}
inline CommandPtr assign(std::string target, ExprPtr rhs) {
  return assign(VarRef{std::move(target), {}}, std::move(rhs));
}
inline CommandPtr seq(CommandPtr first, CommandPtr second) {
  return std::make_shared<Command>(
      Command{Command::Seq{std::move(first), std::move(second)}});
}
inline CommandPtr seq(std::vector<CommandPtr> cs) {
  if (cs.empty()) return skip();
  CommandPtr acc = cs.front();
  for (std::size_t i = 1; i < cs.size(); ++i) acc = seq(acc, cs[i]);
  return acc;
}
/// Sequence two commands, re-associating so that no Seq's second
/// component is itself a Seq. The parser folds `;` left, so synthesized
/// programs built this way re-parse to structurally equal trees.
inline CommandPtr seq_left(CommandPtr first, CommandPtr second) {
  if (const auto* s = std::get_if<Command::Seq>(&second->node))
    return seq_left(seq_left(std::move(first), s->first), s->second);
  return seq(std::move(first), std::move(second));
}
inline CommandPtr if_then_else(ExprPtr cond, CommandPtr then_branch,
                               CommandPtr else_branch) {
  return std::make_shared<Command>(Command{Command::If{
      std::move(cond), std::move(then_branch), std::move(else_branch)}});
}
inline CommandPtr while_do(ExprPtr cond, CommandPtr body) {
  return std::make_shared<Command>(
      Command{Command::While{std::move(cond), std::move(body)}});
}

// -- structural equality ----------------------------------------------------

inline bool equal(const Expr& a, const Expr& b) {
  if (a.node.index() != b.node.index()) return false;
  if (const auto* la = std::get_if<Expr::Lit>(&a.node))
    return la->value == std::get<Expr::Lit>(b.node).value;
  if (const auto* va = std::get_if<Expr::Var>(&a.node))
    return va->ref == std::get<Expr::Var>(b.node).ref;
  const auto& ba = std::get<Expr::Bin>(a.node);
  const auto& bb = std::get<Expr::Bin>(b.node);
  return ba.op == bb.op && equal(*ba.lhs, *bb.lhs) && equal(*ba.rhs, *bb.rhs);
}

inline bool equal(const Command& a, const Command& b) {
  if (a.node.index() != b.node.index()) return false;
  if (std::holds_alternative<Command::Skip>(a.node)) return true;
  if (const auto* aa = std::get_if<Command::Assign>(&a.node)) {
    const auto& ab = std::get<Command::Assign>(b.node);
    return aa->target == ab.target && equal(*aa->rhs, *ab.rhs);
  }
  if (const auto* sa = std::get_if<Command::Seq>(&a.node)) {
    const auto& sb = std::get<Command::Seq>(b.node);
    return equal(*sa->first, *sb.first) && equal(*sa->second, *sb.second);
  }
  if (const auto* ia = std::get_if<Command::If>(&a.node)) {
    const auto& ib = std::get<Command::If>(b.node);
    return equal(*ia->cond, *ib.cond) &&
           equal(*ia->then_branch, *ib.then_branch) &&
           equal(*ia->else_branch, *ib.else_branch);
  }
  const auto& wa = std::get<Command::While>(a.node);
  const auto& wb = std::get<Command::While>(b.node);
  return equal(*wa.cond, *wb.cond) && equal(*wa.body, *wb.body);
}

// -- variable collection ----------------------------------------------------

/// Free variables, split by kind. For commands this covers every variable
/// occurrence, assignment targets included.
struct VarSets {
  std::set<std::string> floating;
  std::set<VarRef> fixed;
};

namespace detail {
inline void collect(const Expr& e, VarSets& out) {
  if (const auto* v = std::get_if<Expr::Var>(&e.node)) {
    if (v->ref.fixed())
      out.fixed.insert(v->ref);
    else
      out.floating.insert(v->ref.base);
    return;
  }
  if (const auto* b = std::get_if<Expr::Bin>(&e.node)) {
    collect(*b->lhs, out);
    collect(*b->rhs, out);
  }
}

inline void collect(const Command& c, VarSets& out) {
  if (const auto* a = std::get_if<Command::Assign>(&c.node)) {
    if (a->target.fixed())
      out.fixed.insert(a->target);
    else
      out.floating.insert(a->target.base);
    collect(*a->rhs, out);
  } else if (const auto* s = std::get_if<Command::Seq>(&c.node)) {
    collect(*s->first, out);
    collect(*s->second, out);
  } else if (const auto* i = std::get_if<Command::If>(&c.node)) {
    collect(*i->cond, out);
    collect(*i->then_branch, out);
    collect(*i->else_branch, out);
  } else if (const auto* w = std::get_if<Command::While>(&c.node)) {
    collect(*w->cond, out);
    collect(*w->body, out);
  }
}
} // namespace detail

inline VarSets free_vars(const Expr& e) {
  VarSets out;
  detail::collect(e, out);
  return out;
}

inline VarSets free_vars(const Command& c) {
  VarSets out;
  detail::collect(c, out);
  return out;
}

/// Variable references that occur as assignment targets in `c`.
inline std::set<VarRef> assigned_vars(const Command& c) {
  std::set<VarRef> out;
  auto walk = [&out](const Command& cmd, auto&& self) -> void {
    if (const auto* a = std::get_if<Command::Assign>(&cmd.node)) {
      out.insert(a->target);
    } else if (const auto* s = std::get_if<Command::Seq>(&cmd.node)) {
      self(*s->first, self);
      self(*s->second, self);
    } else if (const auto* i = std::get_if<Command::If>(&cmd.node)) {
      self(*i->then_branch, self);
      self(*i->else_branch, self);
    } else if (const auto* w = std::get_if<Command::While>(&cmd.node)) {
      self(*w->body, self);
    }
  };
  walk(c, walk);
  return out;
}

// -- printing ----------------------------------------------------------------

namespace detail {
inline int precedence(BinOp op) {
  switch (op) {
  case BinOp::Eq:
  case BinOp::Ne:
  case BinOp::Lt:
  case BinOp::Le: return 1;
  case BinOp::Add:
  case BinOp::Sub: return 2;
  case BinOp::Mul: return 3;
  }
  return 0;
}

inline void print(const Expr& e, std::ostream& os, int min_prec) {
  if (const auto* l = std::get_if<Expr::Lit>(&e.node)) {
    os << l->value;
    return;
  }
  if (const auto* v = std::get_if<Expr::Var>(&e.node)) {
    os << v->ref.str();
    return;
  }
  const auto& b = std::get<Expr::Bin>(e.node);
  const int prec = precedence(b.op);
  const bool parens = prec < min_prec;
  if (parens) os << "(";
  print(*b.lhs, os, prec);
  os << " " << op_symbol(b.op) << " ";
  print(*b.rhs, os, prec + 1);
  if (parens) os << ")";
}

inline void print(const Command& c, std::ostream& os, int indent,
                  bool multiline) {
  const std::string pad = multiline ? std::string(indent * 2, ' ') : "";
  const char* nl = multiline ? "\n" : " ";
  if (std::holds_alternative<Command::Skip>(c.node)) {
    os << pad << "skip";
  } else if (const auto* a = std::get_if<Command::Assign>(&c.node)) {
    os << pad << a->target.str() << " := ";
    print(*a->rhs, os, 0);
  } else if (const auto* s = std::get_if<Command::Seq>(&c.node)) {
    print(*s->first, os, indent, multiline);
    os << " ;" << nl;
    print(*s->second, os, indent, multiline);
  } else if (const auto* i = std::get_if<Command::If>(&c.node)) {
    os << pad << "if ";
    print(*i->cond, os, 0);
    os << " then" << nl;
    print(*i->then_branch, os, indent + 1, multiline);
    os << nl << pad << "else" << nl;
    print(*i->else_branch, os, indent + 1, multiline);
    os << nl << pad << "end";
  } else {
    const auto& w = std::get<Command::While>(c.node);
    os << pad << "while ";
    print(*w.cond, os, 0);
    os << " do" << nl;
    print(*w.body, os, indent + 1, multiline);
    os << nl << pad << "end";
  }
}
} // namespace detail

inline std::string to_string(const Expr& e) {
  std::ostringstream os;
  detail::print(e, os, 0);
  return os.str();
}

/// Single-line rendering, round-trips through the parser.
inline std::string to_string(const Command& c) {
  std::ostringstream os;
  detail::print(c, os, 0, false);
  return os.str();
}

/// Indented multi-line rendering, round-trips through the parser.
inline std::string pretty(const Command& c) {
  std::ostringstream os;
  detail::print(c, os, 0, true);
  os << "\n";
  return os.str();
}

} // namespace flowlat

#endif
