// SPDX-License-Identifier: MIT
#ifndef FLOWLAT_TRANSFORM_HPP
#define FLOWLAT_TRANSFORM_HPP

#include <string>
#include <vector>

#include "flowlat/typing.hpp"

namespace flowlat {

/// One level-adjustment assignment `x@target := x@source`.
struct FixedAssign {
  std::string base;
  Elem target_level;
  Elem source_level;
};
using FixedAssignBlock = std::vector<FixedAssign>;

/// The assignments that move a store typed by `source` to one typed by
/// `target`: one copy per variable whose levels differ, in variable-name
/// order. The assignments are independent, so this order is canonical
/// rather than semantically forced.
inline FixedAssignBlock fassign(const TypeEnv& target, const TypeEnv& source) {
  detail::check_pointwise(target, source);
  FixedAssignBlock out;
  for (const auto& [var, target_level] : target) {
    const Elem& source_level = source.get(var);
    if (!(target_level == source_level))
      out.push_back({var, target_level, source_level});
  }
  return out;
}

/// Render a block as a command, or nullptr for the empty block.
inline CommandPtr block_command(const Lattice& lat,
                                const FixedAssignBlock& block) {
  CommandPtr out;
  for (const auto& fa : block) {
    CommandPtr one =
        assign(VarRef{fa.base, lat.elem_name(fa.target_level)},
               var_ref(VarRef{fa.base, lat.elem_name(fa.source_level)}));
    out = out ? seq(std::move(out), std::move(one)) : std::move(one);
  }
  return out;
}

/// Annotate every variable of a floating expression with its level under
/// `env`.
inline ExprPtr fix_expr(const TypeEnv& env, const Expr& e) {
  if (const auto* l = std::get_if<Expr::Lit>(&e.node)) return lit(l->value);
  if (const auto* v = std::get_if<Expr::Var>(&e.node)) {
    if (v->ref.fixed())
      throw TypingError("variable '" + v->ref.str() + "' is already fixed");
    return fixed_var(v->ref.base,
                     env.lattice()->elem_name(env.get(v->ref.base)));
  }
  const auto& b = std::get<Expr::Bin>(e.node);
  return bin(b.op, fix_expr(env, *b.lhs), fix_expr(env, *b.rhs));
}

/// A translated program together with the final environment that types it.
struct Translation {
  CommandPtr program;
  TypeEnv post;
};

namespace detail {

inline CommandPtr combine(CommandPtr d, CommandPtr block) {
  if (!block) return d;
  if (std::holds_alternative<Command::Skip>(d->node)) return block;
  return seq_left(std::move(d), std::move(block));
}

inline Translation translate_rec(const Elem& pc, const TypeEnv& env,
                                 const Command& c, int depth, Trace* tr) {
  const Lattice& lat = *env.lattice();
  if (std::holds_alternative<Command::Skip>(c.node))
    return {skip(), env};
  if (const auto* a = std::get_if<Command::Assign>(&c.node)) {
    if (!env.contains(a->target.base))
      throw TypingError("variable '" + a->target.base +
                        "' is not in the environment");
    const Elem s = lat.join(pc, expr_type(env, *a->rhs));
    CommandPtr d =
        assign(VarRef{a->target.base, lat.elem_name(s)}, fix_expr(env, *a->rhs));
    TypeEnv out = env;
    out.set(a->target.base, s);
    trace_leaf(tr, depth, a->target.str() + " := " + to_string(*a->rhs), env,
               out);
    return {std::move(d), std::move(out)};
  }
  if (const auto* q = std::get_if<Command::Seq>(&c.node)) {
    Translation first = translate_rec(pc, env, *q->first, depth, tr);
    Translation second =
        translate_rec(pc, first.post, *q->second, depth, tr);
    return {seq_left(std::move(first.program), std::move(second.program)),
            std::move(second.post)};
  }
  if (const auto* i = std::get_if<Command::If>(&c.node)) {
    const Elem p = lat.join(pc, expr_type(env, *i->cond));
    std::size_t slot = 0;
    if (tr) {
      slot = tr->size();
      tr->push_back({depth, "if " + to_string(*i->cond), {}});
    }
    Translation then_part =
        translate_rec(p, env, *i->then_branch, depth + 1, tr);
    Translation else_part =
        translate_rec(p, env, *i->else_branch, depth + 1, tr);
    TypeEnv out = env_join(then_part.post, else_part.post);
    if (tr) (*tr)[slot].delta = env_delta(env, out);
    CommandPtr d = if_then_else(
        fix_expr(env, *i->cond),
        combine(then_part.program,
                block_command(lat, fassign(out, then_part.post))),
        combine(else_part.program,
                block_command(lat, fassign(out, else_part.post))));
    return {std::move(d), std::move(out)};
  }
  const auto& w = std::get<Command::While>(c.node);
  std::size_t slot = 0;
  if (tr) {
    slot = tr->size();
    tr->push_back({depth, "while " + to_string(*w.cond), {}});
  }
  TypeEnv cur = env;
  while (true) {
    const Elem p = lat.join(pc, expr_type(cur, *w.cond));
    TypeEnv next = env_join(spc_rec(p, cur, *w.body, 0, nullptr, nullptr), env);
    if (next == cur) break;
    cur = std::move(next);
  }
  if (tr) (*tr)[slot].delta = env_delta(env, cur);
  const Elem p = lat.join(pc, expr_type(cur, *w.cond));
  Translation body = translate_rec(p, cur, *w.body, depth + 1, tr);
  CommandPtr loop = while_do(
      fix_expr(cur, *w.cond),
      combine(body.program, block_command(lat, fassign(cur, body.post))));
  CommandPtr entry = block_command(lat, fassign(cur, env));
  return {entry ? seq_left(std::move(entry), std::move(loop))
                : std::move(loop),
          std::move(cur)};
}

} // namespace detail

/// Translate a floating program into a fixed-type program that simulates
/// it: each assignment writes to its target at the level the analysis
/// gives it, and level-adjustment blocks reconcile the branches of
/// conditionals and the entry and back edge of loops. The returned post
/// environment equals the analysis result for (pc, env, c).
inline Translation translate(const Elem& pc, const TypeEnv& env,
                             const Command& c, Trace* trace = nullptr) {
  VarSets vs = free_vars(c);
  if (!vs.fixed.empty())
    throw TypingError("fixed variable '" + vs.fixed.begin()->str() +
                      "' is not allowed in a translation source");
  return detail::translate_rec(pc, env, c, 0, trace);
}

namespace detail {
inline Elem fixed_expr_type(const Lattice& lat, const Expr& e) {
  if (std::holds_alternative<Expr::Lit>(e.node)) return lat.bottom();
  if (const auto* v = std::get_if<Expr::Var>(&e.node))
    return lat.parse_elem(v->ref.level);
  const auto& b = std::get<Expr::Bin>(e.node);
  return lat.join(fixed_expr_type(lat, *b.lhs),
                  fixed_expr_type(lat, *b.rhs));
}

inline bool check_fixed_rec(const Lattice& lat, const Elem& pc,
                            const Command& d) {
  if (std::holds_alternative<Command::Skip>(d.node)) return true;
  if (const auto* a = std::get_if<Command::Assign>(&d.node)) {
    const Elem target = lat.parse_elem(a->target.level);
    return lat.leq(fixed_expr_type(lat, *a->rhs), target) &&
           lat.leq(pc, target);
  }
  if (const auto* q = std::get_if<Command::Seq>(&d.node))
    return check_fixed_rec(lat, pc, *q->first) &&
           check_fixed_rec(lat, pc, *q->second);
  if (const auto* i = std::get_if<Command::If>(&d.node)) {
    const Elem p = lat.join(pc, fixed_expr_type(lat, *i->cond));
    return check_fixed_rec(lat, p, *i->then_branch) &&
           check_fixed_rec(lat, p, *i->else_branch);
  }
  const auto& w = std::get<Command::While>(d.node);
  const Elem p = lat.join(pc, fixed_expr_type(lat, *w.cond));
  return check_fixed_rec(lat, p, *w.body);
}
} // namespace detail

/// Flow-insensitive typability of a fixed program: every assignment
/// `x@t := E` needs both the level of E and the context level below t,
/// and guards raise the context for the commands they dominate. The
/// program must have no floating variables.
inline bool check_fixed(const Lattice& lat, const Elem& pc, const Command& d) {
  VarSets vs = free_vars(d);
  if (!vs.floating.empty())
    throw TypingError("floating variable '" + *vs.floating.begin() +
                      "' is not allowed in a fixed-type program");
  return detail::check_fixed_rec(lat, pc, d);
}

/// The nested-conditional family whose translation grows quadratically:
/// n guard variables wrap a secret-guarded block of n assignments, and
/// every level of the nest needs its own copy of the reconciliation
/// block.
inline CommandPtr blowup_family(int n) {
  if (n < 1) throw Error("blowup family is defined for n >= 1");
  std::vector<CommandPtr> zeroes;
  for (int i = 1; i <= n; ++i)
    zeroes.push_back(assign("x" + std::to_string(i), lit(0)));
  CommandPtr inner = if_then_else(var("h"), seq(std::move(zeroes)), skip());
  for (int i = n; i >= 1; --i)
    inner = if_then_else(var("y" + std::to_string(i)), std::move(inner),
                         skip());
  return inner;
}

/// Count `x@s := x@t` copies, the assignments translation inserts.
inline std::size_t count_copy_assignments(const Command& c) {
  std::size_t count = 0;
  auto walk = [&count](const Command& cmd, auto&& self) -> void {
    if (const auto* a = std::get_if<Command::Assign>(&cmd.node)) {
      if (const auto* v = std::get_if<Expr::Var>(&a->rhs->node))
        if (a->target.fixed() && v->ref.fixed() &&
            v->ref.base == a->target.base)
          ++count;
    } else if (const auto* q = std::get_if<Command::Seq>(&cmd.node)) {
      self(*q->first, self);
      self(*q->second, self);
    } else if (const auto* i = std::get_if<Command::If>(&cmd.node)) {
      self(*i->then_branch, self);
      self(*i->else_branch, self);
    } else if (const auto* w = std::get_if<Command::While>(&cmd.node)) {
      self(*w->body, self);
    }
  };
  walk(c, walk);
  return count;
}

} // namespace flowlat

#endif
