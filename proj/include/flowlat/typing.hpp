// SPDX-License-Identifier: MIT
#ifndef FLOWLAT_TYPING_HPP
#define FLOWLAT_TYPING_HPP

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "flowlat/ast.hpp"
#include "flowlat/env.hpp"

namespace flowlat {

/// One analysed statement: its source form, the environment entries it
/// changed (with their new levels), and its nesting depth. Compound
/// statements appear before their children and carry the net change.
struct TraceEntry {
  int depth;
  std::string label;
  std::vector<std::pair<std::string, Elem>> delta;
};
using Trace = std::vector<TraceEntry>;

struct SpcStats {
  /// Largest number of analysis passes any single loop body needed before
  /// its environment stabilised.
  std::size_t max_loop_passes = 0;
};

/// Security level of an expression: the join of the levels of its floating
/// variables (looked up in the environment) and fixed variables (their
/// declared levels), with bottom for constants.
inline Elem expr_type(const TypeEnv& env, const Expr& e) {
  const Lattice& lat = *env.lattice();
  if (std::holds_alternative<Expr::Lit>(e.node)) return lat.bottom();
  if (const auto* v = std::get_if<Expr::Var>(&e.node)) {
    if (v->ref.fixed()) return lat.parse_elem(v->ref.level);
    return env.get(v->ref.base);
  }
  const auto& b = std::get<Expr::Bin>(e.node);
  return lat.join(expr_type(env, *b.lhs), expr_type(env, *b.rhs));
}

namespace detail {

inline std::vector<std::pair<std::string, Elem>> env_delta(const TypeEnv& in,
                                                           const TypeEnv& out) {
  std::vector<std::pair<std::string, Elem>> d;
  for (const auto& [var, level] : out)
    if (!(in.get(var) == level)) d.emplace_back(var, level);
  return d;
}

inline void trace_leaf(Trace* tr, int depth, std::string label,
                       const TypeEnv& in, const TypeEnv& out) {
  if (tr) tr->push_back({depth, std::move(label), env_delta(in, out)});
}

inline TypeEnv spc_rec(const Elem& pc, const TypeEnv& env, const Command& c,
                       int depth, Trace* tr, SpcStats* stats) {
  const Lattice& lat = *env.lattice();
  if (std::holds_alternative<Command::Skip>(c.node)) return env;
  if (const auto* a = std::get_if<Command::Assign>(&c.node)) {
    if (!env.contains(a->target.base))
      throw TypingError("variable '" + a->target.base +
                        "' is not in the environment");
    TypeEnv out = env;
    out.set(a->target.base, lat.join(pc, expr_type(env, *a->rhs)));
    trace_leaf(tr, depth, a->target.str() + " := " + to_string(*a->rhs), env,
               out);
    return out;
  }
  if (const auto* s = std::get_if<Command::Seq>(&c.node)) {
    TypeEnv mid = spc_rec(pc, env, *s->first, depth, tr, stats);
    return spc_rec(pc, mid, *s->second, depth, tr, stats);
  }
  if (const auto* i = std::get_if<Command::If>(&c.node)) {
    const Elem p = lat.join(pc, expr_type(env, *i->cond));
    std::size_t slot = 0;
    if (tr) {
      slot = tr->size();
      tr->push_back({depth, "if " + to_string(*i->cond), {}});
    }
    TypeEnv out_then = spc_rec(p, env, *i->then_branch, depth + 1, tr, stats);
    TypeEnv out_else = spc_rec(p, env, *i->else_branch, depth + 1, tr, stats);
    TypeEnv out = env_join(out_then, out_else);
    if (tr) (*tr)[slot].delta = env_delta(env, out);
    return out;
  }
  const auto& w = std::get<Command::While>(c.node);
  std::size_t slot = 0;
  if (tr) {
    slot = tr->size();
    tr->push_back({depth, "while " + to_string(*w.cond), {}});
  }
  TypeEnv cur = env;
  std::size_t passes = 0;
  while (true) {
    const Elem p = lat.join(pc, expr_type(cur, *w.cond));
    TypeEnv body_out = spc_rec(p, cur, *w.body, depth + 1, nullptr, stats);
    TypeEnv next = env_join(body_out, env);
    ++passes;
    if (next == cur) break;
    cur = std::move(next);
  }
  if (stats && passes > stats->max_loop_passes) stats->max_loop_passes = passes;
  if (tr) {
    (*tr)[slot].delta = env_delta(env, cur);
    const Elem p = lat.join(pc, expr_type(cur, *w.cond));
    spc_rec(p, cur, *w.body, depth + 1, tr, stats);
  }
  return cur;
}

} // namespace detail

/// Strongest-postcondition analysis: the least environment out such that
/// the judgement pc |- env {c} out holds. The input program must be
/// floating (no `x@T` occurrences).
inline TypeEnv spc(const Elem& pc, const TypeEnv& env, const Command& c,
                   Trace* trace = nullptr, SpcStats* stats = nullptr) {
  VarSets vs = free_vars(c);
  if (!vs.fixed.empty())
    throw TypingError("fixed variable '" + vs.fixed.begin()->str() +
                      "' is not allowed in flow-sensitive analysis");
  return detail::spc_rec(pc, env, c, 0, trace, stats);
}

/// A flow-sensitive typing judgement pc |- pre {c} post.
struct Judgement {
  Elem pc;
  TypeEnv pre;
  CommandPtr command;
  TypeEnv post;
};

/// Decide derivability of pc |- pre {c} post: the analysis result from the
/// pre-environment must lie below the claimed post-environment pointwise.
inline bool check_judgement(const Elem& pc, const TypeEnv& pre,
                            const Command& c, const TypeEnv& post) {
  detail::check_pointwise(pre, post);
  return env_leq(spc(pc, pre, c), post);
}

inline bool check_judgement(const Judgement& j) {
  return check_judgement(j.pc, j.pre, *j.command, j.post);
}

/// Render trace entries as indented `label : [x:H, y:M]` lines.
inline std::vector<std::string> render_trace(const Lattice& lat,
                                             const Trace& trace) {
  std::vector<std::string> out;
  out.reserve(trace.size());
  for (const auto& entry : trace) {
    std::string line(static_cast<std::size_t>(entry.depth) * 2, ' ');
    line += entry.label + " : [";
    bool first = true;
    for (const auto& [var, level] : entry.delta) {
      if (!first) line += ", ";
      first = false;
      line += var + ":" + lat.elem_name(level);
    }
    line += "]";
    out.push_back(std::move(line));
  }
  return out;
}

} // namespace flowlat

#endif
