// SPDX-License-Identifier: MIT
#ifndef FLOWLAT_HARNESS_HPP
#define FLOWLAT_HARNESS_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "flowlat/interp.hpp"
#include "flowlat/principal.hpp"
#include "flowlat/transform.hpp"

namespace flowlat {

enum class Outcome { Pass, Counterexample, Inconclusive };

inline const char* outcome_name(Outcome o) {
  switch (o) {
  case Outcome::Pass: return "pass";
  case Outcome::Counterexample: return "counterexample";
  case Outcome::Inconclusive: return "inconclusive";
  }
  return "?";
}

/// A concrete refutation: two initial stores (one store and its final
/// state, for safety checks) and the variable they disagree on. For
/// noninterference the observation level is recorded too.
struct Witness {
  std::optional<Elem> level;
  Store sigma;
  Store rho;
  std::string variable;
};

struct CheckResult {
  Outcome outcome = Outcome::Pass;
  std::optional<Witness> witness;
  std::uint64_t pairs_tested = 0;
  /// Pairs dropped because execution hit the fuel bound. Nontermination
  /// never falsifies a judgement, so these only reduce coverage.
  std::uint64_t skipped_nontermination = 0;
  /// Pairs where exactly one side of an equivalence check ran out of
  /// fuel; they make the overall outcome inconclusive.
  std::uint64_t termination_mismatches = 0;
};

/// How to pick initial stores: every combination of domain values, or
/// seeded random sampling with a fixed trial count.
struct TestMode {
  bool exhaustive = true;
  std::uint64_t seed = 0;
  std::uint64_t trials = 100;

  static TestMode random(std::uint64_t seed, std::uint64_t trials = 100) {
    return TestMode{false, seed, trials};
  }
};

namespace detail {

/// Call fn for every assignment of domain values to vars (in the given
/// orders); fn returns false to stop early.
inline void for_each_store(const std::vector<std::string>& vars,
                           const std::vector<Value>& domain,
                           const std::function<bool(const Store&)>& fn) {
  std::vector<std::size_t> idx(vars.size(), 0);
  while (true) {
    Store s;
    for (std::size_t i = 0; i < vars.size(); ++i)
      s.declare(vars[i], domain[idx[i]]);
    if (!fn(s)) return;
    std::size_t i = 0;
    for (; i < vars.size(); ++i) {
      if (++idx[i] < domain.size()) break;
      idx[i] = 0;
    }
    if (i == vars.size()) return;
  }
}

inline Store random_store(std::mt19937_64& rng,
                          const std::vector<std::string>& vars,
                          const std::vector<Value>& domain) {
  Store s;
  for (const auto& v : vars)
    s.declare(v, domain[static_cast<std::size_t>(rng() % domain.size())]);
  return s;
}

/// Memoised execution keyed by the store contents.
class ExecCache {
public:
  ExecCache(const Command& c, std::uint64_t fuel) : c_(c), fuel_(fuel) {}

  const std::optional<Store>& run(const Store& s) {
    auto [it, fresh] = cache_.try_emplace(render_key(s));
    if (fresh) it->second = exec(c_, s, fuel_);
    return it->second;
  }

private:
  static std::string render_key(const Store& s) { return s.render(); }
  const Command& c_;
  std::uint64_t fuel_;
  std::map<std::string, std::optional<Store>> cache_;
};

inline void check_floating_program(const Command& c, const TypeEnv& env) {
  VarSets vs = free_vars(c);
  if (!vs.fixed.empty())
    throw TypingError("fixed variable '" + vs.fixed.begin()->str() +
                      "' is not allowed here");
  for (const auto& v : vs.floating)
    if (!env.contains(v))
      throw TypingError("variable '" + v + "' is not in the environment");
}

} // namespace detail

/// Test the noninterference statement of a judgement pc |- pre {c} post
/// against the semantics: for every observation level, runs from stores
/// that agree on the variables visible at that level under `pre` must
/// produce stores that agree on the variables visible under `post`.
/// Distinct levels with the same visible pre-set are checked together.
/// Pairs where either run exhausts the fuel budget are skipped, never
/// counted as refutations.
inline CheckResult ni_check(const Command& c, const TypeEnv& pre,
                            const TypeEnv& post,
                            const std::vector<Value>& domain,
                            const TestMode& mode = {},
                            std::uint64_t fuel = 64) {
  detail::check_pointwise(pre, post);
  detail::check_floating_program(c, pre);
  if (domain.empty()) throw Error("value domain is empty");

  const std::vector<std::string> vars = pre.domain();

  struct Group {
    std::vector<std::pair<Elem, std::vector<std::string>>> levels;
    std::vector<std::string> observe; // union of post-visible sets
  };
  std::map<std::vector<std::string>, Group> groups;
  for (const Elem& t : pre.lattice()->elements()) {
    std::vector<std::string> low_pre = gamma(pre, t);
    std::vector<std::string> low_post = gamma(post, t);
    Group& g = groups[low_pre];
    g.levels.emplace_back(t, low_post);
    std::vector<std::string> merged;
    std::set_union(g.observe.begin(), g.observe.end(), low_post.begin(),
                   low_post.end(), std::back_inserter(merged));
    g.observe = std::move(merged);
  }

  CheckResult result;
  detail::ExecCache cache(c, fuel);

  auto check_pair = [&](const Group& g, const Store& sigma,
                        const Store& rho) -> bool {
    const auto& out_sigma = cache.run(sigma);
    const auto& out_rho = cache.run(rho);
    if (!out_sigma || !out_rho) {
      ++result.skipped_nontermination;
      return true;
    }
    ++result.pairs_tested;
    for (const auto& y : g.observe) {
      if (out_sigma->get(y) == out_rho->get(y)) continue;
      Elem level = g.levels.front().first;
      for (const auto& [t, low_post] : g.levels)
        if (std::binary_search(low_post.begin(), low_post.end(), y)) {
          level = t;
          break;
        }
      result.outcome = Outcome::Counterexample;
      result.witness = Witness{level, sigma, rho, y};
      return false;
    }
    return true;
  };

  for (const auto& [low_pre, group] : groups) {
    if (group.observe.empty()) continue;
    std::vector<std::string> free;
    std::set_difference(vars.begin(), vars.end(), low_pre.begin(),
                        low_pre.end(), std::back_inserter(free));
    if (free.empty()) continue; // related stores are identical
    bool keep_going = true;
    if (mode.exhaustive) {
      detail::for_each_store(vars, domain, [&](const Store& sigma) {
        detail::for_each_store(free, domain, [&](const Store& partial) {
          Store rho = sigma;
          for (const auto& [ref, v] : partial) rho.set(ref, v);
          keep_going = check_pair(group, sigma, rho);
          return keep_going;
        });
        return keep_going;
      });
    } else {
      std::mt19937_64 rng(mode.seed);
      for (std::uint64_t i = 0; i < mode.trials && keep_going; ++i) {
        Store sigma = detail::random_store(rng, vars, domain);
        Store rho = sigma;
        for (const auto& v : free)
          rho.set(VarRef{v, {}},
                  domain[static_cast<std::size_t>(rng() % domain.size())]);
        keep_going = check_pair(group, sigma, rho);
      }
    }
    if (!keep_going) break;
  }
  return result;
}

/// Test the write-safety half of a judgement: a run from any store must
/// leave every variable whose post-level does not dominate pc unchanged.
/// Vacuous when pc is bottom.
inline CheckResult safety_check(const Command& c, const Elem& pc,
                                const TypeEnv& post,
                                const std::vector<Value>& domain,
                                std::uint64_t fuel = 64,
                                const TestMode& mode = {}) {
  detail::check_floating_program(c, post);
  if (domain.empty()) throw Error("value domain is empty");
  const Lattice& lat = *post.lattice();

  std::vector<std::string> frozen;
  for (const auto& [var, level] : post)
    if (!lat.leq(pc, level)) frozen.push_back(var);

  CheckResult result;
  if (frozen.empty()) return result;

  const std::vector<std::string> vars = post.domain();
  auto check_store = [&](const Store& sigma) -> bool {
    std::optional<Store> out = exec(c, sigma, fuel);
    if (!out) {
      ++result.skipped_nontermination;
      return true;
    }
    ++result.pairs_tested;
    for (const auto& x : frozen) {
      if (out->get(x) == sigma.get(x)) continue;
      result.outcome = Outcome::Counterexample;
      result.witness = Witness{pc, sigma, *out, x};
      return false;
    }
    return true;
  };

  if (mode.exhaustive) {
    detail::for_each_store(vars, domain, check_store);
  } else {
    std::mt19937_64 rng(mode.seed);
    for (std::uint64_t i = 0; i < mode.trials; ++i)
      if (!check_store(detail::random_store(rng, vars, domain))) break;
  }
  return result;
}

/// Test that a fixed program simulates a floating one: running both from
/// compatible stores must end in compatible stores. A store over the
/// floating variables is compatible with a fixed store when each x agrees
/// with x at its environment level; the fixed store holds zero at every
/// other level. Pairs where both runs exhaust fuel are skipped; pairs
/// where exactly one does make the result inconclusive.
inline CheckResult equiv_check(const Command& c, const Command& d,
                               const TypeEnv& pre, const TypeEnv& post,
                               const std::vector<Value>& domain,
                               std::uint64_t fuel = 64,
                               const TestMode& mode = {}) {
  detail::check_pointwise(pre, post);
  detail::check_floating_program(c, pre);
  VarSets dv = free_vars(d);
  if (!dv.floating.empty())
    throw TypingError("floating variable '" + *dv.floating.begin() +
                      "' is not allowed in a fixed-type program");
  if (domain.empty()) throw Error("value domain is empty");
  const Lattice& lat = *pre.lattice();

  CheckResult result;
  const std::vector<std::string> vars = pre.domain();

  auto check_store = [&](const Store& sigma) -> bool {
    Store rho;
    for (const auto& [var, level] : pre)
      rho.declare(VarRef{var, lat.elem_name(level)}, sigma.get(var));
    for (const auto& ref : dv.fixed)
      if (!rho.declared(ref)) rho.declare(ref, Value(0));
    std::optional<Store> out_c = exec(c, sigma, fuel);
    std::optional<Store> out_d = exec(d, rho, fuel);
    if (!out_c && !out_d) {
      ++result.skipped_nontermination;
      return true;
    }
    if (!out_c || !out_d) {
      ++result.termination_mismatches;
      return true;
    }
    ++result.pairs_tested;
    for (const auto& [var, level] : post) {
      VarRef ref{var, lat.elem_name(level)};
      if (!out_d->declared(ref) || out_c->get(var) != out_d->get(ref)) {
        result.outcome = Outcome::Counterexample;
        result.witness = Witness{std::nullopt, sigma, rho, var};
        return false;
      }
    }
    return true;
  };

  if (mode.exhaustive) {
    detail::for_each_store(vars, domain, check_store);
  } else {
    std::mt19937_64 rng(mode.seed);
    for (std::uint64_t i = 0; i < mode.trials; ++i)
      if (!check_store(detail::random_store(rng, vars, domain))) break;
  }
  if (result.outcome == Outcome::Pass && result.termination_mismatches > 0)
    result.outcome = Outcome::Inconclusive;
  return result;
}

// -- generators ---------------------------------------------------------------

namespace detail {

inline ExprPtr gen_expr(std::mt19937_64& rng,
                        const std::vector<std::string>& vars, int depth) {
  const auto pick_var = [&]() {
    return var(vars[static_cast<std::size_t>(rng() % vars.size())]);
  };
  if (depth <= 0 || rng() % 10 < 3) {
    if (rng() % 2 == 0) return lit(Value(static_cast<int>(rng() % 3)));
    return pick_var();
  }
  static const BinOp ops[] = {BinOp::Add, BinOp::Sub, BinOp::Mul,
                              BinOp::Eq,  BinOp::Ne,  BinOp::Lt,
                              BinOp::Le};
  BinOp op = ops[rng() % 7];
  return bin(op, gen_expr(rng, vars, depth - 1),
             gen_expr(rng, vars, depth - 1));
}

inline CommandPtr gen_cmd(std::mt19937_64& rng,
                          const std::vector<std::string>& vars, int depth) {
  const auto pick_name = [&]() {
    return vars[static_cast<std::size_t>(rng() % vars.size())];
  };
  if (depth <= 1) return assign(pick_name(), gen_expr(rng, vars, 1));
  switch (rng() % 20) {
  case 0:
  case 1: return skip();
  case 2:
  case 3:
  case 4:
  case 5:
  case 6: {
    CommandPtr first = gen_cmd(rng, vars, depth - 1);
    CommandPtr second = gen_cmd(rng, vars, depth - 1);
    return seq_left(std::move(first), std::move(second));
  }
  case 7:
  case 8:
  case 9:
    return if_then_else(gen_expr(rng, vars, 1),
                        gen_cmd(rng, vars, depth - 1),
                        gen_cmd(rng, vars, depth - 1));
  case 10:
  case 11: {
    // counting loop: always terminates
    std::string v = pick_name();
    CommandPtr body = seq(gen_cmd(rng, vars, depth - 2),
                          assign(v, bin(BinOp::Sub, var(v), lit(1))));
    return seq(assign(v, lit(Value(static_cast<int>(rng() % 3 + 1)))),
               while_do(bin(BinOp::Lt, lit(0), var(v)), std::move(body)));
  }
  case 12:
    return while_do(gen_expr(rng, vars, 1), gen_cmd(rng, vars, depth - 1));
  default: return assign(pick_name(), gen_expr(rng, vars, 2));
  }
}

} // namespace detail

/// Deterministic random program over the given variables. `size` bounds
/// the nesting depth; size 1 yields a single assignment. All five command
/// forms appear across seeds, and most generated loops count down so runs
/// terminate well inside typical fuel budgets.
inline CommandPtr gen_program(std::uint64_t seed, int size,
                              const std::vector<std::string>& vars) {
  if (vars.empty()) throw Error("gen_program needs at least one variable");
  if (size < 1) throw Error("gen_program needs a positive size bound");
  std::mt19937_64 rng(seed);
  return detail::gen_cmd(rng, vars, size);
}

/// Deterministic random environment: each variable gets an independently
/// chosen lattice element.
inline TypeEnv gen_env(std::uint64_t seed, LatticePtr lattice,
                       const std::vector<std::string>& vars) {
  std::mt19937_64 rng(seed);
  TypeEnv out(lattice);
  std::vector<std::string> sorted = vars;
  std::sort(sorted.begin(), sorted.end());
  if (lattice->is_powerset()) {
    for (const auto& v : sorted) {
      std::vector<std::string> members;
      for (const auto& u : lattice->universe())
        if (rng() % 2 == 0) members.push_back(u);
      out.set(v, lattice->make_set(members));
    }
    return out;
  }
  std::vector<Elem> elems = lattice->elements();
  for (const auto& v : sorted)
    out.set(v, elems[static_cast<std::size_t>(rng() % elems.size())]);
  return out;
}

} // namespace flowlat

#endif
