// SPDX-License-Identifier: MIT
#ifndef FLOWLAT_PRINCIPAL_HPP
#define FLOWLAT_PRINCIPAL_HPP

#include <algorithm>
#include <string>
#include <vector>

#include "flowlat/typing.hpp"

namespace flowlat {

/// The analysis of a program over the powerset lattice of its variables.
/// delta maps each variable to the set of initial variables its final
/// value may depend on; delta0 is the identity environment x -> {x}.
/// Every typing of the program in any lattice is an instance of this one.
struct PrincipalTyping {
  LatticePtr lat; // powerset lattice over the universe
  TypeEnv delta0;
  TypeEnv delta;

  const std::vector<std::string>& universe() const { return lat->universe(); }
};

/// Compute the principal typing of `c` over a variable universe, which
/// must cover the program's variables.
inline PrincipalTyping principal(const Command& c,
                                 std::vector<std::string> universe) {
  LatticePtr lat = Lattice::powerset(std::move(universe));
  for (const auto& v : free_vars(c).floating)
    if (std::find(lat->universe().begin(), lat->universe().end(), v) ==
        lat->universe().end())
      throw TypingError("program variable '" + v +
                        "' is missing from the universe");
  TypeEnv delta0(lat);
  for (const auto& v : lat->universe()) delta0.set(v, lat->make_set({v}));
  TypeEnv delta = spc(lat->bottom(), delta0, c);
  return PrincipalTyping{lat, std::move(delta0), std::move(delta)};
}

/// Abstraction half of the Galois connection induced by an environment:
/// the join of the levels of a set of variables (bottom for the empty set).
inline Elem alpha(const TypeEnv& env, const std::vector<std::string>& vars) {
  const Lattice& lat = *env.lattice();
  Elem out = lat.bottom();
  for (const auto& v : vars) out = lat.join(out, env.get(v));
  return out;
}

/// Concretisation half: the set of environment variables at or below a
/// level.
inline std::vector<std::string> gamma(const TypeEnv& env, const Elem& t) {
  std::vector<std::string> out;
  for (const auto& [var, level] : env)
    if (env.lattice()->leq(level, t)) out.push_back(var);
  return out;
}

namespace detail {
inline void check_universe(const PrincipalTyping& pt, const TypeEnv& env) {
  if (env.domain() != pt.universe())
    throw TypingError(
        "environment domain must match the dependency universe");
}
} // namespace detail

/// Instantiate a dependency environment at a concrete pre-environment:
/// the least post-environment of any derivable judgement with this pre.
inline TypeEnv derive_smallest(const PrincipalTyping& pt, const TypeEnv& pre) {
  detail::check_universe(pt, pre);
  TypeEnv out(pre.lattice());
  for (const auto& v : pt.universe())
    out.set(v, alpha(pre, pt.lat->members(pt.delta.get(v))));
  return out;
}

/// The greatest pre-environment from which a claimed post-environment is
/// reachable. Variables no final value depends on get top.
inline TypeEnv derive_greatest(const PrincipalTyping& pt,
                               const TypeEnv& post) {
  detail::check_universe(pt, post);
  const Lattice& lat = *post.lattice();
  TypeEnv out(post.lattice());
  for (const auto& x : pt.universe()) {
    Elem level = lat.top();
    for (const auto& y : pt.universe()) {
      auto deps = pt.lat->members(pt.delta.get(y));
      if (std::binary_search(deps.begin(), deps.end(), x))
        level = lat.meet(level, post.get(y));
    }
    out.set(x, level);
  }
  return out;
}

/// A pre/post environment pair over one lattice.
struct Typing {
  TypeEnv pre;
  TypeEnv post;
};

/// Whether every program typable with `general` is also typable with
/// `specific`: each dependency constraint expressed by the first pair
/// must be expressed by the second. The two typings may live in different
/// lattices but must share one variable universe.
inline bool subsumes(const Typing& general, const Typing& specific) {
  detail::check_pointwise(general.pre, general.post);
  detail::check_pointwise(specific.pre, specific.post);
  if (!general.pre.same_domain(specific.pre))
    throw TypingError("typings have different variable universes");
  const Lattice& lat1 = *general.pre.lattice();
  const Lattice& lat2 = *specific.pre.lattice();
  for (const auto& [x, level_x] : general.pre)
    for (const auto& [y, level_y] : general.post)
      if (lat1.leq(level_x, level_y) &&
          !lat2.leq(specific.pre.get(x), specific.post.get(y)))
        return false;
  return true;
}

/// A dependency environment read the other way round: each variable maps
/// to the set of initial variables its final value is independent of.
struct IndependenceEnv {
  TypeEnv map;
};

/// Complement a dependency environment against its universe.
inline IndependenceEnv to_independence(const TypeEnv& delta) {
  const Lattice& lat = *delta.lattice();
  if (!lat.is_powerset())
    throw TypingError("independence views exist only over powerset lattices");
  TypeEnv out(delta.lattice());
  for (const auto& [var, level] : delta) {
    auto deps = lat.members(level);
    std::vector<std::string> rest;
    std::set_difference(lat.universe().begin(), lat.universe().end(),
                        deps.begin(), deps.end(), std::back_inserter(rest));
    out.set(var, lat.make_set(rest));
  }
  return IndependenceEnv{std::move(out)};
}

/// Inverse of to_independence; the complement is an involution.
inline TypeEnv from_independence(const IndependenceEnv& nabla) {
  return to_independence(nabla.map).map;
}

} // namespace flowlat

#endif
