// SPDX-License-Identifier: MIT
#ifndef FLOWLAT_TESTS_HELPERS_HPP
#define FLOWLAT_TESTS_HELPERS_HPP

#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "flowlat/flowlat.hpp"

namespace flowlat::testing {

inline TypeEnv make_env(
    const LatticePtr& lat,
    std::initializer_list<std::pair<const char*, const char*>> items) {
  TypeEnv env(lat);
  for (const auto& [var, level] : items)
    env.set(var, lat->parse_elem(level));
  return env;
}

/// Total chain lattice with k elements E0 < E1 < ... (k >= 1).
inline LatticePtr chain(int k) {
  std::vector<std::string> elements;
  std::vector<std::pair<std::string, std::string>> covers;
  for (int i = 0; i < k; ++i) {
    elements.push_back("E" + std::to_string(i));
    if (i > 0) covers.emplace_back(elements[i - 1], elements[i]);
  }
  return Lattice::build("chain" + std::to_string(k), std::move(elements),
                        std::move(covers));
}

/// Floating variables of a command as a sorted vector.
inline std::vector<std::string> floating_vars(const Command& c) {
  VarSets vs = free_vars(c);
  return {vs.floating.begin(), vs.floating.end()};
}

/// Every environment over vars, in odometer order over lat->elements().
inline std::vector<TypeEnv> all_envs(const LatticePtr& lat,
                                     const std::vector<std::string>& vars) {
  const std::vector<Elem> elems = lat->elements();
  std::vector<TypeEnv> out;
  std::vector<std::size_t> idx(vars.size(), 0);
  while (true) {
    TypeEnv env(lat);
    for (std::size_t i = 0; i < vars.size(); ++i)
      env.set(vars[i], elems[idx[i]]);
    out.push_back(std::move(env));
    std::size_t i = 0;
    for (; i < vars.size(); ++i) {
      if (++idx[i] < elems.size()) break;
      idx[i] = 0;
    }
    if (i == vars.size()) return out;
  }
}

/// Hand-written programs exercising every construct, all floating, over
/// variables drawn from {h, l, w, x, y, z}. Shared by round-trip, typing,
/// translation and harness properties.
inline const std::vector<std::string>& corpus_sources() {
  static const std::vector<std::string> sources = {
      "skip",
      "x := 0",
      "l := h",
      "l := h ; l := 0 ; h := 0 ; l := h",
      "if h == h then l := 0 else l := h end",
      "if x then y := z else y := 0 end",
      "x := 3 ; while 0 < x do y := y + x ; x := x - 1 end",
      "while h do l := l + 1 end",
      "if x == 0 then y := y + 1 ; w := z end ; "
      "while 0 < x do z := z + w ; x := x - 1 ; z := x end",
      "x := 2 ; y := 0 ; while 0 < x do z := 1 ; "
      "while 0 < z do y := y + 1 ; z := z - 1 end ; x := x - 1 end",
      "if x < y then if y < z then w := 1 else w := 2 end else w := 3 end",
      "x := y * z + 1 ; y := (x - z) * (x + z)",
      "if x != y then x := y end ; z := x",
      "w := 1 ; while w <= 2 do x := x + h ; w := w + 1 end",
  };
  return sources;
}

inline std::vector<CommandPtr> corpus() {
  std::vector<CommandPtr> out;
  for (const auto& src : corpus_sources()) out.push_back(parse_program(src));
  return out;
}

inline std::vector<std::string> corpus_vars() {
  return {"h", "l", "w", "x", "y", "z"};
}

/// Environment covering corpus_vars(), assigning each variable an element
/// cycled from the lattice (deterministic, lattice-agnostic).
inline TypeEnv cycled_env(const LatticePtr& lat,
                          const std::vector<std::string>& vars,
                          std::size_t phase = 0) {
  TypeEnv env(lat);
  if (lat->is_powerset()) {
    const auto& uni = lat->universe();
    std::size_t i = phase;
    for (const auto& v : vars) {
      std::vector<std::string> members;
      for (std::size_t j = 0; j < uni.size(); ++j)
        if (((i >> j) & 1) != 0) members.push_back(uni[j]);
      env.set(v, lat->make_set(members));
      ++i;
    }
    return env;
  }
  const std::vector<Elem> elems = lat->elements();
  std::size_t i = phase;
  for (const auto& v : vars) env.set(v, elems[i++ % elems.size()]);
  return env;
}

} // namespace flowlat::testing

#endif
