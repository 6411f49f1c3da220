// SPDX-License-Identifier: MIT
//
// An independent decision procedure for the declarative type system,
// used to validate the algorithmic analysis. It enumerates the full
// derivability relation over a small lattice and variable set directly
// from the inference rules (skip, assign, seq, if, while, subsumption),
// with no reference to the analysis under test.
#ifndef FLOWLAT_TESTS_ORACLE_HPP
#define FLOWLAT_TESTS_ORACLE_HPP

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "flowlat/flowlat.hpp"

namespace flowlat::testing {

class DeclarativeOracle {
public:
  DeclarativeOracle(LatticePtr lat, std::vector<std::string> vars)
      : lat_(std::move(lat)), vars_(std::move(vars)),
        elems_(lat_->elements()) {
    // enumerate every environment over vars
    std::vector<std::size_t> idx(vars_.size(), 0);
    while (true) {
      TypeEnv env(lat_);
      for (std::size_t i = 0; i < vars_.size(); ++i)
        env.set(vars_[i], elems_[idx[i]]);
      env_index_[env.render()] = envs_.size();
      envs_.push_back(std::move(env));
      std::size_t i = 0;
      for (; i < vars_.size(); ++i) {
        if (++idx[i] < elems_.size()) break;
        idx[i] = 0;
      }
      if (i == vars_.size()) break;
    }
    env_leq_.assign(envs_.size() * envs_.size(), false);
    for (std::size_t a = 0; a < envs_.size(); ++a)
      for (std::size_t b = 0; b < envs_.size(); ++b)
        env_leq_[a * envs_.size() + b] = env_leq(envs_[a], envs_[b]);
  }

  std::size_t num_elems() const { return elems_.size(); }
  std::size_t num_envs() const { return envs_.size(); }
  const Elem& elem(std::size_t i) const { return elems_[i]; }
  const TypeEnv& env(std::size_t i) const { return envs_[i]; }

  /// Dense derivability table for `c`, indexed by triple().
  std::vector<bool> derivable(const Command& c) const {
    if (std::holds_alternative<Command::Skip>(c.node)) {
      std::vector<bool> d = none();
      for (std::size_t p = 0; p < elems_.size(); ++p)
        for (std::size_t g = 0; g < envs_.size(); ++g)
          d[triple(p, g, g)] = true;
      return close(d);
    }
    if (const auto* a = std::get_if<Command::Assign>(&c.node)) {
      std::vector<bool> d = none();
      for (std::size_t p = 0; p < elems_.size(); ++p)
        for (std::size_t g = 0; g < envs_.size(); ++g) {
          const Elem t = expr_type(envs_[g], *a->rhs);
          TypeEnv post = envs_[g];
          post.set(a->target.base, lat_->join(elems_[p], t));
          d[triple(p, g, env_index_.at(post.render()))] = true;
        }
      return close(d);
    }
    if (const auto* s = std::get_if<Command::Seq>(&c.node)) {
      const std::vector<bool> d1 = derivable(*s->first);
      const std::vector<bool> d2 = derivable(*s->second);
      std::vector<bool> d = none();
      for (std::size_t p = 0; p < elems_.size(); ++p)
        for (std::size_t g = 0; g < envs_.size(); ++g)
          for (std::size_t m = 0; m < envs_.size(); ++m) {
            if (!d1[triple(p, g, m)]) continue;
            for (std::size_t g2 = 0; g2 < envs_.size(); ++g2)
              if (d2[triple(p, m, g2)]) d[triple(p, g, g2)] = true;
          }
      return close(d);
    }
    if (const auto* i = std::get_if<Command::If>(&c.node)) {
      const std::vector<bool> d1 = derivable(*i->then_branch);
      const std::vector<bool> d2 = derivable(*i->else_branch);
      std::vector<bool> d = none();
      for (std::size_t p = 0; p < elems_.size(); ++p)
        for (std::size_t g = 0; g < envs_.size(); ++g) {
          const std::size_t pt =
              elem_index(lat_->join(elems_[p], expr_type(envs_[g], *i->cond)));
          for (std::size_t g2 = 0; g2 < envs_.size(); ++g2)
            if (d1[triple(pt, g, g2)] && d2[triple(pt, g, g2)])
              d[triple(p, g, g2)] = true;
        }
      return close(d);
    }
    const auto& w = std::get<Command::While>(c.node);
    const std::vector<bool> db = derivable(*w.body);
    std::vector<bool> d = none();
    for (std::size_t p = 0; p < elems_.size(); ++p)
      for (std::size_t g = 0; g < envs_.size(); ++g) {
        const std::size_t pt =
            elem_index(lat_->join(elems_[p], expr_type(envs_[g], *w.cond)));
        if (db[triple(pt, g, g)]) d[triple(p, g, g)] = true;
      }
    return close(d);
  }

  std::size_t triple(std::size_t p, std::size_t pre, std::size_t post) const {
    return (p * envs_.size() + pre) * envs_.size() + post;
  }

private:
  std::vector<bool> none() const {
    return std::vector<bool>(elems_.size() * envs_.size() * envs_.size(),
                             false);
  }

  std::size_t elem_index(const Elem& e) const {
    for (std::size_t i = 0; i < elems_.size(); ++i)
      if (elems_[i] == e) return i;
    throw Error("element not found");
  }

  // Subsumption closure: lower the context, lower the pre-environment,
  // raise the post-environment.
  std::vector<bool> close(const std::vector<bool>& d) const {
    std::vector<bool> out = none();
    for (std::size_t p1 = 0; p1 < elems_.size(); ++p1)
      for (std::size_t g1 = 0; g1 < envs_.size(); ++g1)
        for (std::size_t h1 = 0; h1 < envs_.size(); ++h1) {
          if (!d[triple(p1, g1, h1)]) continue;
          for (std::size_t p2 = 0; p2 < elems_.size(); ++p2) {
            if (!lat_->leq(elems_[p2], elems_[p1])) continue;
            for (std::size_t g2 = 0; g2 < envs_.size(); ++g2) {
              if (!env_leq_[g2 * envs_.size() + g1]) continue;
              for (std::size_t h2 = 0; h2 < envs_.size(); ++h2)
                if (env_leq_[h1 * envs_.size() + h2])
                  out[triple(p2, g2, h2)] = true;
            }
          }
        }
    return out;
  }

  LatticePtr lat_;
  std::vector<std::string> vars_;
  std::vector<Elem> elems_;
  std::vector<TypeEnv> envs_;
  std::map<std::string, std::size_t> env_index_;
  std::vector<bool> env_leq_;
};

/// Every program of nesting depth at most 2 over two variables and a
/// fixed expression alphabet: 450 commands in total.
inline std::vector<CommandPtr> enumerate_small_programs() {
  std::vector<ExprPtr> exprs = {lit(0), var("x"), var("y"),
                                bin(BinOp::Add, var("x"), var("y"))};
  std::vector<CommandPtr> depth1;
  depth1.push_back(skip());
  for (const auto& target : {std::string("x"), std::string("y")})
    for (const auto& e : exprs) depth1.push_back(assign(target, e));
  std::vector<CommandPtr> out = depth1;
  for (const auto& c1 : depth1)
    for (const auto& c2 : depth1) out.push_back(seq(c1, c2));
  for (const auto& e : exprs)
    for (const auto& c1 : depth1)
      for (const auto& c2 : depth1)
        out.push_back(if_then_else(e, c1, c2));
  for (const auto& e : exprs)
    for (const auto& c : depth1) out.push_back(while_do(e, c));
  return out;
}

} // namespace flowlat::testing

#endif
