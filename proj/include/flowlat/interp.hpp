// SPDX-License-Identifier: MIT
#ifndef FLOWLAT_INTERP_HPP
#define FLOWLAT_INTERP_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "flowlat/ast.hpp"
#include "flowlat/error.hpp"

namespace flowlat {

/// A total map from declared variable references to integer values.
/// Reading or writing an undeclared reference is an error; new variables
/// enter the store only through declare().
class Store {
public:
  Store() = default;

  void declare(VarRef ref, Value v) { map_[std::move(ref)] = std::move(v); }
  void declare(const std::string& name, Value v) {
    declare(VarRef{name, {}}, std::move(v));
  }

  bool declared(const VarRef& ref) const { return map_.count(ref) != 0; }

  const Value& get(const VarRef& ref) const {
    auto it = map_.find(ref);
    if (it == map_.end())
      throw EvalError("undeclared variable '" + ref.str() + "'");
    return it->second;
  }
  const Value& get(const std::string& name) const {
    return get(VarRef{name, {}});
  }

  void set(const VarRef& ref, Value v) {
    auto it = map_.find(ref);
    if (it == map_.end())
      throw EvalError("undeclared variable '" + ref.str() + "'");
    it->second = std::move(v);
  }

  std::size_t size() const { return map_.size(); }
  auto begin() const { return map_.begin(); }
  auto end() const { return map_.end(); }

  bool operator==(const Store&) const = default;

  /// One `name = value` line per variable, sorted by reference.
  std::string render() const {
    std::ostringstream os;
    for (const auto& [ref, v] : map_) os << ref.str() << " = " << v << "\n";
    return os.str();
  }

  /// Parse the render() format. Blank lines and '#' comments are ignored.
  static Store parse(std::string_view text);

private:
  std::map<VarRef, Value> map_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

/// Split `text` into lines, dropping '#' comments and blank lines.
/// Returns (1-based line number, trimmed content) pairs.
inline std::vector<std::pair<int, std::string>> data_lines(
    std::string_view text) {
  std::vector<std::pair<int, std::string>> out;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (!line.empty()) out.emplace_back(line_no, std::string(line));
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return out;
}

inline bool valid_ident(std::string_view s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_')
    return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

inline bool valid_integer(std::string_view s) {
  if (!s.empty() && (s[0] == '-' || s[0] == '+')) s.remove_prefix(1);
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

} // namespace detail

inline Store Store::parse(std::string_view text) {
  Store out;
  for (const auto& [line_no, line] : detail::data_lines(text)) {
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("expected 'name = value'", line_no, 1);
    std::string name(detail::trim(std::string_view(line).substr(0, eq)));
    std::string val(detail::trim(std::string_view(line).substr(eq + 1)));
    std::string base = name, level;
    if (auto at = name.find('@'); at != std::string::npos) {
      base = name.substr(0, at);
      level = name.substr(at + 1);
      if (level.empty()) throw ParseError("empty level in '" + name + "'",
                                          line_no, 1);
    }
    if (!detail::valid_ident(base))
      throw ParseError("invalid variable name '" + base + "'", line_no, 1);
    if (!detail::valid_integer(val))
      throw ParseError("invalid integer '" + val + "'", line_no, 1);
    VarRef ref{base, level};
    if (out.declared(ref))
      throw ParseError("duplicate variable '" + name + "'", line_no, 1);
    out.declare(std::move(ref), Value(val));
  }
  return out;
}

/// Evaluate an expression in a store. Comparisons yield 1 or 0.
inline Value eval(const Expr& e, const Store& s) {
  if (const auto* l = std::get_if<Expr::Lit>(&e.node)) return l->value;
  if (const auto* v = std::get_if<Expr::Var>(&e.node)) return s.get(v->ref);
  const auto& b = std::get<Expr::Bin>(e.node);
  Value lhs = eval(*b.lhs, s);
  Value rhs = eval(*b.rhs, s);
  switch (b.op) {
  case BinOp::Add: return lhs + rhs;
  case BinOp::Sub: return lhs - rhs;
  case BinOp::Mul: return lhs * rhs;
  case BinOp::Eq: return Value(lhs == rhs ? 1 : 0);
  case BinOp::Ne: return Value(lhs != rhs ? 1 : 0);
  case BinOp::Lt: return Value(lhs < rhs ? 1 : 0);
  case BinOp::Le: return Value(lhs <= rhs ? 1 : 0);
  }
  throw EvalError("invalid operator");
}

namespace detail {
// Returns false when the fuel budget is exhausted.
inline bool exec_rec(const Command& c, Store& s, std::uint64_t& fuel) {
  if (std::holds_alternative<Command::Skip>(c.node)) return true;
  if (const auto* a = std::get_if<Command::Assign>(&c.node)) {
    s.set(a->target, eval(*a->rhs, s));
    return true;
  }
  if (const auto* q = std::get_if<Command::Seq>(&c.node))
    return exec_rec(*q->first, s, fuel) && exec_rec(*q->second, s, fuel);
  if (const auto* i = std::get_if<Command::If>(&c.node)) {
    const Command& branch =
        eval(*i->cond, s) != 0 ? *i->then_branch : *i->else_branch;
    return exec_rec(branch, s, fuel);
  }
  const auto& w = std::get<Command::While>(c.node);
  while (eval(*w.cond, s) != 0) {
    if (fuel == 0) return false;
    --fuel;
    if (!exec_rec(*w.body, s, fuel)) return false;
  }
  return true;
}
} // namespace detail

/// Big-step execution under a fuel budget. Any truthy (nonzero) guard counts;
/// each while-loop iteration consumes one unit of fuel. Returns the final
/// store, or nullopt if the budget ran out before termination.
inline std::optional<Store> exec(const Command& c, const Store& initial,
                                 std::uint64_t fuel) {
  Store s = initial;
  if (!detail::exec_rec(c, s, fuel)) return std::nullopt;
  return s;
}

} // namespace flowlat

#endif
