// SPDX-License-Identifier: MIT
#ifndef FLOWLAT_ENV_HPP
#define FLOWLAT_ENV_HPP

#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "flowlat/error.hpp"
#include "flowlat/lattice.hpp"

namespace flowlat {

/// A typing environment: a finite map from variable names to elements of
/// one lattice. Iteration order is the variable name order, so renderings
/// are canonical.
class TypeEnv {
public:
  explicit TypeEnv(LatticePtr lattice) : lat_(std::move(lattice)) {}

  const LatticePtr& lattice() const { return lat_; }

  bool contains(const std::string& var) const { return map_.count(var) != 0; }

  const Elem& get(const std::string& var) const {
    auto it = map_.find(var);
    if (it == map_.end())
      throw TypingError("variable '" + var + "' is not in the environment");
    return it->second;
  }

  void set(const std::string& var, Elem level) {
    map_.insert_or_assign(var, std::move(level));
  }

  std::size_t size() const { return map_.size(); }
  auto begin() const { return map_.begin(); }
  auto end() const { return map_.end(); }

  std::vector<std::string> domain() const {
    std::vector<std::string> out;
    out.reserve(map_.size());
    for (const auto& [var, level] : map_) out.push_back(var);
    return out;
  }

  bool same_domain(const TypeEnv& other) const {
    if (map_.size() != other.map_.size()) return false;
    auto a = map_.begin();
    auto b = other.map_.begin();
    for (; a != map_.end(); ++a, ++b)
      if (a->first != b->first) return false;
    return true;
  }

  bool operator==(const TypeEnv& other) const {
    return compatible(other) && map_ == other.map_;
  }

  /// One `var : level` line per variable, sorted by name.
  std::string render() const {
    std::ostringstream os;
    for (const auto& [var, level] : map_)
      os << var << " : " << lat_->elem_name(level) << "\n";
    return os.str();
  }

  /// Parse the render() format. Blank lines and '#' comments are ignored.
  static TypeEnv parse(LatticePtr lattice, std::string_view text) {
    TypeEnv out(std::move(lattice));
    for (const auto& [line_no, line] : detail::data_lines(text)) {
      auto colon = line.find(':');
      if (colon == std::string::npos)
        throw ParseError("expected 'var : level'", line_no, 1);
      std::string var(detail::trim(std::string_view(line).substr(0, colon)));
      std::string level(detail::trim(std::string_view(line).substr(colon + 1)));
      if (!detail::valid_ident(var))
        throw ParseError("invalid variable name '" + var + "'", line_no, 1);
      if (out.contains(var))
        throw ParseError("duplicate variable '" + var + "'", line_no, 1);
      try {
        out.set(var, out.lat_->parse_elem(level));
      } catch (const LatticeError& e) {
        throw ParseError(e.what(), line_no, 1);
      }
    }
    return out;
  }

  /// Parse the one-line form `x:L,y:{a,b}`. Commas inside set literals do
  /// not split entries.
  static TypeEnv parse_inline(LatticePtr lattice, std::string_view text) {
    TypeEnv out(std::move(lattice));
    std::size_t start = 0;
    int depth = 0;
    auto take = [&](std::string_view item) {
      item = detail::trim(item);
      if (item.empty()) return;
      auto colon = item.find(':');
      if (colon == std::string_view::npos)
        throw TypingError("expected 'var:level' in '" + std::string(item) +
                          "'");
      std::string var(detail::trim(item.substr(0, colon)));
      std::string level(detail::trim(item.substr(colon + 1)));
      if (!detail::valid_ident(var))
        throw TypingError("invalid variable name '" + var + "'");
      if (out.contains(var))
        throw TypingError("duplicate variable '" + var + "'");
      out.set(var, out.lat_->parse_elem(level));
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
      if (text[i] == '{') ++depth;
      if (text[i] == '}') --depth;
      if (text[i] == ',' && depth == 0) {
        take(text.substr(start, i - start));
        start = i + 1;
      }
    }
    take(text.substr(start));
    return out;
  }

private:
  bool compatible(const TypeEnv& other) const {
    return lat_ == other.lat_ || lat_->same_as(*other.lat_);
  }

  LatticePtr lat_;
  std::map<std::string, Elem> map_;
};

namespace detail {
inline void check_pointwise(const TypeEnv& a, const TypeEnv& b) {
  if (a.lattice() != b.lattice() && !a.lattice()->same_as(*b.lattice()))
    throw TypingError("environments use different lattices");
  if (!a.same_domain(b))
    throw TypingError("environments have different domains");
}
} // namespace detail

/// Pointwise order: a(x) <= b(x) for every variable.
inline bool env_leq(const TypeEnv& a, const TypeEnv& b) {
  detail::check_pointwise(a, b);
  for (const auto& [var, level] : a)
    if (!a.lattice()->leq(level, b.get(var))) return false;
  return true;
}

inline TypeEnv env_join(const TypeEnv& a, const TypeEnv& b) {
  detail::check_pointwise(a, b);
  TypeEnv out(a.lattice());
  for (const auto& [var, level] : a)
    out.set(var, a.lattice()->join(level, b.get(var)));
  return out;
}

inline TypeEnv env_meet(const TypeEnv& a, const TypeEnv& b) {
  detail::check_pointwise(a, b);
  TypeEnv out(a.lattice());
  for (const auto& [var, level] : a)
    out.set(var, a.lattice()->meet(level, b.get(var)));
  return out;
}

/// True when the first meaningful line of an environment file is the
/// comment `# independence`, marking the independence reading of a
/// powerset environment.
inline bool has_independence_marker(std::string_view text) {
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    line = detail::trim(line);
    if (!line.empty()) return line == "# independence";
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return false;
}

} // namespace flowlat

#endif
