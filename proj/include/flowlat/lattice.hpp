// SPDX-License-Identifier: MIT
#ifndef FLOWLAT_LATTICE_HPP
#define FLOWLAT_LATTICE_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "flowlat/error.hpp"
#include "flowlat/interp.hpp"

namespace flowlat {

class Lattice;
using LatticePtr = std::shared_ptr<const Lattice>;

/// An element of a Lattice. Values are meaningful only together with the
/// lattice that produced them: a named-lattice element is an index into the
/// element table, a powerset element is a sorted set of universe indices.
class Elem {
public:
  Elem() : rep_(std::uint32_t{0}) {}

  bool operator==(const Elem&) const = default;
  bool operator<(const Elem& other) const { return rep_ < other.rep_; }

private:
  friend class Lattice;
  using Set = std::vector<std::uint32_t>;
  explicit Elem(std::uint32_t id) : rep_(id) {}
  explicit Elem(Set s) : rep_(std::move(s)) {}

  std::uint32_t id() const { return std::get<std::uint32_t>(rep_); }
  const Set& set() const { return std::get<Set>(rep_); }

  std::variant<std::uint32_t, Set> rep_;
};

/// A finite lattice of security levels. Two representations share one
/// interface: a named lattice described by elements and cover pairs, with
/// order/join/meet tables precomputed at construction, and a powerset
/// lattice over a variable universe, whose elements are computed lazily as
/// sets so that large universes stay cheap.
class Lattice {
public:
  enum class Kind { Named, Powerset };

  /// Build a named lattice and verify the lattice laws: the cover relation
  /// must be acyclic and every pair of elements must have a least upper
  /// bound and a greatest lower bound. Violations raise LatticeError naming
  /// an offending pair.
  static LatticePtr build(std::string name, std::vector<std::string> elements,
                          std::vector<std::pair<std::string, std::string>>
                              covers) {
    auto lat = LatticePtr(new Lattice(std::move(name), std::move(elements),
                                      std::move(covers)));
    return lat;
  }

  /// The powerset lattice over a set of variable names, ordered by
  /// inclusion. The universe is kept sorted; renderings are canonical.
  static LatticePtr powerset(std::vector<std::string> universe) {
    return LatticePtr(new Lattice(std::move(universe)));
  }

  /// Built-in two-point lattice L < H.
  static LatticePtr two_point() {
    return build("two-point", {"L", "H"}, {{"L", "H"}});
  }

  /// Built-in diamond lattice L < M,N < H with M,N incomparable.
  static LatticePtr diamond() {
    return build("diamond", {"L", "M", "N", "H"},
                 {{"L", "M"}, {"L", "N"}, {"M", "H"}, {"N", "H"}});
  }

  /// Parse a named-lattice description:
  ///   lattice <name>
  ///   elements <e1> <e2> ...
  ///   order <lower> < <upper>     (one line per cover pair)
  static LatticePtr parse_file(std::string_view text);

  Kind kind() const { return kind_; }
  bool is_powerset() const { return kind_ == Kind::Powerset; }
  const std::string& name() const { return name_; }

  /// Structural identity: same kind, same element names, same order.
  bool same_as(const Lattice& other) const {
    return kind_ == other.kind_ && names_ == other.names_ &&
           leq_ == other.leq_;
  }

  /// Powerset lattices only: the sorted variable universe.
  const std::vector<std::string>& universe() const {
    require(is_powerset(), "not a powerset lattice");
    return names_;
  }

  bool leq(const Elem& a, const Elem& b) const {
    if (is_powerset())
      return std::includes(b.set().begin(), b.set().end(), a.set().begin(),
                           a.set().end());
    return leq_[a.id() * n_ + b.id()];
  }

  Elem join(const Elem& a, const Elem& b) const {
    if (is_powerset()) {
      Elem::Set out;
      std::set_union(a.set().begin(), a.set().end(), b.set().begin(),
                     b.set().end(), std::back_inserter(out));
      return Elem(std::move(out));
    }
    return Elem(join_[a.id() * n_ + b.id()]);
  }

  Elem meet(const Elem& a, const Elem& b) const {
    if (is_powerset()) {
      Elem::Set out;
      std::set_intersection(a.set().begin(), a.set().end(), b.set().begin(),
                            b.set().end(), std::back_inserter(out));
      return Elem(std::move(out));
    }
    return Elem(meet_[a.id() * n_ + b.id()]);
  }

  Elem bottom() const {
    return is_powerset() ? Elem(Elem::Set{}) : Elem(bot_);
  }

  Elem top() const {
    if (!is_powerset()) return Elem(top_);
    Elem::Set all(n_);
    for (std::uint32_t i = 0; i < n_; ++i) all[i] = i;
    return Elem(std::move(all));
  }

  /// Resolve an element written as text: a declared name for named
  /// lattices, a set literal like `{a,b}` or `{}` for powerset lattices.
  Elem parse_elem(std::string_view text) const {
    if (!text.empty() && text.front() == '{') {
      require(is_powerset(),
              "set literal '" + std::string(text) +
                  "' is only valid for powerset lattices");
      if (text.back() != '}')
        throw LatticeError("malformed set literal '" + std::string(text) +
                           "'");
      std::vector<std::string> members;
      std::string_view body = text.substr(1, text.size() - 2);
      while (!body.empty()) {
        auto comma = body.find(',');
        std::string_view item = body.substr(0, comma);
        item = detail::trim(item);
        if (item.empty())
          throw LatticeError("malformed set literal '" + std::string(text) +
                             "'");
        members.emplace_back(item);
        if (comma == std::string_view::npos) break;
        body.remove_prefix(comma + 1);
      }
      return make_set(members);
    }
    require(!is_powerset(), "element '" + std::string(text) +
                                "' of a powerset lattice must be a set "
                                "literal like {a,b}");
    for (std::uint32_t i = 0; i < n_; ++i)
      if (names_[i] == text) return Elem(i);
    throw LatticeError("unknown element '" + std::string(text) +
                       "' in lattice '" + name_ + "'");
  }

  std::string elem_name(const Elem& e) const {
    if (!is_powerset()) return names_[e.id()];
    std::string out = "{";
    bool first = true;
    for (std::uint32_t id : e.set()) {
      if (!first) out += ",";
      first = false;
      out += names_[id];
    }
    return out += "}";
  }

  /// Powerset lattices only: the element for a set of universe variables.
  Elem make_set(const std::vector<std::string>& vars) const {
    require(is_powerset(), "not a powerset lattice");
    Elem::Set ids;
    for (const auto& v : vars) {
      auto it = std::lower_bound(names_.begin(), names_.end(), v);
      if (it == names_.end() || *it != v)
        throw LatticeError("variable '" + v +
                           "' is not in the powerset universe");
      ids.push_back(static_cast<std::uint32_t>(it - names_.begin()));
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return Elem(std::move(ids));
  }

  /// Powerset lattices only: the variables in a set element.
  std::vector<std::string> members(const Elem& e) const {
    require(is_powerset(), "not a powerset lattice");
    std::vector<std::string> out;
    out.reserve(e.set().size());
    for (std::uint32_t id : e.set()) out.push_back(names_[id]);
    return out;
  }

  /// Number of elements. Powerset universes are capped at 63 variables
  /// here only because the count itself would overflow.
  std::uint64_t size() const {
    if (!is_powerset()) return n_;
    require(n_ <= 63, "powerset universe too large to count");
    return std::uint64_t{1} << n_;
  }

  /// Length of the longest chain, counted in covers: 1 for the two-point
  /// lattice, |universe| for a powerset.
  std::size_t height() const {
    if (is_powerset()) return n_;
    std::vector<std::size_t> h(n_, 0);
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::uint32_t i = 0; i < n_; ++i)
        for (std::uint32_t j = 0; j < n_; ++j)
          if (i != j && leq_[i * n_ + j] && h[i] + 1 > h[j]) {
            h[j] = h[i] + 1;
            changed = true;
          }
    }
    return *std::max_element(h.begin(), h.end());
  }

  /// All elements, in declaration order for named lattices and in subset
  /// enumeration order for powersets. Refused for universes larger than 16
  /// variables; the powerset representation stays usable far beyond that,
  /// only full enumeration is off the table.
  std::vector<Elem> elements() const {
    std::vector<Elem> out;
    if (!is_powerset()) {
      for (std::uint32_t i = 0; i < n_; ++i) out.push_back(Elem(i));
      return out;
    }
    require(n_ <= 16, "refusing to enumerate a powerset lattice over more "
                      "than 16 variables");
    const std::uint32_t count = std::uint32_t{1} << n_;
    out.reserve(count);
    for (std::uint32_t mask = 0; mask < count; ++mask) {
      Elem::Set s;
      for (std::uint32_t i = 0; i < n_; ++i)
        if (mask & (std::uint32_t{1} << i)) s.push_back(i);
      out.push_back(Elem(std::move(s)));
    }
    return out;
  }

private:
  Lattice(std::vector<std::string> universe)
      : kind_(Kind::Powerset), name_("powerset"), names_(std::move(universe)) {
    std::sort(names_.begin(), names_.end());
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (!detail::valid_ident(names_[i]))
        throw LatticeError("invalid variable name '" + names_[i] + "'");
      if (i > 0 && names_[i] == names_[i - 1])
        throw LatticeError("duplicate variable '" + names_[i] +
                           "' in powerset universe");
    }
    n_ = static_cast<std::uint32_t>(names_.size());
  }

  Lattice(std::string name, std::vector<std::string> elements,
          std::vector<std::pair<std::string, std::string>> covers)
      : kind_(Kind::Named), name_(std::move(name)),
        names_(std::move(elements)) {
    if (names_.empty())
      throw LatticeError("lattice '" + name_ + "' has no elements");
    std::map<std::string, std::uint32_t> index;
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (!detail::valid_ident(names_[i]))
        throw LatticeError("invalid element name '" + names_[i] + "'");
      if (!index.emplace(names_[i], static_cast<std::uint32_t>(i)).second)
        throw LatticeError("duplicate element '" + names_[i] +
                           "' in lattice '" + name_ + "'");
    }
    n_ = static_cast<std::uint32_t>(names_.size());

    leq_.assign(std::size_t{n_} * n_, false);
    for (std::uint32_t i = 0; i < n_; ++i) leq_[i * n_ + i] = true;
    for (const auto& [lo, hi] : covers) {
      auto li = index.find(lo);
      auto hi_it = index.find(hi);
      if (li == index.end())
        throw LatticeError("order pair mentions unknown element '" + lo + "'");
      if (hi_it == index.end())
        throw LatticeError("order pair mentions unknown element '" + hi +
                           "'");
      if (li->second == hi_it->second)
        throw LatticeError("order pair relates '" + lo + "' to itself");
      leq_[li->second * n_ + hi_it->second] = true;
    }
    for (std::uint32_t k = 0; k < n_; ++k)
      for (std::uint32_t i = 0; i < n_; ++i)
        if (leq_[i * n_ + k])
          for (std::uint32_t j = 0; j < n_; ++j)
            if (leq_[k * n_ + j]) leq_[i * n_ + j] = true;
    for (std::uint32_t i = 0; i < n_; ++i)
      for (std::uint32_t j = i + 1; j < n_; ++j)
        if (leq_[i * n_ + j] && leq_[j * n_ + i])
          throw LatticeError("cycle in the order between '" + names_[i] +
                             "' and '" + names_[j] + "'");

    join_.assign(std::size_t{n_} * n_, 0);
    meet_.assign(std::size_t{n_} * n_, 0);
    for (std::uint32_t i = 0; i < n_; ++i)
      for (std::uint32_t j = 0; j < n_; ++j) {
        join_[i * n_ + j] = bound(i, j, /*upper=*/true);
        meet_[i * n_ + j] = bound(i, j, /*upper=*/false);
      }

    bot_ = 0;
    top_ = 0;
    for (std::uint32_t i = 1; i < n_; ++i) {
      bot_ = meet_[bot_ * n_ + i];
      top_ = join_[top_ * n_ + i];
    }
  }

  // Least upper bound (or greatest lower bound) of a pair, with the
  // existence check that makes the poset a lattice.
  std::uint32_t bound(std::uint32_t a, std::uint32_t b, bool upper) const {
    std::vector<std::uint32_t> candidates;
    for (std::uint32_t k = 0; k < n_; ++k) {
      const bool ok = upper ? (leq_[a * n_ + k] && leq_[b * n_ + k])
                            : (leq_[k * n_ + a] && leq_[k * n_ + b]);
      if (ok) candidates.push_back(k);
    }
    for (std::uint32_t m : candidates) {
      bool extreme = true;
      for (std::uint32_t k : candidates)
        if (upper ? !leq_[m * n_ + k] : !leq_[k * n_ + m]) {
          extreme = false;
          break;
        }
      if (extreme) return m;
    }
    throw LatticeError("not a lattice: elements '" + names_[a] + "' and '" +
                       names_[b] + "' have no " +
                       (upper ? "least upper bound" : "greatest lower bound"));
  }

  void require(bool cond, const std::string& msg) const {
    if (!cond) throw LatticeError(msg);
  }

  Kind kind_;
  std::string name_;
  std::vector<std::string> names_; // element names, or powerset universe
  std::uint32_t n_ = 0;
  std::vector<char> leq_;
  std::vector<std::uint32_t> join_;
  std::vector<std::uint32_t> meet_;
  std::uint32_t bot_ = 0;
  std::uint32_t top_ = 0;
};

inline LatticePtr Lattice::parse_file(std::string_view text) {
  std::string name;
  std::vector<std::string> elements;
  std::vector<std::pair<std::string, std::string>> covers;
  bool saw_lattice = false, saw_elements = false;
  for (const auto& [line_no, line] : detail::data_lines(text)) {
    std::vector<std::string> words;
    std::size_t pos = 0;
    while (pos < line.size()) {
      while (pos < line.size() &&
             std::isspace(static_cast<unsigned char>(line[pos])))
        ++pos;
      std::size_t start = pos;
      while (pos < line.size() &&
             !std::isspace(static_cast<unsigned char>(line[pos])))
        ++pos;
      if (pos > start) words.push_back(line.substr(start, pos - start));
    }
    if (words.empty()) continue;
    if (words[0] == "lattice") {
      if (saw_lattice)
        throw ParseError("duplicate 'lattice' line", line_no, 1);
      if (words.size() != 2)
        throw ParseError("expected 'lattice <name>'", line_no, 1);
      name = words[1];
      saw_lattice = true;
    } else if (words[0] == "elements") {
      if (saw_elements)
        throw ParseError("duplicate 'elements' line", line_no, 1);
      if (words.size() < 2)
        throw ParseError("expected 'elements <e1> <e2> ...'", line_no, 1);
      elements.assign(words.begin() + 1, words.end());
      saw_elements = true;
    } else if (words[0] == "order") {
      if (words.size() != 4 || words[2] != "<")
        throw ParseError("expected 'order <lower> < <upper>'", line_no, 1);
      covers.emplace_back(words[1], words[3]);
    } else {
      throw ParseError("unknown directive '" + words[0] + "'", line_no, 1);
    }
  }
  if (!saw_lattice) throw ParseError("missing 'lattice <name>' line", 1, 1);
  if (!saw_elements) throw ParseError("missing 'elements' line", 1, 1);
  return build(std::move(name), std::move(elements), std::move(covers));
}

} // namespace flowlat

#endif
