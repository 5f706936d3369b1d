#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "echkit/errors.hpp"
#include "echkit/homology.hpp"
#include "echkit/real_scalar.hpp"

namespace echkit {

enum class OrbitType { elliptic, positive_hyperbolic, negative_hyperbolic };

inline std::string to_string(OrbitType t) {
  switch (t) {
    case OrbitType::elliptic:
      return "elliptic";
    case OrbitType::positive_hyperbolic:
      return "positive_hyperbolic";
    case OrbitType::negative_hyperbolic:
      return "negative_hyperbolic";
  }
  return "";
}

inline OrbitType orbit_type_from_string(const std::string& s) {
  if (s == "elliptic" || s == "e") return OrbitType::elliptic;
  if (s == "positive_hyperbolic" || s == "h+" || s == "positive") return OrbitType::positive_hyperbolic;
  if (s == "negative_hyperbolic" || s == "h-" || s == "negative") return OrbitType::negative_hyperbolic;
  throw ParseError("unknown orbit type '" + s + "'");
}

inline bool is_hyperbolic(OrbitType t) { return t != OrbitType::elliptic; }

/// The type a rotation number forces: integer -> positive hyperbolic,
/// half-integer -> negative hyperbolic, known irrational -> elliptic.
inline OrbitType type_of_theta(const RealScalar& theta) {
  if (theta.is_known_irrational()) return OrbitType::elliptic;
  if (theta.is_integer()) return OrbitType::positive_hyperbolic;
  if ((theta * RealScalar(2)).is_integer()) return OrbitType::negative_hyperbolic;
  throw PreconditionError("rotation number " + theta.symbolic() +
                          " is rational but not a half-integer; the orbit would be degenerate");
}

struct ReebOrbitSpec {
  std::string id;
  RealScalar action;
  RealScalar theta;  // rotation number in the fixed trivialization
  OrbitType type = OrbitType::elliptic;
  std::optional<IntVector> homology_class;

  /// Throws PreconditionError unless action > 0 and the type matches theta.
  void validate() const {
    if (id.empty()) throw PreconditionError("orbit id must be nonempty");
    if (action.sign() <= 0) throw PreconditionError("orbit '" + id + "' must have positive action");
    OrbitType forced = type_of_theta(theta);
    if (forced != type) {
      throw PreconditionError("orbit '" + id + "' declared " + to_string(type) + " but rotation number " +
                              theta.symbolic() + " forces " + to_string(forced));
    }
  }
};

inline ReebOrbitSpec make_orbit(std::string id, RealScalar action, RealScalar theta, OrbitType type) {
  ReebOrbitSpec o{std::move(id), std::move(action), std::move(theta), type, std::nullopt};
  o.validate();
  return o;
}

/// Orbits keyed by id; iteration order is lexicographic on id.
class OrbitTable {
 public:
  OrbitTable() = default;
  explicit OrbitTable(std::vector<ReebOrbitSpec> orbits) {
    for (auto& o : orbits) add(std::move(o));
  }

  void add(ReebOrbitSpec o) {
    o.validate();
    if (orbits_.count(o.id)) throw PreconditionError("duplicate orbit id '" + o.id + "'");
    std::string key = o.id;
    orbits_.emplace(std::move(key), std::move(o));
  }

  const ReebOrbitSpec& at(const std::string& id) const {
    auto it = orbits_.find(id);
    if (it == orbits_.end()) throw UnknownOrbitError(id);
    return it->second;
  }

  bool contains(const std::string& id) const { return orbits_.count(id) != 0; }
  std::size_t size() const { return orbits_.size(); }
  bool empty() const { return orbits_.empty(); }

  std::vector<const ReebOrbitSpec*> list() const {
    std::vector<const ReebOrbitSpec*> out;
    for (const auto& [id, o] : orbits_) out.push_back(&o);
    return out;
  }

  std::vector<std::string> ids() const {
    std::vector<std::string> out;
    for (const auto& [id, o] : orbits_) out.push_back(id);
    return out;
  }

 private:
  std::map<std::string, ReebOrbitSpec> orbits_;
};

/// Finite multiset of simple orbits: id -> multiplicity >= 1.
class OrbitSet {
 public:
  OrbitSet() = default;
  OrbitSet(std::initializer_list<std::pair<const std::string, long long>> init) {
    for (const auto& [id, m] : init) add(id, m);
  }

  void add(const std::string& id, long long m) {
    if (m < 0) throw PreconditionError("negative multiplicity for '" + id + "'");
    if (m == 0) return;
    entries_[id] += m;
  }

  long long multiplicity(const std::string& id) const {
    auto it = entries_.find(id);
    return it == entries_.end() ? 0 : it->second;
  }

  const std::map<std::string, long long>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }

  long long total_multiplicity() const {
    long long s = 0;
    for (const auto& [id, m] : entries_) s += m;
    return s;
  }

  /// Union with multiplicities added.
  friend OrbitSet operator*(const OrbitSet& a, const OrbitSet& b) {
    OrbitSet out = a;
    for (const auto& [id, m] : b.entries_) out.add(id, m);
    return out;
  }

  friend bool operator==(const OrbitSet& a, const OrbitSet& b) { return a.entries_ == b.entries_; }
  friend bool operator!=(const OrbitSet& a, const OrbitSet& b) { return !(a == b); }
  friend bool operator<(const OrbitSet& a, const OrbitSet& b) { return a.entries_ < b.entries_; }

  /// "{}" or "{a^2, b}" style rendering.
  std::string to_string() const {
    std::string out = "{";
    bool first = true;
    for (const auto& [id, m] : entries_) {
      if (!first) out += ", ";
      first = false;
      out += id;
      if (m != 1) out += "^" + std::to_string(m);
    }
    return out + "}";
  }

 private:
  std::map<std::string, long long> entries_;
};

inline RealScalar action(const OrbitSet& s, const OrbitTable& orbits) {
  RealScalar total(0);
  for (const auto& [id, m] : s.entries()) total += orbits.at(id).action * RealScalar(m);
  return total;
}

inline bool is_admissible(const OrbitSet& s, const OrbitTable& orbits) {
  for (const auto& [id, m] : s.entries())
    if (is_hyperbolic(orbits.at(id).type) && m != 1) return false;
  return true;
}

inline int i2_grading(const OrbitSet& s, const OrbitTable& orbits) {
  int count = 0;
  for (const auto& [id, m] : s.entries())
    if (orbits.at(id).type == OrbitType::positive_hyperbolic) ++count;
  return count % 2;
}

inline OrbitType cover_type(OrbitType base, long long k) {
  if (k < 1) throw PreconditionError("cover multiplicity must be >= 1");
  if (base == OrbitType::negative_hyperbolic) return k % 2 == 0 ? OrbitType::positive_hyperbolic : base;
  return base;
}

inline OrbitType cover_type(const ReebOrbitSpec& orbit, long long k) { return cover_type(orbit.type, k); }

/// Homology class of an orbit set, sum of m_i [gamma_i].
inline IntVector homology_class(const OrbitSet& s, const OrbitTable& orbits, std::size_t generators) {
  IntVector out(generators);
  for (const auto& [id, m] : s.entries()) {
    const auto& o = orbits.at(id);
    if (!o.homology_class) throw PreconditionError("orbit '" + id + "' has no homology class");
    if (o.homology_class->size() != generators) throw DimensionError("orbit '" + id + "' class has wrong length");
    for (std::size_t j = 0; j < generators; ++j) out[j] += (*o.homology_class)[j] * m;
  }
  return out;
}

struct ClassFilter {
  HomologyGroup group;
  IntVector target;
};

/// Orders by action, then by entries. Certified actions that cannot be
/// separated fall back to midpoints.
inline bool action_order(const std::pair<RealScalar, OrbitSet>& x, const std::pair<RealScalar, OrbitSet>& y) {
  auto c = try_compare(x.first, y.first);
  int cmp = c ? *c : (x.first.midpoint() < y.first.midpoint() ? -1 : (y.first.midpoint() < x.first.midpoint() ? 1 : 0));
  if (cmp != 0) return cmp < 0;
  return x.second < y.second;
}

/// All orbit sets with action < L that pass the filters, sorted by
/// (action, entries).
inline std::vector<OrbitSet> enumerate_orbit_sets(const OrbitTable& orbits, const RealScalar& L,
                                                  const std::optional<ClassFilter>& class_filter = std::nullopt,
                                                  bool admissible_only = false) {
  if (L.sign() <= 0) throw PreconditionError("action bound must be positive");
  auto list = orbits.list();
  std::vector<std::pair<RealScalar, OrbitSet>> found;
  OrbitSet current;

  std::function<void(std::size_t, const RealScalar&)> dfs = [&](std::size_t idx, const RealScalar& acc) {
    if (idx == list.size()) {
      if (class_filter) {
        IntVector cls = homology_class(current, orbits, class_filter->group.generators());
        if (!class_filter->group.equal(cls, class_filter->target)) return;
      }
      found.emplace_back(acc, current);
      return;
    }
    const ReebOrbitSpec& o = *list[idx];
    long long cap = admissible_only && is_hyperbolic(o.type) ? 1 : -1;
    RealScalar a = acc;
    OrbitSet saved = current;
    for (long long m = 0;; ++m) {
      if (m > 0) {
        a += o.action;
        if (compare(a, L) >= 0) break;
        if (cap >= 0 && m > cap) break;
        current = saved;
        current.add(o.id, m);
      }
      dfs(idx + 1, a);
    }
    current = saved;
  };
  dfs(0, RealScalar(0));
  std::sort(found.begin(), found.end(), action_order);
  std::vector<OrbitSet> out;
  out.reserve(found.size());
  for (auto& [a, s] : found) out.push_back(std::move(s));
  return out;
}

}  // namespace echkit
