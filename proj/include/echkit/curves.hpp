#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "echkit/core.hpp"
#include "echkit/errors.hpp"
#include "echkit/index.hpp"
#include "echkit/partitions.hpp"

namespace echkit {

struct CurveEnd {
  std::string orbit;
  long long mult = 1;
  friend bool operator==(const CurveEnd&, const CurveEnd&) = default;
};

struct CurveTopology {
  long long genus = 0;
  std::vector<CurveEnd> positive_ends;
  std::vector<CurveEnd> negative_ends;
  long long delta = 0;  // singularity count, supplied by the caller

  long long ends() const { return static_cast<long long>(positive_ends.size() + negative_ends.size()); }
  long long chi() const { return 2 - 2 * genus - ends(); }

  void validate() const {
    if (genus < 0) throw PreconditionError("genus must be >= 0");
    if (ends() < 1) throw PreconditionError("a curve needs at least one end");
    if (delta < 0) throw PreconditionError("delta must be >= 0");
    for (const auto* side : {&positive_ends, &negative_ends})
      for (const auto& e : *side)
        if (e.mult < 1) throw PreconditionError("end multiplicity must be >= 1");
  }

  /// Number of ends per simple orbit on one side.
  static std::map<std::string, int> counts(const std::vector<CurveEnd>& side) {
    std::map<std::string, int> out;
    for (const auto& e : side) ++out[e.orbit];
    return out;
  }

  static int max_repeat(const std::vector<CurveEnd>& side) {
    int best = 0;
    for (const auto& [id, n] : counts(side)) best = std::max(best, n);
    return best;
  }

  /// Orbit set of the ends on one side (multiplicities added per orbit).
  static OrbitSet orbit_set(const std::vector<CurveEnd>& side) {
    OrbitSet s;
    for (const auto& e : side) s.add(e.orbit, e.mult);
    return s;
  }
};

/// U-curve C = C0 + C1: trivial cylinders plus one nontrivial component.
struct UCurveData {
  CurveTopology nontrivial;
  OrbitSet trivial_cylinders;

  OrbitSet alpha() const { return CurveTopology::orbit_set(nontrivial.positive_ends) * trivial_cylinders; }
  OrbitSet beta() const { return CurveTopology::orbit_set(nontrivial.negative_ends) * trivial_cylinders; }

  bool has_negative_end() const { return !nontrivial.negative_ends.empty(); }

  /// Orbits where C0 and C1 have ends on the same side.
  std::vector<std::string> shared_orbits() const {
    std::set<std::string> out;
    for (const auto* side : {&nontrivial.positive_ends, &nontrivial.negative_ends})
      for (const auto& e : *side)
        if (trivial_cylinders.multiplicity(e.orbit) > 0) out.insert(e.orbit);
    return {out.begin(), out.end()};
  }
};

struct WindingData {
  std::vector<long long> wind_plus;
  std::vector<long long> wind_minus;
};

inline long long h_plus(const CurveTopology& c, const OrbitTable& orbits) {
  long long n = 0;
  for (const auto* side : {&c.positive_ends, &c.negative_ends})
    for (const auto& e : *side)
      if (cover_type(orbits.at(e.orbit), e.mult) == OrbitType::positive_hyperbolic) ++n;
  return n;
}

/// c_N = (2g - 2 + ind + h_+) / 2.
inline long long normal_chern(const CurveTopology& c, long long ind, const OrbitTable& orbits) {
  long long twice = 2 * c.genus - 2 + ind + h_plus(c, orbits);
  if (twice % 2 != 0)
    throw PreconditionError("2g - 2 + ind + h_+ = " + std::to_string(twice) + " is odd; index parity is inconsistent");
  return twice / 2;
}

/// Curves with c_N < ind are cut out transversely without genericity.
inline bool automatically_transverse(const CurveTopology& c, long long ind, const OrbitTable& orbits) {
  return normal_chern(c, ind, orbits) < ind;
}

enum class Side { positive, negative };

struct WindingBound {
  long long bound = 0;  // upper bound for positive ends, lower bound for negative ends
  long long cz = 0;
};

/// Extremal winding of an eigenfunction at an end at the k-fold cover:
/// positive ends wind at most floor(k theta) = floor(CZ/2), negative ends at
/// least ceil(k theta) = ceil(CZ/2).
inline WindingBound winding_bounds(const RealScalar& theta, long long k, Side side) {
  RealScalar kt = theta * RealScalar(k);
  WindingBound w;
  w.cz = cz_index(theta, k);
  long long from_cz = side == Side::positive ? detail::floor_div(w.cz, 2).convert_to<long long>()
                                             : -detail::floor_div(-w.cz, 2).convert_to<long long>();
  w.bound = side == Side::positive ? kt.floor_int() : kt.ceil_int();
  if (w.bound != from_cz)
    throw InconsistencyError("winding bound " + std::to_string(w.bound) + " disagrees with CZ form " + std::to_string(from_cz));
  return w;
}

inline long long winding_bound_from_cz(long long cz, Side side) {
  return side == Side::positive ? detail::floor_div(cz, 2).convert_to<long long>()
                                : -detail::floor_div(-cz, 2).convert_to<long long>();
}

struct PsiZeroReport {
  long long count = 0;                 // c_tau - chi + sum wind+ - sum wind-
  std::vector<std::string> warnings;   // windings beyond the extremal bounds
  std::optional<long long> normal_chern;
  std::optional<bool> chain_holds;     // 2 count <= 2 c_N
};

inline PsiZeroReport psi_zero_count(const CurveTopology& c, long long c_tau, const WindingData& w,
                                    const OrbitTable* orbits = nullptr, std::optional<long long> ind = std::nullopt) {
  if (w.wind_plus.size() != c.positive_ends.size() || w.wind_minus.size() != c.negative_ends.size())
    throw DimensionError("one winding number per end is required");
  PsiZeroReport r;
  r.count = c_tau - c.chi();
  for (long long x : w.wind_plus) r.count += x;
  for (long long x : w.wind_minus) r.count -= x;
  if (orbits) {
    for (std::size_t i = 0; i < c.positive_ends.size(); ++i) {
      const auto& e = c.positive_ends[i];
      long long b = winding_bounds(orbits->at(e.orbit).theta, e.mult, Side::positive).bound;
      if (w.wind_plus[i] > b)
        r.warnings.push_back("positive end " + std::to_string(i) + " winds " + std::to_string(w.wind_plus[i]) +
                             " > " + std::to_string(b));
    }
    for (std::size_t j = 0; j < c.negative_ends.size(); ++j) {
      const auto& e = c.negative_ends[j];
      long long b = winding_bounds(orbits->at(e.orbit).theta, e.mult, Side::negative).bound;
      if (w.wind_minus[j] < b)
        r.warnings.push_back("negative end " + std::to_string(j) + " winds " + std::to_string(w.wind_minus[j]) +
                             " < " + std::to_string(b));
    }
    if (ind) {
      r.normal_chern = normal_chern(c, *ind, *orbits);
      r.chain_holds = 2 * r.count <= 2 * *r.normal_chern;
    }
  }
  return r;
}

/// Windings at their extremal values for every end.
inline WindingData extremal_windings(const CurveTopology& c, const OrbitTable& orbits) {
  WindingData w;
  for (const auto& e : c.positive_ends) w.wind_plus.push_back(winding_bounds(orbits.at(e.orbit).theta, e.mult, Side::positive).bound);
  for (const auto& e : c.negative_ends) w.wind_minus.push_back(winding_bounds(orbits.at(e.orbit).theta, e.mult, Side::negative).bound);
  return w;
}

/// Q_tau + sum m floor(m theta) - sum n ceil(n theta), valid when every end
/// has gcd(m, floor(m theta)) = 1 (resp. gcd(n, ceil(n theta)) = 1).
inline long long intersection_count(const CurveTopology& c, long long Q_tau, const OrbitTable& orbits) {
  long long v = Q_tau;
  for (const auto& e : c.positive_ends) {
    long long f = (orbits.at(e.orbit).theta * RealScalar(e.mult)).floor_int();
    if (std::gcd(e.mult, f) != 1)
      throw PreconditionError("equality case not certified: gcd(" + std::to_string(e.mult) + ", " + std::to_string(f) + ") != 1");
    v += e.mult * f;
  }
  for (const auto& e : c.negative_ends) {
    long long f = (orbits.at(e.orbit).theta * RealScalar(e.mult)).ceil_int();
    if (std::gcd(e.mult, f) != 1)
      throw PreconditionError("equality case not certified: gcd(" + std::to_string(e.mult) + ", " + std::to_string(f) + ") != 1");
    v -= e.mult * f;
  }
  return v;
}

/// J0 = -chi(C1) + sum (n_i^+ - 1) + sum (n_j^- - 1), where n counts the ends
/// of C1 at an orbit plus one if C0 covers the trivial cylinder over it.
inline long long j0_from_topology(const UCurveData& u) {
  long long v = -u.nontrivial.chi();
  for (const auto* side : {&u.nontrivial.positive_ends, &u.nontrivial.negative_ends})
    for (const auto& [id, n] : CurveTopology::counts(*side)) v += n + (u.trivial_cylinders.multiplicity(id) > 0 ? 1 : 0) - 1;
  return v;
}

enum class CurveType { TypeI, TypeII, Both };

inline std::string to_string(CurveType t) {
  switch (t) {
    case CurveType::TypeI:
      return "TypeI";
    case CurveType::TypeII:
      return "TypeII";
    case CurveType::Both:
      return "Both";
  }
  return "";
}

struct ClassificationReport {
  long long j0_claimed = 0;
  long long j0_formula = 0;
  bool consistent = true;
  std::vector<std::string> violations;  // clause tags, e.g. "J0<=1:(a)"
  bool genus0_at_most_3_ends = false;
  bool no_same_side_repeat = false;
  bool sharing = false;  // C0 and C1 have same-side ends at one orbit
  bool type_I = false;   // no two negative ends at one orbit
  bool type_II = false;  // no two positive ends at one orbit
};

/// Checks the structural consequences of J0 <= 1 and J0 = 2 for a U-curve
/// whose nontrivial part has a negative end. A violated clause means the
/// claimed J0 cannot belong to this topology.
inline ClassificationReport classify_ucurve(const UCurveData& u, long long j0) {
  const auto& c = u.nontrivial;
  c.validate();
  if (!u.has_negative_end()) throw PreconditionError("hypothesis violated: C1 has no negative end");
  ClassificationReport r;
  r.j0_claimed = j0;
  r.j0_formula = j0_from_topology(u);
  int pos_rep = CurveTopology::max_repeat(c.positive_ends);
  int neg_rep = CurveTopology::max_repeat(c.negative_ends);
  r.genus0_at_most_3_ends = c.genus == 0 && c.ends() <= 3;
  r.no_same_side_repeat = pos_rep <= 1 && neg_rep <= 1;
  r.sharing = !u.shared_orbits().empty();
  r.type_I = neg_rep <= 1;
  r.type_II = pos_rep <= 1;
  auto fail = [&](const std::string& tag) {
    r.consistent = false;
    r.violations.push_back(tag);
  };
  if (j0 <= 1) {
    if (!r.genus0_at_most_3_ends) fail("J0<=1:(a) genus zero and at most 3 ends");
    if (!r.no_same_side_repeat) fail("J0<=1:(b) no two same-side ends at covers of one orbit");
  } else if (j0 == 2) {
    if (r.sharing) {
      if (!r.genus0_at_most_3_ends) fail("J0=2:(a) sharing forces genus zero and at most 3 ends");
      if (!r.no_same_side_repeat) fail("J0=2:(a) sharing forces no same-side repeats");
    }
    if (pos_rep > 2 || neg_rep > 2) fail("J0=2:(b) at most 2 same-side ends at covers of one orbit");
    if (pos_rep == 2 && c.negative_ends.size() != 1) fail("J0=2:(c) two positive ends at one orbit need exactly one negative end");
    if (neg_rep == 2 && c.positive_ends.size() != 1) fail("J0=2:(c) two negative ends at one orbit need exactly one positive end");
  }
  return r;
}

inline std::optional<CurveType> curve_type(const ClassificationReport& r) {
  if (r.type_I && r.type_II) return CurveType::Both;
  if (r.type_I) return CurveType::TypeI;
  if (r.type_II) return CurveType::TypeII;
  return std::nullopt;
}

struct PartitionCheck {
  std::string orbit;
  Side side = Side::positive;
  long long total = 0;
  std::vector<long long> ends;      // sorted descending
  std::vector<long long> expected;  // partition multiset, sorted descending
  bool ok = false;
};

struct PartitionConditionsReport {
  bool pass = true;
  std::vector<PartitionCheck> checks;
};

/// Per orbit and side, the end multiplicities must form p+(total) (positive
/// ends) or p-(total) (negative ends).
inline PartitionConditionsReport check_partition_conditions(const CurveTopology& c, const OrbitTable& orbits) {
  PartitionConditionsReport r;
  for (Side side : {Side::positive, Side::negative}) {
    const auto& ends = side == Side::positive ? c.positive_ends : c.negative_ends;
    std::map<std::string, std::vector<long long>> by_orbit;
    for (const auto& e : ends) by_orbit[e.orbit].push_back(e.mult);
    for (auto& [id, mults] : by_orbit) {
      PartitionCheck pc;
      pc.orbit = id;
      pc.side = side;
      pc.total = std::accumulate(mults.begin(), mults.end(), 0LL);
      std::sort(mults.begin(), mults.end(), std::greater<>());
      pc.ends = mults;
      const RealScalar& theta = orbits.at(id).theta;
      pc.expected = (side == Side::positive ? positive_partition(theta, pc.total) : negative_partition(theta, pc.total))
                        .partition.multiset();
      pc.ok = pc.ends == pc.expected;
      r.pass = r.pass && pc.ok;
      r.checks.push_back(std::move(pc));
    }
  }
  return r;
}

struct IndexInequality {
  bool holds = false;
  bool equality = false;  // partition conditions apply when true
};

/// ind <= I - 2 delta.
inline IndexInequality index_inequality_check(long long ind, long long I, long long delta) {
  if (delta < 0) throw PreconditionError("delta must be >= 0");
  return {ind <= I - 2 * delta, ind == I - 2 * delta};
}

struct ClauseResult {
  std::string clause;
  bool ok = false;
  std::string detail;
};

struct SpecialVerdict {
  bool special = false;
  std::vector<ClauseResult> clauses;         // (a)..(f)
  std::vector<ClauseResult> gss_hypotheses;  // (i)..(v)

  bool clause(const std::string& tag) const {
    for (const auto& c : clauses)
      if (c.clause == tag) return c.ok;
    throw PreconditionError("unknown clause " + tag);
  }
  std::vector<std::string> failed() const {
    std::vector<std::string> out;
    for (const auto& c : clauses)
      if (!c.ok) out.push_back(c.clause);
    return out;
  }
};

/// Clause-by-clause check of the special-curve conditions on the
/// combinatorial data of C. Compactness (f) is replaced by eps_ok together
/// with (c); embeddedness is taken as given.
inline SpecialVerdict is_special(const CurveTopology& c, long long I, long long ind, bool eps_ok, const OrbitTable& orbits) {
  c.validate();
  SpecialVerdict v;
  auto add = [&](std::vector<ClauseResult>& into, std::string tag, bool ok, std::string detail) {
    into.push_back({std::move(tag), ok, std::move(detail)});
  };

  add(v.clauses, "a", ind == 2 && I == 2, "ind=" + std::to_string(ind) + " I=" + std::to_string(I));

  auto elliptic_end = [&](const std::vector<CurveEnd>& side) {
    return std::any_of(side.begin(), side.end(), [&](const CurveEnd& e) { return orbits.at(e.orbit).type == OrbitType::elliptic; });
  };
  bool b = elliptic_end(c.positive_ends) && elliptic_end(c.negative_ends);
  add(v.clauses, "b", b, b ? "elliptic ends on both sides" : "missing an elliptic end on one side");

  bool cc = c.genus == 0 && c.ends() <= 3;
  add(v.clauses, "c", cc, "genus=" + std::to_string(c.genus) + " ends=" + std::to_string(c.ends()));

  bool d = CurveTopology::max_repeat(c.positive_ends) <= 1 && CurveTopology::max_repeat(c.negative_ends) <= 1;
  add(v.clauses, "d", d, d ? "no same-side repeats" : "two same-side ends at covers of one orbit");

  int hyperbolic = 0;
  bool allowed = true;
  for (const auto* side : {&c.positive_ends, &c.negative_ends})
    for (const auto& e : *side) {
      OrbitType t = orbits.at(e.orbit).type;
      if (t == OrbitType::elliptic) continue;
      ++hyperbolic;
      if (t != OrbitType::negative_hyperbolic || e.mult != 1) allowed = false;
    }
  bool e_ok = hyperbolic == 0 || (hyperbolic == 1 && allowed);
  add(v.clauses, "e", e_ok, std::to_string(hyperbolic) + " hyperbolic end(s)");

  add(v.clauses, "f", eps_ok && cc, eps_ok ? "low action gap, genus zero, at most 3 ends" : "action gap not certified below epsilon");

  v.special = std::all_of(v.clauses.begin(), v.clauses.end(), [](const ClauseResult& r) { return r.ok; });

  add(v.gss_hypotheses, "i", true, "embeddedness assumed");
  long long hp = h_plus(c, orbits);
  add(v.gss_hypotheses, "ii", c.genus == 0 && hp == 0 && ind == 2,
      "g=" + std::to_string(c.genus) + " h+=" + std::to_string(hp) + " ind=" + std::to_string(ind));
  add(v.gss_hypotheses, "iii", d, "same as (d)");
  bool coprime = true;
  for (const auto& e : c.positive_ends) {
    long long f = (orbits.at(e.orbit).theta * RealScalar(e.mult)).floor_int();
    coprime = coprime && std::gcd(e.mult, f) == 1;
  }
  for (const auto& e : c.negative_ends) {
    long long f = (orbits.at(e.orbit).theta * RealScalar(e.mult)).ceil_int();
    coprime = coprime && std::gcd(e.mult, f) == 1;
  }
  add(v.gss_hypotheses, "iv", coprime, coprime ? "all ends coprime" : "an end fails the gcd condition");
  add(v.gss_hypotheses, "v", eps_ok && cc, "same as (f)");
  return v;
}

}  // namespace echkit
