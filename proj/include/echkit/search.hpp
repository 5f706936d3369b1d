#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "echkit/core.hpp"
#include "echkit/curves.hpp"
#include "echkit/errors.hpp"
#include "echkit/homology.hpp"
#include "echkit/partitions.hpp"
#include "echkit/real_scalar.hpp"

namespace echkit {

// ---------------------------------------------------------------------------
// Low-energy threshold

struct GapWitness {
  std::string condition;  // "i", "ii" or "iii"
  RealScalar gap;
  std::string x;
  std::string y;
};

struct EpsilonCertificate {
  RealScalar epsilon;
  RealScalar bound;  // every orbit set with action below this was compared
  std::map<std::string, std::vector<long long>> exceptional;
  std::size_t exceptional_sets = 0;  // orbit sets made only of exceptional pairs
  std::size_t compared_sets = 0;
  std::vector<GapWitness> witnesses;    // minimizer of each condition
  std::vector<std::string> coincidences;  // distinct sets with equal action, skipped
};

struct EpsilonOptions {
  std::optional<RealScalar> action_bound;
  bool reject_coincidences = false;  // treat equal actions as an error
};

namespace detail {

inline std::string cover_name(const std::string& id, long long k) { return k == 1 ? id : id + "^" + std::to_string(k); }

/// Orbit sets all of whose pairs are exceptional.
inline std::vector<OrbitSet> all_exceptional_sets(const OrbitTable& orbits, const std::map<std::string, std::vector<long long>>& ex) {
  std::vector<OrbitSet> out{OrbitSet{}};
  for (const auto& [id, mults] : ex) {
    std::vector<OrbitSet> next;
    for (const auto& s : out) {
      next.push_back(s);
      for (long long m : mults) {
        OrbitSet t = s;
        t.add(id, m);
        next.push_back(std::move(t));
      }
    }
    out = std::move(next);
  }
  (void)orbits;
  return out;
}

}  // namespace detail

/// epsilon = 1/2 min of: (i) gaps between actions of all-exceptional orbit
/// sets and any other orbit set of different action; (ii) simple actions;
/// (iii) gaps between a simple positive hyperbolic orbit (or the double cover
/// of a negative hyperbolic one) and any Reeb orbit of different action.
inline EpsilonCertificate epsilon_threshold(const OrbitTable& orbits, const EpsilonOptions& opt = {}) {
  if (orbits.empty()) throw PreconditionError("empty orbit table");
  EpsilonCertificate cert;
  std::optional<RealScalar> min_simple;
  std::string min_simple_id;
  for (const auto* o : orbits.list()) {
    cert.exceptional[o->id] = exceptional_multiplicities(o->theta, o->type).multiplicities;
    if (!min_simple || compare(o->action, *min_simple) < 0) {
      min_simple = o->action;
      min_simple_id = o->id;
    }
  }
  auto xs = detail::all_exceptional_sets(orbits, cert.exceptional);
  cert.exceptional_sets = xs.size();
  RealScalar max_x(0);
  for (const auto& x : xs) max_x = max(max_x, action(x, orbits));
  cert.bound = max_x + *min_simple + RealScalar(1);
  if (opt.action_bound && compare(*opt.action_bound, cert.bound) > 0) cert.bound = *opt.action_bound;

  auto ys = enumerate_orbit_sets(orbits, cert.bound);
  cert.compared_sets = ys.size();
  std::vector<RealScalar> y_act;
  std::vector<double> y_dbl;
  for (const auto& y : ys) {
    y_act.push_back(action(y, orbits));
    y_dbl.push_back(y_act.back().to_double());
  }

  auto coincide = [&](const std::string& what) {
    if (opt.reject_coincidences) throw DegenerateError("zero action gap: " + what);
    if (cert.coincidences.size() < 50) cert.coincidences.push_back(what);
  };

  // (i)
  std::optional<GapWitness> w1;
  for (const auto& x : xs) {
    RealScalar ax = action(x, orbits);
    double axd = ax.to_double();
    for (std::size_t j = 0; j < ys.size(); ++j) {
      if (ys[j] == x) continue;
      double dd = std::abs(y_dbl[j] - axd);
      if (w1 && dd > w1->gap.to_double() + 1e-9) continue;
      int c = compare(ax, y_act[j]);
      if (c == 0) {
        coincide(x.to_string() + " and " + ys[j].to_string());
        continue;
      }
      RealScalar gap = c > 0 ? ax - y_act[j] : y_act[j] - ax;
      if (!w1 || compare(gap, w1->gap) < 0) w1 = GapWitness{"i", gap, x.to_string(), ys[j].to_string()};
    }
  }
  RealScalar best = *min_simple;
  GapWitness w2{"ii", *min_simple, min_simple_id, ""};
  if (w1) {
    cert.witnesses.push_back(*w1);
    if (compare(w1->gap, best) < 0) best = w1->gap;
  }
  cert.witnesses.push_back(w2);

  // (iii)
  std::optional<GapWitness> w3;
  for (const auto* o : orbits.list()) {
    long long k0 = o->type == OrbitType::positive_hyperbolic ? 1 : o->type == OrbitType::negative_hyperbolic ? 2 : 0;
    if (k0 == 0) continue;
    RealScalar a = o->action * RealScalar(k0);
    RealScalar limit = a + *min_simple;
    for (const auto* p : orbits.list()) {
      for (long long k = 1;; ++k) {
        RealScalar b = p->action * RealScalar(k);
        if (compare(b, limit) > 0) break;
        if (p->id == o->id && k == k0) continue;
        int c = compare(a, b);
        if (c == 0) {
          coincide(detail::cover_name(o->id, k0) + " and " + detail::cover_name(p->id, k));
          continue;
        }
        RealScalar gap = c > 0 ? a - b : b - a;
        if (!w3 || compare(gap, w3->gap) < 0) w3 = GapWitness{"iii", gap, detail::cover_name(o->id, k0), detail::cover_name(p->id, k)};
      }
    }
  }
  if (w3) {
    cert.witnesses.push_back(*w3);
    if (compare(w3->gap, best) < 0) best = w3->gap;
  }
  cert.epsilon = best / RealScalar(2);
  return cert;
}

// ---------------------------------------------------------------------------
// Special-curve search

/// alpha(0..l) and U-curves C(i) from alpha(i) to alpha(i-1), i = 1..l.
struct UCurveSequence {
  int declared_case = 2;
  std::vector<OrbitSet> generators;
  std::vector<UCurveData> curves;
  std::vector<long long> j0;
};

inline CurveType type_of(const UCurveData& u) {
  auto r = classify_ucurve(u, 2);
  if (!r.consistent) throw InconsistencyError("classification contradiction: " + r.violations.front());
  auto t = curve_type(r);
  if (!t) throw InconsistencyError("curve is neither Type I nor Type II");
  return *t;
}

struct HypothesisFailure {
  std::string hypothesis;
  long long curve = 0;  // 1-based; 0 for the whole instance
  std::string detail;
};

struct TraceStep {
  long long source = 0;  // curve whose orbit is propagated
  std::string orbit;
  long long mult = 0;
  long long curve = 0;   // curve being examined
  std::string action;    // choose | forbid | sharing | break
  std::vector<std::string> forbidden;  // forbidden set at `curve` after the step
  std::string note;
};

struct SpecialSearchResult {
  enum class Status { found, contradiction, hypothesis_violation };
  Status status = Status::hypothesis_violation;
  int instance_case = 2;
  std::optional<long long> index;  // 1-based
  std::string shared_orbit;
  std::string direction;  // downward (Type I chains) or upward (Type II chains)
  long long type_I_count = 0;
  long long type_II_count = 0;
  std::vector<TraceStep> trace;
  std::optional<SpecialVerdict> verdict;
  std::vector<HypothesisFailure> failures;
  std::string message;
};

inline std::string to_string(SpecialSearchResult::Status s) {
  switch (s) {
    case SpecialSearchResult::Status::found:
      return "found";
    case SpecialSearchResult::Status::contradiction:
      return "contradiction";
    case SpecialSearchResult::Status::hypothesis_violation:
      return "hypothesis_violation";
  }
  return "";
}

struct SearchOptions {
  bool check_partition_conditions = true;
  bool check_nonexceptional = true;
};

/// The forbidden set at every curve only grows along the trace.
inline bool trace_is_monotone(const std::vector<TraceStep>& trace) {
  std::map<long long, std::set<std::string>> seen;
  for (const auto& s : trace) {
    std::set<std::string> now(s.forbidden.begin(), s.forbidden.end());
    auto& before = seen[s.curve];
    if (!std::includes(now.begin(), now.end(), before.begin(), before.end())) return false;
    before = std::move(now);
  }
  return true;
}

namespace detail {

inline bool pair_exceptional(const OrbitTable& orbits, const std::string& id, long long m) {
  return is_exceptional(orbits.at(id).theta, m);
}

inline bool has_nonexceptional(const OrbitTable& orbits, const OrbitSet& s) {
  for (const auto& [id, m] : s.entries())
    if (!pair_exceptional(orbits, id, m)) return true;
  return false;
}

inline bool has_end_at(const CurveTopology& c, const std::string& id) {
  for (const auto* side : {&c.positive_ends, &c.negative_ends})
    for (const auto& e : *side)
      if (e.orbit == id) return true;
  return false;
}

inline std::vector<HypothesisFailure> validate_sequence(const UCurveSequence& seq, const EpsilonCertificate& eps,
                                                        const OrbitTable& orbits, const SearchOptions& opt) {
  std::vector<HypothesisFailure> out;
  auto fail = [&](std::string h, long long i, std::string d) { out.push_back({std::move(h), i, std::move(d)}); };
  const auto l = static_cast<long long>(seq.curves.size());
  if (l == 0) fail("shape", 0, "no curves");
  if (seq.generators.size() != seq.curves.size() + 1)
    fail("shape", 0, "need l+1 generators for l curves, got " + std::to_string(seq.generators.size()) + " for " + std::to_string(l));
  if (seq.j0.size() != seq.curves.size()) fail("shape", 0, "one J0 value per curve is required");
  if (seq.declared_case != 1 && seq.declared_case != 2) fail("shape", 0, "declared case must be 1 or 2");
  if (!out.empty()) return out;
  if (seq.declared_case == 2 && l != 2 * static_cast<long long>(orbits.size()) + 1)
    fail("case 2 length", 0, "l = " + std::to_string(l) + " but 2n+1 = " + std::to_string(2 * orbits.size() + 1));

  for (std::size_t i = 0; i < seq.generators.size(); ++i) {
    for (const auto& [id, m] : seq.generators[i].entries())
      if (!orbits.contains(id)) {
        fail("orbit table", static_cast<long long>(i), "unknown orbit '" + id + "'");
        return out;
      }
    if (!is_admissible(seq.generators[i], orbits))
      fail("admissible generator", static_cast<long long>(i), seq.generators[i].to_string() + " is not admissible");
  }

  for (long long i = 1; i <= l; ++i) {
    const auto& u = seq.curves[static_cast<std::size_t>(i - 1)];
    for (const auto* side : {&u.nontrivial.positive_ends, &u.nontrivial.negative_ends})
      for (const auto& e : *side)
        if (!orbits.contains(e.orbit)) {
          fail("orbit table", i, "unknown orbit '" + e.orbit + "'");
          return out;
        }
    try {
      u.nontrivial.validate();
    } catch (const Error& e) {
      fail("curve topology", i, e.what());
      continue;
    }
    if (u.alpha() != seq.generators[static_cast<std::size_t>(i)])
      fail("ends match generators", i, "positive side " + u.alpha().to_string() + " != alpha(" + std::to_string(i) + ") = " +
                                           seq.generators[static_cast<std::size_t>(i)].to_string());
    if (u.beta() != seq.generators[static_cast<std::size_t>(i - 1)])
      fail("ends match generators", i, "negative side " + u.beta().to_string() + " != alpha(" + std::to_string(i - 1) + ") = " +
                                           seq.generators[static_cast<std::size_t>(i - 1)].to_string());
    RealScalar gap = action(seq.generators[static_cast<std::size_t>(i)], orbits) -
                     action(seq.generators[static_cast<std::size_t>(i - 1)], orbits);
    if (gap.sign() <= 0 || compare(gap, eps.epsilon) >= 0)
      fail("action gap", i, "A(alpha(i)) - A(alpha(i-1)) = " + gap.to_string(12) + " not in (0, " + eps.epsilon.to_string(12) + ")");
    if (!u.has_negative_end()) {
      fail("negative end", i, "C1 has no negative end");
      continue;
    }
    long long formula = j0_from_topology(u);
    long long claimed = seq.j0[static_cast<std::size_t>(i - 1)];
    if (formula != claimed)
      fail("J0 formula", i, "claimed J0 = " + std::to_string(claimed) + ", topology gives " + std::to_string(formula));
    if (seq.declared_case == 2 && claimed != 2) fail("case 2 J0", i, "J0 = " + std::to_string(claimed) + " != 2");
    auto cls = classify_ucurve(u, claimed);
    if (!cls.consistent) fail("J0 classification", i, cls.violations.front());
    if (opt.check_partition_conditions && !check_partition_conditions(u.nontrivial, orbits).pass)
      fail("partition conditions", i, "end multiplicities do not match p+/p-");
    if (opt.check_nonexceptional) {
      auto ap = CurveTopology::orbit_set(u.nontrivial.positive_ends), bp = CurveTopology::orbit_set(u.nontrivial.negative_ends);
      if (!has_nonexceptional(orbits, ap)) fail("nonexceptional pair", i, "every pair in " + ap.to_string() + " is exceptional");
      if (!has_nonexceptional(orbits, bp)) fail("nonexceptional pair", i, "every pair in " + bp.to_string() + " is exceptional");
    }
  }
  return out;
}

}  // namespace detail

/// Locates a curve C(i)_1 of a U-curve sequence that satisfies the special
/// conditions. Case 1 returns the first curve with J0 <= 1. Case 2 follows the
/// forbidden-orbit propagation: each Type I curve forbids its nonexceptional
/// negative orbit on all lower curves (Type II: positive orbit, upward) until
/// some curve shares an orbit with its trivial cylinders.
inline SpecialSearchResult find_special(const UCurveSequence& seq, const EpsilonCertificate& eps, const OrbitTable& orbits,
                                        const SearchOptions& opt = {}) {
  SpecialSearchResult r;
  r.instance_case = seq.declared_case;
  r.failures = detail::validate_sequence(seq, eps, orbits, opt);
  if (!r.failures.empty()) {
    r.status = SpecialSearchResult::Status::hypothesis_violation;
    r.message = r.failures.front().hypothesis + " (curve " + std::to_string(r.failures.front().curve) + "): " + r.failures.front().detail;
    return r;
  }
  const auto l = static_cast<long long>(seq.curves.size());
  auto curve = [&](long long i) -> const UCurveData& { return seq.curves[static_cast<std::size_t>(i - 1)]; };
  auto finish = [&](long long i, const std::string& orbit) {
    r.status = SpecialSearchResult::Status::found;
    r.index = i;
    r.shared_orbit = orbit;
    r.verdict = is_special(curve(i).nontrivial, 2, 2, true, orbits);
    r.message = "C(" + std::to_string(i) + ")_1 " + (r.verdict->special ? "is special" : "fails the special conditions");
    return r;
  };

  if (seq.declared_case == 1) {
    for (long long i = 1; i <= l; ++i)
      if (seq.j0[static_cast<std::size_t>(i - 1)] <= 1) return finish(i, "");
    r.status = SpecialSearchResult::Status::hypothesis_violation;
    r.failures.push_back({"case 1", 0, "no curve with J0 <= 1"});
    r.message = "case 1 declared but every J0 is >= 2";
    return r;
  }

  const long long n = static_cast<long long>(orbits.size());
  std::vector<CurveType> types;
  for (long long i = 1; i <= l; ++i) types.push_back(type_of(curve(i)));
  auto is_I = [&](long long i) { return types[static_cast<std::size_t>(i - 1)] != CurveType::TypeII; };
  auto is_II = [&](long long i) { return types[static_cast<std::size_t>(i - 1)] != CurveType::TypeI; };
  for (long long i = 2; i <= l - 1; ++i) {
    r.type_I_count += is_I(i);
    r.type_II_count += is_II(i);
  }
  const bool downward = r.type_I_count >= n;
  if (!downward && r.type_II_count < n) {
    r.status = SpecialSearchResult::Status::hypothesis_violation;
    r.failures.push_back({"pigeonhole", 0, "fewer than n curves of either type among C(2)..C(2n)"});
    r.message = r.failures.back().detail;
    return r;
  }
  r.direction = downward ? "downward" : "upward";

  std::map<long long, std::set<std::string>> forbidden;
  auto snapshot = [&](long long j) { return std::vector<std::string>(forbidden[j].begin(), forbidden[j].end()); };

  // sources in scan order: l..2 for Type I, 1..l-1 for Type II
  std::vector<long long> sources;
  if (downward) {
    for (long long i = l; i >= 2; --i)
      if (is_I(i)) sources.push_back(i);
  } else {
    for (long long i = 1; i <= l - 1; ++i)
      if (is_II(i)) sources.push_back(i);
  }

  for (long long i : sources) {
    const auto& u = curve(i);
    const auto& ends = downward ? u.nontrivial.negative_ends : u.nontrivial.positive_ends;
    std::optional<CurveEnd> chosen;
    for (const auto& e : ends)  // Type I/II: one end per orbit on this side
      if (!detail::pair_exceptional(orbits, e.orbit, e.mult) && (!chosen || e.orbit < chosen->orbit)) chosen = e;
    if (!chosen) {
      r.status = SpecialSearchResult::Status::hypothesis_violation;
      r.failures.push_back({"nonexceptional pair", i, "no nonexceptional end on the propagated side"});
      r.message = r.failures.back().detail;
      return r;
    }
    const std::string& g = chosen->orbit;
    r.trace.push_back({i, g, chosen->mult, i, "choose", snapshot(i),
                       std::string(downward ? "Type I, negative end " : "Type II, positive end ") + detail::cover_name(g, chosen->mult)});
    if (u.trivial_cylinders.multiplicity(g) > 0) {
      r.trace.push_back({i, g, chosen->mult, i, "sharing", snapshot(i), "trivial cylinder over " + g + " in C(" + std::to_string(i) + ")_0"});
      return finish(i, g);
    }
    for (long long j = downward ? i - 1 : i + 1; downward ? j >= 1 : j <= l; j += downward ? -1 : 1) {
      const auto& v = curve(j);
      if (detail::has_end_at(v.nontrivial, g)) {
        if (v.trivial_cylinders.multiplicity(g) > 0) {
          r.trace.push_back({i, g, chosen->mult, j, "sharing", snapshot(j),
                             "C(" + std::to_string(j) + ")_1 and C(" + std::to_string(j) + ")_0 both have ends at " + g});
          return finish(j, g);
        }
        r.trace.push_back({i, g, chosen->mult, j, "break", snapshot(j),
                           "C(" + std::to_string(j) + ")_1 has an end at forbidden orbit " + g + " without a trivial cylinder over it"});
        r.status = SpecialSearchResult::Status::contradiction;
        r.message = r.trace.back().note;
        std::set<std::string> used;
        for (const auto* side : {&v.nontrivial.positive_ends, &v.nontrivial.negative_ends})
          for (const auto& e : *side) used.insert(e.orbit);
        bool none_left = std::includes(forbidden[j].begin(), forbidden[j].end(), used.begin(), used.end());
        if (none_left) r.message += "; every orbit of C(" + std::to_string(j) + ")_1 is already forbidden";
        return r;
      }
      forbidden[j].insert(g);
      r.trace.push_back({i, g, chosen->mult, j, "forbid", snapshot(j), ""});
    }
  }
  long long last = downward ? 1 : l;
  r.status = SpecialSearchResult::Status::contradiction;
  r.message = "no sharing found; forbidden orbits at C(" + std::to_string(last) + ")_1: " + std::to_string(forbidden[last].size()) +
              " of " + std::to_string(n) + (static_cast<long long>(forbidden[last].size()) == n ? ", so it has no available orbits" : "");
  return r;
}

// ---------------------------------------------------------------------------
// Synthetic case-2 instances

/// Fixed orbit tables for the generator. n = 2 uses the two orbits of the
/// ellipsoid E(1, sqrt2); n = 3 adds a third elliptic orbit.
inline OrbitTable generator_orbits(int n) {
  if (n == 1)
    throw PreconditionError(
        "no case-2 instance exists with one simple orbit: every action gap is a positive multiple of the simple action, "
        "which exceeds epsilon");
  if (n != 2 && n != 3) throw PreconditionError("generator supports n = 2 or 3");
  OrbitTable t({make_orbit("A", RealScalar(1), parse_real("1/sqrt2"), OrbitType::elliptic),
                make_orbit("B", parse_real("sqrt2"), parse_real("sqrt2"), OrbitType::elliptic)});
  if (n == 3) t.add(make_orbit("C", RealScalar(2), parse_real("sqrt3-1"), OrbitType::elliptic));
  return t;
}

/// A low-energy nontrivial component: ends are read off p+ of alpha' and p-
/// of beta' orbit by orbit.
struct CurveTemplate {
  OrbitSet alpha;
  OrbitSet beta;
  CurveTopology ends;  // genus left at 0
};

/// All templates alpha' -> beta' with disjoint supports, action below
/// `max_action`, 0 < A(alpha') - A(beta') < epsilon, and a nonexceptional
/// pair on each side.
inline std::vector<CurveTemplate> curve_templates(const OrbitTable& orbits, const RealScalar& epsilon, const RealScalar& max_action) {
  auto sets = enumerate_orbit_sets(orbits, max_action);
  std::vector<RealScalar> act;
  std::vector<double> act_d;
  for (const auto& s : sets) {
    act.push_back(action(s, orbits));
    act_d.push_back(act.back().to_double());
  }
  std::vector<CurveTemplate> out;
  double eps_d = epsilon.to_double();
  for (std::size_t i = 0; i < sets.size(); ++i) {
    if (sets[i].empty()) continue;
    for (std::size_t j = i; j-- > 0;) {
      if (act_d[i] - act_d[j] > eps_d + 1e-9) break;
      if (sets[j].empty() || act_d[i] - act_d[j] < -1e-9) continue;
      bool overlap = false;
      for (const auto& [id, m] : sets[i].entries()) overlap = overlap || sets[j].multiplicity(id) > 0;
      if (overlap) continue;
      RealScalar gap = act[i] - act[j];
      if (gap.sign() <= 0 || compare(gap, epsilon) >= 0) continue;
      if (!detail::has_nonexceptional(orbits, sets[i]) || !detail::has_nonexceptional(orbits, sets[j])) continue;
      CurveTemplate t{sets[i], sets[j], {}};
      for (const auto& [id, m] : sets[i].entries())
        for (long long p : positive_partition(orbits.at(id).theta, m).partition.parts) t.ends.positive_ends.push_back({id, p});
      for (const auto& [id, m] : sets[j].entries())
        for (long long p : negative_partition(orbits.at(id).theta, m).partition.parts) t.ends.negative_ends.push_back({id, p});
      out.push_back(std::move(t));
    }
  }
  return out;
}

struct GeneratorConfig {
  int n = 2;
  std::uint64_t seed = 1;
  long long start_max_multiplicity = 60;  // alpha(0) multiplicities drawn from [0, this]
  int max_attempts = 2000;
};

struct GeneratedInstance {
  UCurveSequence sequence;
  std::uint64_t seed = 0;
  int attempts = 0;
};

/// Case-2 generator. Starting from a random alpha(0), each step picks a
/// template whose negative side fits inside alpha(i-1), puts the rest in
/// trivial cylinders, and chooses the genus so that the J0 formula gives 2.
class InstanceGenerator {
 public:
  explicit InstanceGenerator(int n, RealScalar template_bound = RealScalar(60))
      : n_(n), orbits_(generator_orbits(n)), eps_(epsilon_threshold(orbits_)) {
    templates_ = curve_templates(orbits_, eps_.epsilon, template_bound);
    if (templates_.empty()) throw PreconditionError("no curve templates below epsilon");
  }

  /// Custom table and threshold. Passing an epsilon larger than the certified
  /// one yields sequences that violate the low-energy hypothesis.
  InstanceGenerator(OrbitTable orbits, EpsilonCertificate eps, RealScalar template_bound)
      : n_(static_cast<int>(orbits.size())), orbits_(std::move(orbits)), eps_(std::move(eps)) {
    templates_ = curve_templates(orbits_, eps_.epsilon, template_bound);
    if (templates_.empty()) throw PreconditionError("no curve templates below epsilon");
  }

  const OrbitTable& orbits() const { return orbits_; }
  const EpsilonCertificate& epsilon() const { return eps_; }
  const std::vector<CurveTemplate>& templates() const { return templates_; }

  GeneratedInstance generate(const GeneratorConfig& cfg) const {
    std::mt19937_64 rng(cfg.seed);
    const long long l = 2 * n_ + 1;
    for (int attempt = 1; attempt <= cfg.max_attempts; ++attempt) {
      UCurveSequence seq;
      OrbitSet start;
      for (const auto& id : orbits_.ids())
        start.add(id, static_cast<long long>(rng() % static_cast<std::uint64_t>(cfg.start_max_multiplicity + 1)));
      seq.generators.push_back(start);
      bool ok = true;
      for (long long i = 1; i <= l && ok; ++i) {
        const OrbitSet& below = seq.generators.back();
        std::vector<std::pair<UCurveData, OrbitSet>> options;
        for (const auto& t : templates_) {
          bool fits = true;
          for (const auto& [id, m] : t.beta.entries()) fits = fits && below.multiplicity(id) >= m;
          if (!fits) continue;
          OrbitSet rest;
          for (const auto& [id, m] : below.entries()) rest.add(id, m - t.beta.multiplicity(id));
          UCurveData u{t.ends, rest};
          long long base = j0_from_topology(u);
          if ((2 - base) % 2 != 0 || base > 2 || (2 - base) / 2 > 2) continue;
          u.nontrivial.genus = (2 - base) / 2;
          if (!classify_ucurve(u, 2).consistent) continue;
          options.emplace_back(std::move(u), rest * t.alpha);
        }
        if (options.empty()) {
          ok = false;
          break;
        }
        auto& pick = options[static_cast<std::size_t>(rng() % options.size())];
        seq.curves.push_back(pick.first);
        seq.j0.push_back(2);
        seq.generators.push_back(pick.second);
      }
      if (ok) return {std::move(seq), cfg.seed, attempt};
    }
    throw PreconditionError("generator found no instance within " + std::to_string(cfg.max_attempts) + " attempts");
  }

 private:
  int n_;
  OrbitTable orbits_;
  EpsilonCertificate eps_;
  std::vector<CurveTemplate> templates_;
};

// ---------------------------------------------------------------------------
// Non-torsion dichotomy

struct SequenceTerm {
  long long m1 = 0;
  long long m2 = 0;
  RealScalar action;
};

struct NontorsionReport {
  std::size_t kernel_rank = 0;
  std::vector<IntVector> kernel_basis;
  std::string branch;
  bool gamma_torsion = false;
  RealScalar bound;
  // rank 0
  std::size_t max_sets_per_class = 0;
  // rank 2
  std::size_t sets_in_gamma = 0;
  // rank 1
  std::optional<std::pair<long long, long long>> generator;  // (v1, v2), v2 > 0 (or v1 > 0 if v2 = 0)
  bool sign_pattern_ok = false;                             // v1 >= 0
  std::vector<SequenceTerm> sequence;                       // orbit sets of class Gamma by action
  std::optional<RealScalar> increment;                      // v1 A(e1) + v2 A(e2)
  bool growth_ok = false;                                   // increment >= min A(e_i)
  bool contradiction = false;  // the branch contradicts an infinite U-sequence in class Gamma
  std::string note;
};

/// Kernel of (m1, m2) -> m1[e1] + m2[e2] and what it says about orbit sets
/// e1^m1 e2^m2 in the class Gamma. A third class (the hyperbolic orbit) may
/// be passed and is ignored by the kernel computation.
inline NontorsionReport nontorsion_analysis(const HomologyGroup& group, const std::vector<IntVector>& classes,
                                            const IntVector& gamma, const std::vector<RealScalar>& actions,
                                            const RealScalar& bound = RealScalar(20), std::size_t terms = 10) {
  if (classes.size() != 2 && classes.size() != 3) throw DimensionError("need 2 or 3 orbit classes");
  if (actions.size() != classes.size()) throw DimensionError("one action per orbit class is required");
  for (const auto& c : classes) group.check(c);
  group.check(gamma);
  for (const auto& a : actions)
    if (a.sign() <= 0) throw PreconditionError("actions must be positive");

  NontorsionReport r;
  r.bound = bound;
  r.gamma_torsion = group.is_torsion(gamma);
  std::vector<IntVector> ell{classes[0], classes[1]};
  auto k = kernel_rank(ell, group);
  r.kernel_rank = k.rank;
  r.kernel_basis = k.basis;

  // orbit sets e1^m1 e2^m2 with action < bound, grouped by class
  std::map<IntVector, std::vector<SequenceTerm>> by_class;
  const auto g = group.generators();
  for (long long m1 = 0; compare(actions[0] * RealScalar(m1), bound) < 0; ++m1)
    for (long long m2 = 0;; ++m2) {
      RealScalar a = actions[0] * RealScalar(m1) + actions[1] * RealScalar(m2);
      if (compare(a, bound) >= 0) break;
      IntVector cls(g);
      for (std::size_t j = 0; j < g; ++j) cls[j] = classes[0][j] * m1 + classes[1][j] * m2;
      by_class[group.canonical(cls)].push_back({m1, m2, a});
    }
  const IntVector gamma_key = group.canonical(gamma);
  auto in_gamma = by_class.count(gamma_key) ? by_class.at(gamma_key) : std::vector<SequenceTerm>{};
  std::sort(in_gamma.begin(), in_gamma.end(), [](const SequenceTerm& x, const SequenceTerm& y) { return compare(x.action, y.action) < 0; });
  r.sets_in_gamma = in_gamma.size();

  if (k.rank == 0) {
    r.branch = "rank0";
    for (const auto& [cls, v] : by_class) r.max_sets_per_class = std::max(r.max_sets_per_class, v.size());
    r.contradiction = r.max_sets_per_class <= 1;
    r.note = "at most one orbit set per class, so no class carries infinitely many generators";
    return r;
  }
  if (k.rank == 2) {
    r.branch = "rank2";
    r.contradiction = !r.gamma_torsion && r.sets_in_gamma == 0;
    r.note = r.gamma_torsion ? "both orbits are torsion and Gamma is torsion"
                             : "both orbits are torsion, so no orbit set lies in the non-torsion class Gamma";
    return r;
  }
  r.branch = "rank1";
  long long v1 = k.basis[0][0].convert_to<long long>(), v2 = k.basis[0][1].convert_to<long long>();
  if (v2 < 0 || (v2 == 0 && v1 < 0)) v1 = -v1, v2 = -v2;
  r.generator = std::make_pair(v1, v2);
  r.sign_pattern_ok = v1 >= 0;
  r.increment = actions[0] * RealScalar(v1) + actions[1] * RealScalar(v2);
  if (!r.sign_pattern_ok) {
    r.sequence = in_gamma;
    r.contradiction = true;
    r.note = "v1 < 0: only finitely many orbit sets in class Gamma";
    return r;
  }
  if (in_gamma.empty()) {
    r.note = "no orbit set of class Gamma below the bound";
    return r;
  }
  SequenceTerm base = in_gamma.front();
  for (std::size_t t = 0; t < terms; ++t) {
    long long a1 = base.m1 + static_cast<long long>(t) * v1, a2 = base.m2 + static_cast<long long>(t) * v2;
    r.sequence.push_back({a1, a2, actions[0] * RealScalar(a1) + actions[1] * RealScalar(a2)});
  }
  r.growth_ok = compare(*r.increment, min(actions[0], actions[1])) >= 0;
  r.contradiction = r.growth_ok;
  r.note = "actions grow linearly in k, incompatible with growth like k^(1/2)";
  return r;
}

}  // namespace echkit
