#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "echkit/core.hpp"
#include "echkit/curves.hpp"
#include "echkit/dynamics.hpp"
#include "echkit/ellipsoid.hpp"
#include "echkit/errors.hpp"
#include "echkit/homology.hpp"
#include "echkit/partitions.hpp"
#include "echkit/real_scalar.hpp"
#include "echkit/search.hpp"

namespace echkit::io {

using json = nlohmann::json;

inline constexpr int kDecimalDigits = 30;

// Real numbers are written as {"exact": token, "decimal": 30 digits}. The
// exact token re-parses to the same value.
inline json real_json(const RealScalar& x) { return {{"exact", x.symbolic()}, {"decimal", x.to_string(kDecimalDigits)}}; }

inline RealScalar real_from_json(const json& j, int digits = kDefaultWorkingDigits) {
  if (j.is_string()) return parse_real(j.get<std::string>(), digits);
  if (j.is_number_integer()) return RealScalar(j.get<long long>());
  if (j.is_object() && j.contains("exact")) return parse_real(j.at("exact").get<std::string>(), digits);
  throw ParseError("expected a real token, integer or {\"exact\": ...}, got " + j.dump());
}

inline std::string fixed(double v, int digits = 17) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

inline json int_vector_json(const IntVector& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(x.convert_to<long long>());
  return a;
}

inline IntVector int_vector_from_json(const json& j) {
  if (!j.is_array()) throw ParseError("expected an integer array, got " + j.dump());
  IntVector v;
  for (const auto& x : j) {
    if (!x.is_number_integer()) throw ParseError("expected an integer, got " + x.dump());
    v.emplace_back(x.get<long long>());
  }
  return v;
}

// --- orbits -----------------------------------------------------------------

inline json orbit_json(const ReebOrbitSpec& o) {
  json j{{"id", o.id}, {"action", real_json(o.action)}, {"theta", real_json(o.theta)}, {"type", to_string(o.type)}};
  if (o.homology_class) j["homology_class"] = int_vector_json(*o.homology_class);
  return j;
}

inline json orbit_table_json(const OrbitTable& t) {
  json a = json::array();
  for (const auto* o : t.list()) a.push_back(orbit_json(*o));
  return a;
}

/// Accepts either an array of orbits or a document with an "orbits" array.
inline OrbitTable orbit_table_from_json(const json& j, int digits = kDefaultWorkingDigits) {
  const json& arr = j.is_object() && j.contains("orbits") ? j.at("orbits") : j;
  if (!arr.is_array()) throw ParseError("orbit table must be an array");
  OrbitTable t;
  for (const auto& o : arr) {
    if (!o.is_object() || !o.contains("id") || !o.contains("action") || !o.contains("theta"))
      throw ParseError("orbit entries need id, action and theta: " + o.dump());
    RealScalar theta = real_from_json(o.at("theta"), digits);
    ReebOrbitSpec spec{o.at("id").get<std::string>(), real_from_json(o.at("action"), digits), theta,
                       o.contains("type") ? orbit_type_from_string(o.at("type").get<std::string>()) : type_of_theta(theta),
                       std::nullopt};
    if (o.contains("homology_class")) spec.homology_class = int_vector_from_json(o.at("homology_class"));
    t.add(std::move(spec));
  }
  return t;
}

inline json homology_json(const HomologyGroup& h) {
  json rel = json::array();
  for (std::size_t i = 0; i < h.relations().rows(); ++i) rel.push_back(int_vector_json(h.relations().row(i)));
  json tors = json::array();
  for (const auto& d : h.torsion()) tors.push_back(d.convert_to<long long>());
  return {{"generators", h.generators()}, {"relations", rel}, {"free_rank", h.free_rank()}, {"torsion", tors}};
}

inline HomologyGroup homology_from_json(const json& j) {
  if (!j.is_object() || !j.contains("generators")) throw ParseError("homology presentation needs \"generators\"");
  auto g = j.at("generators").get<std::size_t>();
  std::vector<IntVector> rows;
  if (j.contains("relations"))
    for (const auto& r : j.at("relations")) rows.push_back(int_vector_from_json(r));
  return HomologyGroup(IntMatrix::from_rows(rows, g));
}

inline json orbit_set_json(const OrbitSet& s) {
  json j = json::object();
  for (const auto& [id, m] : s.entries()) j[id] = m;
  return j;
}

inline OrbitSet orbit_set_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("orbit set must be an object id -> multiplicity");
  OrbitSet s;
  for (const auto& [id, m] : j.items()) s.add(id, m.get<long long>());
  return s;
}

// --- curves -----------------------------------------------------------------

inline json ends_json(const std::vector<CurveEnd>& ends) {
  json a = json::array();
  for (const auto& e : ends) a.push_back({{"orbit", e.orbit}, {"mult", e.mult}});
  return a;
}

inline std::vector<CurveEnd> ends_from_json(const json& j) {
  std::vector<CurveEnd> out;
  for (const auto& e : j) out.push_back({e.at("orbit").get<std::string>(), e.at("mult").get<long long>()});
  return out;
}

inline json topology_json(const CurveTopology& c) {
  return {{"genus", c.genus}, {"positive_ends", ends_json(c.positive_ends)}, {"negative_ends", ends_json(c.negative_ends)}, {"delta", c.delta}};
}

inline CurveTopology topology_from_json(const json& j) {
  CurveTopology c;
  c.genus = j.value("genus", 0LL);
  if (j.contains("positive_ends")) c.positive_ends = ends_from_json(j.at("positive_ends"));
  if (j.contains("negative_ends")) c.negative_ends = ends_from_json(j.at("negative_ends"));
  c.delta = j.value("delta", 0LL);
  return c;
}

inline json ucurve_json(const UCurveData& u) {
  return {{"nontrivial", topology_json(u.nontrivial)}, {"trivial_cylinders", orbit_set_json(u.trivial_cylinders)}};
}

inline UCurveData ucurve_from_json(const json& j) {
  return {topology_from_json(j.at("nontrivial")), j.contains("trivial_cylinders") ? orbit_set_from_json(j.at("trivial_cylinders")) : OrbitSet{}};
}

inline json classification_json(const ClassificationReport& r) {
  auto t = curve_type(r);
  return {{"j0_claimed", r.j0_claimed},
          {"j0_formula", r.j0_formula},
          {"consistent", r.consistent},
          {"violations", r.violations},
          {"genus0_at_most_3_ends", r.genus0_at_most_3_ends},
          {"no_same_side_repeat", r.no_same_side_repeat},
          {"sharing", r.sharing},
          {"type", t ? json(to_string(*t)) : json(nullptr)}};
}

inline json clauses_json(const std::vector<ClauseResult>& cs) {
  json a = json::array();
  for (const auto& c : cs) a.push_back({{"clause", c.clause}, {"ok", c.ok}, {"detail", c.detail}});
  return a;
}

inline json verdict_json(const SpecialVerdict& v) {
  return {{"special", v.special}, {"clauses", clauses_json(v.clauses)}, {"gss_hypotheses", clauses_json(v.gss_hypotheses)}};
}

inline json partition_checks_json(const PartitionConditionsReport& r) {
  json a = json::array();
  for (const auto& c : r.checks)
    a.push_back({{"orbit", c.orbit}, {"side", c.side == Side::positive ? "positive" : "negative"}, {"total", c.total},
                 {"ends", c.ends}, {"expected", c.expected}, {"ok", c.ok}});
  return {{"pass", r.pass}, {"checks", a}};
}

// --- partitions -------------------------------------------------------------

inline json path_json(const LatticePath& p) {
  json a = json::array();
  for (const auto& v : p.vertices) a.push_back({v.x, v.y});
  return a;
}

// --- search -----------------------------------------------------------------

inline json epsilon_json(const EpsilonCertificate& c) {
  json w = json::array();
  for (const auto& g : c.witnesses) w.push_back({{"condition", g.condition}, {"gap", real_json(g.gap)}, {"x", g.x}, {"y", g.y}});
  json ex = json::object();
  for (const auto& [id, v] : c.exceptional) ex[id] = v;
  return {{"epsilon", real_json(c.epsilon)}, {"bound", real_json(c.bound)}, {"exceptional", ex},
          {"exceptional_sets", c.exceptional_sets}, {"compared_sets", c.compared_sets}, {"witnesses", w},
          {"coincidences", c.coincidences}};
}

inline json sequence_json(const UCurveSequence& s) {
  json g = json::array(), c = json::array();
  for (const auto& x : s.generators) g.push_back(orbit_set_json(x));
  for (const auto& u : s.curves) c.push_back(ucurve_json(u));
  return {{"case", s.declared_case}, {"generators", g}, {"curves", c}, {"j0", s.j0}};
}

inline UCurveSequence sequence_from_json(const json& j) {
  UCurveSequence s;
  s.declared_case = j.value("case", 2);
  for (const auto& g : j.at("generators")) s.generators.push_back(orbit_set_from_json(g));
  for (const auto& c : j.at("curves")) s.curves.push_back(ucurve_from_json(c));
  for (const auto& v : j.at("j0")) s.j0.push_back(v.get<long long>());
  return s;
}

/// Instance document: orbit table, optional epsilon override and the sequence.
inline json instance_json(const OrbitTable& t, const UCurveSequence& s, const std::optional<RealScalar>& epsilon = std::nullopt) {
  json j{{"orbits", orbit_table_json(t)}, {"sequence", sequence_json(s)}};
  if (epsilon) j["epsilon"] = real_json(*epsilon);
  return j;
}

inline json trace_json(const std::vector<TraceStep>& trace) {
  json a = json::array();
  for (const auto& s : trace)
    a.push_back({{"source", s.source}, {"orbit", s.orbit}, {"mult", s.mult}, {"curve", s.curve}, {"action", s.action},
                 {"forbidden", s.forbidden}, {"note", s.note}});
  return a;
}

inline std::vector<TraceStep> trace_from_json(const json& j) {
  std::vector<TraceStep> out;
  for (const auto& s : j)
    out.push_back({s.at("source").get<long long>(), s.at("orbit").get<std::string>(), s.at("mult").get<long long>(),
                   s.at("curve").get<long long>(), s.at("action").get<std::string>(),
                   s.at("forbidden").get<std::vector<std::string>>(), s.value("note", std::string())});
  return out;
}

inline json search_result_json(const SpecialSearchResult& r) {
  json f = json::array();
  for (const auto& x : r.failures) f.push_back({{"hypothesis", x.hypothesis}, {"curve", x.curve}, {"detail", x.detail}});
  json j{{"status", to_string(r.status)},
         {"case", r.instance_case},
         {"index", r.index ? json(*r.index) : json(nullptr)},
         {"shared_orbit", r.shared_orbit},
         {"direction", r.direction},
         {"type_I_count", r.type_I_count},
         {"type_II_count", r.type_II_count},
         {"trace", trace_json(r.trace)},
         {"trace_monotone", trace_is_monotone(r.trace)},
         {"failures", f},
         {"message", r.message}};
  if (r.verdict) j["verdict"] = verdict_json(*r.verdict);
  return j;
}

inline json nontorsion_json(const NontorsionReport& r) {
  json basis = json::array();
  for (const auto& v : r.kernel_basis) basis.push_back(int_vector_json(v));
  json seq = json::array();
  for (const auto& t : r.sequence) seq.push_back({{"m1", t.m1}, {"m2", t.m2}, {"action", real_json(t.action)}});
  json j{{"kernel_rank", r.kernel_rank}, {"kernel_basis", basis}, {"branch", r.branch}, {"gamma_torsion", r.gamma_torsion},
         {"bound", real_json(r.bound)}, {"max_sets_per_class", r.max_sets_per_class}, {"sets_in_gamma", r.sets_in_gamma},
         {"sign_pattern_ok", r.sign_pattern_ok}, {"sequence", seq}, {"growth_ok", r.growth_ok},
         {"contradiction", r.contradiction}, {"note", r.note}};
  j["generator"] = r.generator ? json({r.generator->first, r.generator->second}) : json(nullptr);
  j["increment"] = r.increment ? real_json(*r.increment) : json(nullptr);
  return j;
}

// --- ellipsoid and dynamics ---------------------------------------------------

inline json spectrum_entry_json(const SpectrumEntry& e) {
  return {{"k", e.k}, {"m", e.m}, {"n", e.n}, {"action", real_json(e.action)}, {"grading", e.grading ? json(*e.grading) : json(nullptr)}};
}

inline json asymptotics_json(const AsymptoticsReport& r) {
  json cps = json::array();
  for (const auto& p : r.checkpoints)
    cps.push_back({{"k", p.k}, {"N", fixed(p.N)}, {"ratio", fixed(p.ratio)}, {"deviation", fixed(p.deviation)}});
  return {{"volume", fixed(r.volume)}, {"checkpoints", cps}, {"final_deviation", fixed(r.final_deviation)},
          {"decreasing_fraction", fixed(r.decreasing_fraction)}, {"monotone", r.monotone},
          {"exponent", r.exponent ? json(fixed(*r.exponent)) : json(nullptr)}, {"convergence_claimed", r.convergence_claimed}};
}

inline json census_counts_json(const Census& c) {
  json counts = json::object();
  for (const auto& [q, n] : c.counts) counts[std::to_string(q)] = n;
  return {{"max_period", c.max_period}, {"grid", c.grid}, {"tol", fixed(c.tol, 3)}, {"points", c.points.size()},
          {"binding", c.binding.size()}, {"counts", counts}};
}

inline std::string to_string(DichotomyReport::Verdict v) {
  switch (v) {
    case DichotomyReport::Verdict::none_found:
      return "none_found";
    case DichotomyReport::Verdict::infinite_evidence:
      return "infinite_evidence";
    case DichotomyReport::Verdict::inconclusive:
      return "inconclusive";
  }
  return "";
}

inline json dichotomy_json(const DichotomyReport& r) {
  json growth = json::object();
  for (const auto& [q, p] : r.growth) growth[std::to_string(q)] = {p.first, p.second};
  return {{"verdict", to_string(r.verdict)},
          {"area_residual", {{"max", fixed(r.area.max, 6)}, {"mean", fixed(r.area.mean, 6)}, {"samples", r.area.samples}}},
          {"census", census_counts_json(r.census)},
          {"refined", r.refined.grid ? census_counts_json(r.refined) : json(nullptr)},
          {"growth", growth},
          {"growth_strict", r.growth_strict},
          {"binding_points", r.binding_points}};
}

inline json error_json(const std::string& code, const std::string& message) { return {{"error", code}, {"message", message}}; }

}  // namespace echkit::io
