#pragma once

// Quick versions of the invariant suites, run by `echkit selftest`. Each
// check compares a library route against an independent one from
// oracles.hpp or against a closed form.

#include <chrono>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "echkit/core.hpp"
#include "echkit/curves.hpp"
#include "echkit/dynamics.hpp"
#include "echkit/ellipsoid.hpp"
#include "echkit/index.hpp"
#include "echkit/json_io.hpp"
#include "echkit/oracles.hpp"
#include "echkit/partitions.hpp"
#include "echkit/search.hpp"

namespace echkit::selftest {

struct CheckResult {
  std::string module;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0;
};

struct Check {
  std::string module;
  std::string name;
  std::function<std::string()> run;  // empty string on success, failure description otherwise
};

namespace detail {

inline RealScalar random_quadratic(std::mt19937_64& rng) {
  static const char* surds[] = {"sqrt2", "sqrt3", "sqrt5", "sqrt7", "golden"};
  long long p = static_cast<long long>(rng() % 21) - 10, q = 1 + static_cast<long long>(rng() % 9);
  long long s = 1 + static_cast<long long>(rng() % 5), t = 1 + static_cast<long long>(rng() % 7);
  return RealScalar(Rational(p, q)) + RealScalar(Rational(s, t)) * parse_real(surds[rng() % 5]);
}

inline IntVector small_vector(std::mt19937_64& rng, std::size_t n, int lo, int hi) {
  IntVector v;
  for (std::size_t i = 0; i < n; ++i) v.emplace_back(lo + static_cast<int>(rng() % static_cast<unsigned>(hi - lo + 1)));
  return v;
}

inline std::string fail_if(bool bad, const std::string& what) { return bad ? what : std::string(); }

}  // namespace detail

inline std::vector<Check> checks() {
  using detail::fail_if;
  std::vector<Check> out;

  // core
  out.push_back({"core", "action additivity and enumeration count", [] {
                   OrbitTable t({make_orbit("a", RealScalar(1), parse_real("sqrt2-1"), OrbitType::elliptic),
                                 make_orbit("b", parse_real("sqrt2"), parse_real("golden-1"), OrbitType::elliptic),
                                 make_orbit("c", parse_real("1+2*sqrt2"), RealScalar(1), OrbitType::positive_hyperbolic)});
                   auto sets = enumerate_orbit_sets(t, RealScalar(12));
                   std::size_t grid = oracle::grid_count_below({RealScalar(1), parse_real("sqrt2"), parse_real("1+2*sqrt2")}, 12);
                   if (sets.size() != grid) return "enumeration " + std::to_string(sets.size()) + " != grid " + std::to_string(grid);
                   for (std::size_t i = 0; i + 1 < sets.size(); i += 7)
                     if (compare(action(sets[i] * sets[i + 1], t), action(sets[i], t) + action(sets[i + 1], t)) != 0)
                       return "action not additive on " + sets[i].to_string();
                   return std::string();
                 }});
  out.push_back({"core", "kernel rank against rational elimination", [] {
                   std::mt19937_64 rng(11);
                   for (int trial = 0; trial < 200; ++trial) {
                     std::vector<IntVector> rel{detail::small_vector(rng, 3, -5, 5), detail::small_vector(rng, 3, -5, 5)};
                     HomologyGroup h(IntMatrix::from_rows(rel, 3));
                     std::vector<IntVector> cls{detail::small_vector(rng, 3, -3, 3), detail::small_vector(rng, 3, -3, 3),
                                                detail::small_vector(rng, 3, -3, 3)};
                     if (kernel_rank(cls, h).rank != oracle::kernel_rank_rational(cls, h.relations())) return "mismatch at trial " + std::to_string(trial);
                     auto d = h.smith().diagonal();
                     for (std::size_t i = 0; i + 1 < d.size(); ++i)
                       if (d[i] != 0 && d[i + 1] % d[i] != 0) return std::string("SNF divisibility chain broken");
                   }
                   return std::string();
                 }});
  out.push_back({"core", "cover type is multiplicative", [] {
                   for (auto b : {OrbitType::elliptic, OrbitType::positive_hyperbolic, OrbitType::negative_hyperbolic})
                     for (long long j = 1; j <= 6; ++j)
                       for (long long k = 1; k <= 6; ++k)
                         if (cover_type(cover_type(b, j), k) != cover_type(b, j * k)) return "fails for " + to_string(b);
                   return std::string();
                 }});

  // partitions
  out.push_back({"partitions", "sums, endpoints and reflection identity", [] {
                   std::mt19937_64 rng(5);
                   for (int trial = 0; trial < 200; ++trial) {
                     RealScalar th = detail::random_quadratic(rng);
                     long long m = 1 + static_cast<long long>(rng() % 40);
                     auto pp = partitions(th, m);
                     if (pp.plus.partition.sum() != m || pp.minus.partition.sum() != m) return "parts do not sum to m for " + th.symbolic();
                     if (BigInt(pp.plus.path.end().y) != (th * RealScalar(m)).floor()) return std::string("p+ endpoint is not floor(m theta)");
                     if (BigInt(pp.minus.path.end().y) != (th * RealScalar(m)).ceil()) return std::string("p- endpoint is not ceil(m theta)");
                     if (pp.minus.partition.multiset() != positive_partition(-th, m).partition.multiset()) return "reflection fails for " + th.symbolic();
                   }
                   return std::string();
                 }});
  out.push_back({"partitions", "hull against brute-force lattice search", [] {
                   std::mt19937_64 rng(9);
                   for (int trial = 0; trial < 20; ++trial) {
                     RealScalar th = detail::random_quadratic(rng);
                     for (long long m = 1; m <= 12; ++m) {
                       if (positive_partition(th, m).partition.parts != oracle::brute_force_partition(th, m, 1)) return "p+ differs for " + th.symbolic();
                       if (negative_partition(th, m).partition.parts != oracle::brute_force_partition(th, m, -1)) return "p- differs for " + th.symbolic();
                     }
                   }
                   return std::string();
                 }});
  out.push_back({"partitions", "relative primality, disjointness, exceptional over-scan", [] {
                   std::mt19937_64 rng(3);
                   for (int trial = 0; trial < 20; ++trial) {
                     RealScalar th = detail::random_quadratic(rng);
                     for (long long m = 1; m <= 60; ++m) {
                       auto pp = partitions(th, m);
                       if (pp.plus.partition.parts == std::vector<long long>{m} && mp::gcd(BigInt(m), (th * RealScalar(m)).floor()) != 1)
                         return "gcd(m, floor) != 1 for " + th.symbolic();
                       if (pp.minus.partition.parts == std::vector<long long>{m} && mp::gcd(BigInt(m), (th * RealScalar(m)).ceil()) != 1)
                         return "gcd(m, ceil) != 1 for " + th.symbolic();
                       if (m > 1)
                         for (long long v : pp.plus.partition.parts)
                           if (pp.minus.partition.contains(v)) return "p+ and p- share a part for " + th.symbolic();
                     }
                     auto ex = exceptional_multiplicities(th, OrbitType::elliptic);
                     std::vector<long long> scan;
                     for (long long m = 1; m <= 10 * ex.cutoff; ++m)
                       if (is_exceptional(th, m)) scan.push_back(m);
                     if (scan != ex.multiplicities) return "exceptional set differs from over-scan for " + th.symbolic();
                   }
                   return std::string();
                 }});

  // index
  out.push_back({"index", "I - J0 closed form, additivity, CZ parity", [] {
                   OrbitTable t({make_orbit("a", RealScalar(1), parse_real("sqrt2-1"), OrbitType::elliptic),
                                 make_orbit("b", parse_real("sqrt2"), parse_real("1/2"), OrbitType::negative_hyperbolic),
                                 make_orbit("c", parse_real("sqrt3"), RealScalar(2), OrbitType::positive_hyperbolic)});
                   std::mt19937_64 rng(17);
                   auto rset = [&] {
                     OrbitSet s;
                     s.add("a", static_cast<long long>(rng() % 5));
                     s.add("b", static_cast<long long>(rng() % 3));
                     s.add("c", static_cast<long long>(rng() % 2));
                     return s;
                   };
                   for (int trial = 0; trial < 2000; ++trial) {
                     auto d = relative_data(rset(), rset(), static_cast<long long>(rng() % 11) - 5, static_cast<long long>(rng() % 11) - 5, t);
                     i_minus_j0(d);  // throws on disagreement
                   }
                   WeightedChernModel model{t, {{"a", Rational(1)}, {"b", Rational(1)}, {"c", Rational(0)}}, {{0, 1, 0}, {1, 0, 0}, {0, 0, 0}}};
                   for (int trial = 0; trial < 500; ++trial) {
                     auto x = rset(), y = rset(), z = rset();
                     auto ix = abs_indices(x, model), iy = abs_indices(y, model), iz = abs_indices(z, model);
                     if (ech_index(model.relative(x, z)) != ech_index(model.relative(x, y)) + ech_index(model.relative(y, z)) ||
                         ix.I - iz.I != (ix.I - iy.I) + (iy.I - iz.I))
                       return std::string("additivity fails");
                   }
                   for (const auto* o : t.list())
                     for (long long k = 1; k <= 12; ++k) {
                       bool odd = cz_index(o->theta, k) % 2 != 0;
                       if (odd != (cover_type(*o, k) != OrbitType::positive_hyperbolic)) return "CZ parity fails for " + o->id;
                     }
                   return std::string();
                 }});
  out.push_back({"index", "delta_1 bound on ellipsoid generators", [] {
                   auto rep = verify_delta1(EllipsoidModel(RealScalar(1), parse_real("sqrt2")).chern_model(), RealScalar(20));
                   return fail_if(!rep.violations.empty(), std::to_string(rep.violations.size()) + " violations");
                 }});

  // curves
  out.push_back({"curves", "partition conditions accept p+/p- ends and reject finer splittings", [] {
                   OrbitTable t({make_orbit("e", RealScalar(1), parse_real("sqrt2-1"), OrbitType::elliptic)});
                   const RealScalar& th = t.at("e").theta;
                   for (long long m = 1; m <= 20; ++m) {
                     CurveTopology c;
                     for (long long p : positive_partition(th, m).partition.parts) c.positive_ends.push_back({"e", p});
                     for (long long p : negative_partition(th, m).partition.parts) c.negative_ends.push_back({"e", p});
                     if (!check_partition_conditions(c, t).pass) return "p+/p- ends rejected at m=" + std::to_string(m);
                     auto finer = c;
                     auto it = std::find_if(finer.positive_ends.begin(), finer.positive_ends.end(), [](const CurveEnd& e) { return e.mult > 1; });
                     if (it == finer.positive_ends.end()) continue;
                     long long v = it->mult;
                     it->mult = v - 1;
                     finer.positive_ends.push_back({"e", 1});
                     if (check_partition_conditions(finer, t).pass) return "finer splitting accepted at m=" + std::to_string(m);
                   }
                   return std::string();
                 }});
  out.push_back({"curves", "zero count at extremal windings equals c_N", [] {
                   OrbitTable t({make_orbit("e", RealScalar(1), parse_real("sqrt2-1"), OrbitType::elliptic),
                                 make_orbit("h", RealScalar(2), RealScalar(1), OrbitType::positive_hyperbolic)});
                   std::mt19937_64 rng(23);
                   const char* ids[] = {"e", "h"};
                   for (int trial = 0; trial < 500; ++trial) {
                     CurveTopology c;
                     c.genus = static_cast<long long>(rng() % 2);
                     for (int i = 0, n = 1 + static_cast<int>(rng() % 2); i < n; ++i) c.positive_ends.push_back({ids[rng() % 2], 1 + static_cast<long long>(rng() % 4)});
                     for (int i = 0, n = static_cast<int>(rng() % 3); i < n; ++i) c.negative_ends.push_back({ids[rng() % 2], 1 + static_cast<long long>(rng() % 4)});
                     long long c_tau = static_cast<long long>(rng() % 5) - 2;
                     std::vector<long long> czp, czm;
                     for (const auto& e : c.positive_ends) czp.push_back(cz_index(t.at(e.orbit).theta, e.mult));
                     for (const auto& e : c.negative_ends) czm.push_back(cz_index(t.at(e.orbit).theta, e.mult));
                     long long ind = fredholm_index(c.chi(), c_tau, czp, czm);
                     auto r = psi_zero_count(c, c_tau, extremal_windings(c, t), &t, ind);
                     if (!r.normal_chern || r.count != *r.normal_chern) return std::string("zero count differs from c_N");
                     if (((ind - h_plus(c, t) - c.chi() - c.ends()) % 2 + 2) % 2 != 0) return std::string("Fredholm parity fails");
                   }
                   return std::string();
                 }});

  // ellipsoid
  out.push_back({"ellipsoid", "grading order equals action order", [] {
                   for (const char* b : {"sqrt2", "e-1"}) {
                     auto s = spectrum(EllipsoidModel(RealScalar(1), parse_real(b)), 300);
                     for (std::size_t k = 0; k < s.size(); ++k)
                       if (*s[k].grading != 2 * static_cast<long long>(k)) return std::string("grading of entry ") + std::to_string(k) + " for b=" + b;
                   }
                   return std::string();
                 }});
  out.push_back({"ellipsoid", "volume asymptotics and growth exponent", [] {
                   auto r = volume_asymptotics(EllipsoidModel(RealScalar(1), parse_real("sqrt2")), 100000);
                   if (r.final_deviation > 0.02) return "deviation " + io::fixed(r.final_deviation, 4) + " at K=1e5";
                   if (!r.exponent || *r.exponent < 0.49 || *r.exponent > 0.51) return std::string("exponent outside [0.49, 0.51]");
                   return std::string();
                 }});

  // search
  out.push_back({"search", "epsilon stable at twice the bound", [] {
                   auto t = generator_orbits(2);
                   auto e = epsilon_threshold(t);
                   EpsilonOptions o;
                   o.action_bound = e.bound * RealScalar(2);
                   return fail_if(compare(e.epsilon, epsilon_threshold(t, o).epsilon) != 0, "epsilon changes at 2x bound");
                 }});
  out.push_back({"search", "generated case-2 instances give special curves", [] {
                   InstanceGenerator gen(2);
                   for (std::uint64_t seed = 1; seed <= 20; ++seed) {
                     auto r = find_special(gen.generate({2, seed}).sequence, gen.epsilon(), gen.orbits());
                     if (r.status != SpecialSearchResult::Status::found || !r.verdict->special) return "seed " + std::to_string(seed) + ": " + r.message;
                     if (!trace_is_monotone(r.trace)) return "non-monotone trace at seed " + std::to_string(seed);
                   }
                   return std::string();
                 }});
  out.push_back({"search", "rank-1 sequence has constant increment", [] {
                   IntVector a, b, g;
                   a.emplace_back(2), b.emplace_back(-3), g.emplace_back(1);
                   auto r = nontorsion_analysis(HomologyGroup::free(1), {a, b}, g, {RealScalar(1), parse_real("sqrt2")});
                   if (r.branch != "rank1" || r.sequence.size() < 2) return std::string("expected a rank-1 sequence");
                   for (std::size_t k = 1; k < r.sequence.size(); ++k)
                     if (compare(r.sequence[k].action - r.sequence[k - 1].action, *r.increment) != 0) return std::string("increment not constant");
                   return std::string();
                 }});

  // dynamics
  out.push_back({"dynamics", "rotation census nonempty iff rational", [] {
                   for (const char* t : {"1/3", "2/5"})
                     if (find_periodic_points(rotation_map(parse_real(t)), 6, 6, 1e-8).size() == 0) return std::string("empty census for ") + t;
                   for (const char* t : {"golden-1", "sqrt2-1"})
                     if (find_periodic_points(rotation_map(parse_real(t)), 20, 6, 1e-8).size() != 0) return std::string("periodic points for ") + t;
                   return std::string();
                 }});
  out.push_back({"dynamics", "twist radii and refinement stability", [] {
                   auto coarse = find_periodic_points(twist_map(), 6, 6, 1e-10);
                   auto fine = find_periodic_points(twist_map(), 6, 18, 1e-10);
                   for (const auto& p : coarse.points) {
                     double r = std::hypot(p.point[0], p.point[1]) - 1.0;
                     double k = std::round(r * static_cast<double>(p.period));
                     if (std::abs(r - k / static_cast<double>(p.period)) > 1e-8) return std::string("radius off the analytic circle");
                   }
                   for (const auto& [q, n] : coarse.counts)
                     if (fine.counts[q] < n) return std::string("count dropped under refinement");
                   auto res = area_preservation_residual(ellipsoid_return_map(EllipsoidModel(RealScalar(1), parse_real("sqrt2"))),
                                                         domain_samples(ellipsoid_return_map(EllipsoidModel(RealScalar(1), parse_real("sqrt2"))).domain, 100));
                   return fail_if(res.max >= 1e-6, "return-map Jacobian residual " + io::fixed(res.max, 3));
                 }});

  // cli
  out.push_back({"cli", "JSON round trip of reals and orbit tables", [] {
                   auto t = generator_orbits(3);
                   auto back = io::orbit_table_from_json(io::json::parse(io::orbit_table_json(t).dump()));
                   for (const auto* o : t.list()) {
                     const auto& p = back.at(o->id);
                     if (compare(p.action, o->action) != 0 || compare(p.theta, o->theta) != 0 || p.type != o->type) return "orbit " + o->id + " changed";
                   }
                   for (const char* tok : {"sqrt2-1", "3/7", "golden", "1/pi", "e-1"}) {
                     RealScalar x = parse_real(tok);
                     auto j = io::json::parse(io::real_json(x).dump());
                     auto y = io::real_from_json(j);
                     auto c = try_compare(x, y);
                     if (c && *c != 0) return std::string("value changed for ") + tok;
                     if (std::abs(std::stod(j.at("decimal").get<std::string>()) - x.to_double()) > 1e-15 * std::max(1.0, std::abs(x.to_double())))
                       return std::string("decimal field off for ") + tok;
                   }
                   return std::string();
                 }});
  return out;
}

inline std::vector<CheckResult> run_all(const std::string& only_module = "") {
  std::vector<CheckResult> out;
  for (const auto& c : checks()) {
    if (!only_module.empty() && c.module != only_module) continue;
    CheckResult r{c.module, c.name, false, "", 0};
    auto t0 = std::chrono::steady_clock::now();
    try {
      r.detail = c.run();
      r.pass = r.detail.empty();
    } catch (const std::exception& e) {
      r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace echkit::selftest
