#pragma once

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "echkit/core.hpp"
#include "echkit/curves.hpp"
#include "echkit/dynamics.hpp"
#include "echkit/ellipsoid.hpp"
#include "echkit/errors.hpp"
#include "echkit/index.hpp"
#include "echkit/json_io.hpp"
#include "echkit/partitions.hpp"
#include "echkit/search.hpp"
#include "echkit/selftest.hpp"

namespace echkit::cli {

using io::json;

struct RunConfig {
  std::string subcommand;
  std::string format;  // empty: subcommand default
  int precision = kDefaultWorkingDigits;
  std::uint64_t seed = 1;
  int jobs = 1;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline int precision_from_env() {
  const char* v = std::getenv("ECHKIT_PRECISION");
  if (!v || !*v) return kDefaultWorkingDigits;
  try {
    std::size_t used = 0;
    int d = std::stoi(v, &used);
    if (used != std::string(v).size() || d < 20 || d > kMaxWorkingDigits) throw std::invalid_argument("range");
    return d;
  } catch (const std::exception&) {
    throw UsageError("ECHKIT_PRECISION must be an integer in [20, " + std::to_string(kMaxWorkingDigits) + "], got '" + v + "'");
  }
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open input file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError("malformed JSON in '" + path + "': " + e.what());
  }
}

/// "A:17,B:2", "A^17 B^2", "{}" or a JSON object.
inline OrbitSet parse_orbit_set_arg(const std::string& s) {
  std::string t = s;
  if (t.find('"') != std::string::npos) return io::orbit_set_from_json(json::parse(t));
  for (char& c : t)
    if (c == ',' || c == '{' || c == '}') c = ' ';
  std::istringstream in(t);
  OrbitSet out;
  std::string tok;
  while (in >> tok) {
    auto pos = tok.find_first_of(":^");
    std::string id = tok.substr(0, pos);
    long long m = 1;
    if (pos != std::string::npos) {
      try {
        m = std::stoll(tok.substr(pos + 1));
      } catch (const std::exception&) {
        throw ParseError("bad multiplicity in '" + tok + "'");
      }
    }
    if (id.empty()) throw ParseError("empty orbit id in '" + s + "'");
    out.add(id, m);
  }
  return out;
}

inline std::string render_text(const json& j, const std::string& indent = "") {
  std::string out;
  for (const auto& [k, v] : j.items()) {
    if (v.is_object() && v.contains("exact") && v.contains("decimal"))
      out += indent + k + ": " + v.at("decimal").get<std::string>() + " (" + v.at("exact").get<std::string>() + ")\n";
    else if (v.is_object())
      out += indent + k + ":\n" + render_text(v, indent + "  ");
    else if (v.is_string())
      out += indent + k + ": " + v.get<std::string>() + "\n";
    else
      out += indent + k + ": " + v.dump() + "\n";
  }
  return out;
}

namespace detail {

inline void emit(std::ostream& out, const json& j, const std::string& format) {
  if (format == "text")
    out << render_text(j);
  else
    out << j.dump(2) << "\n";
}

inline void require_format(const std::string& format, std::initializer_list<const char*> allowed, const std::string& sub) {
  for (const char* a : allowed)
    if (format == a) return;
  throw UsageError("format '" + format + "' is not available for " + sub);
}

inline SurfaceMap make_map(const std::string& kind, const std::string& turn, const std::string& a, const std::string& b, int digits) {
  if (kind == "rotation") return rotation_map(parse_real(turn, digits));
  if (kind == "twist") return twist_map();
  if (kind == "shear") return shear_map();
  if (kind == "contraction") return contraction_map();
  if (kind == "ellipsoid" || kind == "ellipsoid-integrated" || kind == "ellipsoid-rational") {
    RealScalar ra = parse_real(a, digits), rb = parse_real(b, digits);
    EllipsoidModel m = kind == "ellipsoid-rational" ? EllipsoidModel::degenerate(ra, rb) : EllipsoidModel(ra, rb);
    return kind == "ellipsoid-integrated" ? ellipsoid_return_map_integrated(m) : ellipsoid_return_map(m);
  }
  throw UsageError("unknown map '" + kind + "'");
}

}  // namespace detail

/// Parses argv, runs the subcommand and writes the report to `out`.
/// Exit status: 0 success, 1 usage error, 2 domain error (JSON on `out`).
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"echkit: index calculus, partitions, special-curve search and model checks"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand
  RunConfig cfg;
  app.add_option("--format", cfg.format, "json | csv | text")->check(CLI::IsMember({"json", "csv", "text"}));
  app.add_option("--seed", cfg.seed, "seed for generated instances");
  app.add_option("--jobs", cfg.jobs, "worker threads for batch commands")->check(CLI::Range(1, 256));
  std::optional<int> precision_flag;
  app.add_option("--precision", precision_flag, "working digits (overrides ECHKIT_PRECISION)")->check(CLI::Range(20, kMaxWorkingDigits));

  // partitions / cz / exceptional
  std::string theta, type_name;
  long long m = 1, k = 1;
  auto* s_part = app.add_subcommand("partitions", "p+ and p- of (theta, m)");
  s_part->add_option("--theta", theta)->required();
  s_part->add_option("--m", m)->required()->check(CLI::PositiveNumber);

  auto* s_cz = app.add_subcommand("cz", "Conley-Zehnder indices of the covers 1..k");
  s_cz->add_option("--theta", theta)->required();
  s_cz->add_option("--k", k)->required()->check(CLI::PositiveNumber);

  auto* s_exc = app.add_subcommand("exceptional", "exceptional multiplicities of an orbit");
  s_exc->add_option("--theta", theta)->required();
  s_exc->add_option("--type", type_name, "elliptic | positive_hyperbolic | negative_hyperbolic (default: forced by theta)");

  // index
  std::string orbits_path, alpha_arg, beta_arg;
  long long c_tau = 0, q_tau = 0;
  auto* s_index = app.add_subcommand("index", "ECH index, J0 and I - J0 of a relative class");
  s_index->add_option("--orbits", orbits_path)->required();
  s_index->add_option("--alpha", alpha_arg)->required();
  s_index->add_option("--beta", beta_arg)->required();
  s_index->add_option("--c", c_tau, "c_tau(Z)");
  s_index->add_option("--Q", q_tau, "Q_tau(Z)");

  // curve
  std::string curve_path;
  std::optional<long long> j0_claim, ech_I, ind;
  bool eps_ok = true;
  auto* s_curve = app.add_subcommand("curve", "classify a U-curve and check partition and special conditions");
  s_curve->add_option("--orbits", orbits_path)->required();
  s_curve->add_option("--curve", curve_path, "JSON file with {nontrivial, trivial_cylinders}")->required();
  s_curve->add_option("--j0", j0_claim, "claimed J0 (default: topology formula)");
  s_curve->add_option("--I", ech_I, "ECH index for the special check (default 2)");
  s_curve->add_option("--ind", ind, "Fredholm index for the special check (default 2)");
  s_curve->add_option("--eps-ok", eps_ok, "low-energy condition holds");

  // ellipsoid
  std::string a_arg, b_arg;
  long long K = 10;
  bool degenerate = false;
  auto* s_spec = app.add_subcommand("ellipsoid-spectrum", "first K entries of the ECH spectrum of E(a,b)");
  s_spec->add_option("--a", a_arg)->required();
  s_spec->add_option("--b", b_arg)->required();
  s_spec->add_option("--k", K)->required()->check(CLI::PositiveNumber);
  s_spec->add_flag("--degenerate", degenerate, "allow a rational ratio (no gradings)");

  auto* s_asym = app.add_subcommand("asymptotics", "N_k^2/(2k) against the volume ab");
  s_asym->add_option("--a", a_arg)->required();
  s_asym->add_option("--b", b_arg)->required();
  s_asym->add_option("--K", K)->required()->check(CLI::Range(10LL, 10000000LL));

  // epsilon / search / nontorsion
  std::string bound_arg;
  bool strict = false;
  auto* s_eps = app.add_subcommand("epsilon", "low-energy threshold certificate");
  s_eps->add_option("--orbits", orbits_path)->required();
  s_eps->add_option("--bound", bound_arg, "raise the enumeration bound");
  s_eps->add_flag("--strict", strict, "reject equal actions of distinct orbit sets");

  std::string instance_path, replay_path, emit_path;
  int gen_n = 0, count = 1;
  bool no_partition_check = false, no_nonexceptional_check = false;
  auto* s_search = app.add_subcommand("special-search", "locate a special curve in a U-curve sequence");
  auto* src = s_search->add_option_group("source");
  src->add_option("--instance", instance_path, "instance JSON file");
  src->add_option("--generate", gen_n, "generate a case-2 instance with n simple orbits");
  src->add_option("--replay", replay_path, "re-run a saved result and compare its trace");
  src->require_option(1);
  s_search->add_option("--count", count, "with --generate: number of seeds starting at --seed")->check(CLI::Range(1, 100000));
  s_search->add_option("--emit-instance", emit_path, "with --generate: also write the instance JSON here");
  s_search->add_flag("--no-partition-check", no_partition_check);
  s_search->add_flag("--no-nonexceptional-check", no_nonexceptional_check);

  std::string input_path;
  auto* s_nt = app.add_subcommand("nontorsion", "kernel-rank dichotomy for two orbit classes");
  s_nt->add_option("--input", input_path, "JSON with homology, classes, gamma, actions")->required();

  // dynamics
  std::string map_kind = "rotation", turn = "1/3", mode = "dichotomy";
  long long Q = 10;
  int grid = 24;
  double tol = 1e-8;
  auto* s_dyn = app.add_subcommand("dynamics", "periodic-point census and zero-or-infinitely-many check");
  s_dyn->add_option("--map", map_kind, "rotation | twist | ellipsoid | ellipsoid-integrated | ellipsoid-rational | shear | contraction");
  s_dyn->add_option("--turn", turn, "rotation number as a fraction of a full turn");
  s_dyn->add_option("--a", a_arg);
  s_dyn->add_option("--b", b_arg);
  s_dyn->add_option("--Q", Q)->check(CLI::Range(1LL, 1000LL));
  s_dyn->add_option("--grid", grid)->check(CLI::Range(1, 2000));
  s_dyn->add_option("--tol", tol)->check(CLI::PositiveNumber);
  s_dyn->add_option("--mode", mode, "census | dichotomy | residual")->check(CLI::IsMember({"census", "dichotomy", "residual"}));

  std::string module;
  auto* s_self = app.add_subcommand("selftest", "run the invariant checks");
  s_self->add_option("--module", module);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, e2;
    int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code == 0 ? 0 : 1;
  }

  try {
    cfg.precision = precision_flag ? *precision_flag : precision_from_env();
    const int d = cfg.precision;
    auto sub = app.get_subcommands().front();
    cfg.subcommand = sub->get_name();
    auto fmt = [&](const char* dflt) { return cfg.format.empty() ? std::string(dflt) : cfg.format; };
    auto real = [&](const std::string& s) { return parse_real(s, d); };

    if (sub == s_part) {
      auto f = fmt("json");
      detail::require_format(f, {"json", "text"}, "partitions");
      RealScalar th = real(theta);
      auto pp = partitions(th, m);
      json j{{"theta", io::real_json(th)},  {"m", m},
             {"pplus", pp.plus.partition.parts}, {"pminus", pp.minus.partition.parts},
             {"pplus_path", io::path_json(pp.plus.path)}, {"pminus_path", io::path_json(pp.minus.path)},
             {"exceptional", is_exceptional(th, m)}};
      detail::emit(out, j, f);
    } else if (sub == s_cz) {
      auto f = fmt("json");
      detail::require_format(f, {"json", "csv", "text"}, "cz");
      RealScalar th = real(theta);
      std::vector<long long> cz;
      for (long long i = 1; i <= k; ++i) cz.push_back(cz_index(th, i));
      if (f == "csv") {
        out << "k,cz\n";
        for (long long i = 1; i <= k; ++i) out << i << "," << cz[static_cast<std::size_t>(i - 1)] << "\n";
      } else {
        detail::emit(out, {{"theta", io::real_json(th)}, {"type", to_string(type_of_theta(th))}, {"cz", cz}}, f);
      }
    } else if (sub == s_exc) {
      auto f = fmt("json");
      detail::require_format(f, {"json", "text"}, "exceptional");
      RealScalar th = real(theta);
      OrbitType t = type_name.empty() ? type_of_theta(th) : orbit_type_from_string(type_name);
      auto ex = exceptional_multiplicities(th, t);
      detail::emit(out, {{"theta", io::real_json(th)}, {"type", to_string(t)}, {"multiplicities", ex.multiplicities}, {"cutoff", ex.cutoff}}, f);
    } else if (sub == s_index) {
      auto f = fmt("json");
      detail::require_format(f, {"json", "text"}, "index");
      auto t = io::orbit_table_from_json(read_json_file(orbits_path), d);
      auto dd = relative_data(parse_orbit_set_arg(alpha_arg), parse_orbit_set_arg(beta_arg), c_tau, q_tau, t);
      auto r = i_minus_j0(dd);
      detail::emit(out, {{"alpha", io::orbit_set_json(dd.alpha)}, {"beta", io::orbit_set_json(dd.beta)}, {"c_tau", c_tau},
                         {"Q_tau", q_tau}, {"I", r.I}, {"J0", r.J0}, {"I_minus_J0", r.value},
                         {"action_gap", io::real_json(action(dd.alpha, t) - action(dd.beta, t))}},
                 f);
    } else if (sub == s_curve) {
      auto f = fmt("json");
      detail::require_format(f, {"json", "text"}, "curve");
      auto t = io::orbit_table_from_json(read_json_file(orbits_path), d);
      auto cj = read_json_file(curve_path);
      UCurveData u = cj.contains("nontrivial") ? io::ucurve_from_json(cj) : UCurveData{io::topology_from_json(cj), {}};
      for (const auto* side : {&u.nontrivial.positive_ends, &u.nontrivial.negative_ends})
        for (const auto& e : *side) t.at(e.orbit);
      long long formula = j0_from_topology(u);
      auto cls = classify_ucurve(u, j0_claim.value_or(formula));
      json j{{"j0_formula", formula},
             {"classification", io::classification_json(cls)},
             {"h_plus", h_plus(u.nontrivial, t)},
             {"chi", u.nontrivial.chi()},
             {"partition_conditions", io::partition_checks_json(check_partition_conditions(u.nontrivial, t))},
             {"special", io::verdict_json(is_special(u.nontrivial, ech_I.value_or(2), ind.value_or(2), eps_ok, t))},
             {"shared_orbits", u.shared_orbits()}};
      detail::emit(out, j, f);
    } else if (sub == s_spec) {
      auto f = fmt("csv");
      RealScalar a = real(a_arg), b = real(b_arg);
      EllipsoidModel model = degenerate ? EllipsoidModel::degenerate(a, b) : EllipsoidModel(a, b);
      auto s = spectrum(model, K, !degenerate);
      if (f == "csv") {
        write_spectrum_csv(out, s);
      } else {
        json rows = json::array();
        for (const auto& e : s) rows.push_back(io::spectrum_entry_json(e));
        detail::emit(out, {{"a", io::real_json(a)}, {"b", io::real_json(b)}, {"spectrum", rows}}, f);
      }
    } else if (sub == s_asym) {
      auto f = fmt("json");
      auto r = volume_asymptotics(EllipsoidModel(real(a_arg), real(b_arg)), K);
      if (f == "csv") {
        out << "k,N,ratio,deviation\n";
        for (const auto& p : r.checkpoints) out << p.k << "," << io::fixed(p.N) << "," << io::fixed(p.ratio) << "," << io::fixed(p.deviation) << "\n";
      } else {
        detail::emit(out, io::asymptotics_json(r), f);
      }
    } else if (sub == s_eps) {
      auto f = fmt("json");
      detail::require_format(f, {"json", "text"}, "epsilon");
      auto t = io::orbit_table_from_json(read_json_file(orbits_path), d);
      EpsilonOptions o;
      if (!bound_arg.empty()) o.action_bound = real(bound_arg);
      o.reject_coincidences = strict;
      detail::emit(out, io::epsilon_json(epsilon_threshold(t, o)), f);
    } else if (sub == s_search) {
      auto f = fmt("json");
      detail::require_format(f, {"json", "text"}, "special-search");
      SearchOptions so;
      so.check_partition_conditions = !no_partition_check;
      so.check_nonexceptional = !no_nonexceptional_check;
      auto solve = [&](const json& inst) {
        auto t = io::orbit_table_from_json(inst.at("orbits"), d);
        auto seq = io::sequence_from_json(inst.at("sequence"));
        auto eps = epsilon_threshold(t);
        if (inst.contains("epsilon")) eps.epsilon = io::real_from_json(inst.at("epsilon"), d);
        json r = io::search_result_json(find_special(seq, eps, t, so));
        r["epsilon"] = io::real_json(eps.epsilon);
        return r;
      };
      if (!instance_path.empty()) {
        auto inst = read_json_file(instance_path);
        json r = solve(inst);
        r["instance"] = inst;
        detail::emit(out, r, f);
      } else if (!replay_path.empty()) {
        auto saved = read_json_file(replay_path);
        if (!saved.contains("instance") || !saved.contains("trace")) throw ParseError("replay file needs \"instance\" and \"trace\"");
        json r = solve(saved.at("instance"));
        auto expected = io::trace_from_json(saved.at("trace"));
        auto got = io::trace_from_json(r.at("trace"));
        bool same = io::trace_json(expected) == io::trace_json(got) && saved.value("status", std::string()) == r.at("status");
        json rep{{"replayed", true}, {"match", same}, {"status", r.at("status")}, {"steps", got.size()}};
        if (!same) {
          out << io::error_json("trace_mismatch", "replayed trace differs from the saved one").dump(2) << "\n";
          return 2;
        }
        detail::emit(out, rep, f);
      } else {
        InstanceGenerator gen(gen_n);
        if (count == 1) {
          auto inst = gen.generate({gen_n, cfg.seed});
          json ij = io::instance_json(gen.orbits(), inst.sequence);
          if (!emit_path.empty()) {
            std::ofstream o(emit_path);
            if (!o) throw ParseError("cannot write '" + emit_path + "'");
            o << ij.dump(2) << "\n";
          }
          json r = io::search_result_json(find_special(inst.sequence, gen.epsilon(), gen.orbits(), so));
          r["epsilon"] = io::real_json(gen.epsilon().epsilon);
          r["seed"] = cfg.seed;
          r["attempts"] = inst.attempts;
          r["instance"] = ij;
          detail::emit(out, r, f);
        } else {
          std::vector<json> rows(static_cast<std::size_t>(count));
          std::mutex mu;
          std::string first_error;
          auto work = [&](int w) {
            for (int i = w; i < count; i += cfg.jobs) {
              try {
                auto seed = cfg.seed + static_cast<std::uint64_t>(i);
                auto inst = gen.generate({gen_n, seed});
                auto r = find_special(inst.sequence, gen.epsilon(), gen.orbits(), so);
                rows[static_cast<std::size_t>(i)] = {{"seed", seed}, {"status", to_string(r.status)},
                                                     {"index", r.index ? json(*r.index) : json(nullptr)},
                                                     {"special", r.verdict ? r.verdict->special : false},
                                                     {"trace_monotone", trace_is_monotone(r.trace)}};
              } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(mu);
                if (first_error.empty()) first_error = e.what();
              }
            }
          };
          std::vector<std::thread> pool;
          for (int w = 1; w < cfg.jobs; ++w) pool.emplace_back(work, w);
          work(0);
          for (auto& th : pool) th.join();
          if (!first_error.empty()) throw PreconditionError(first_error);
          long long found = 0, special = 0, monotone = 0;
          for (const auto& r : rows) {
            found += r.at("status") == "found";
            special += r.at("special").get<bool>();
            monotone += r.at("trace_monotone").get<bool>();
          }
          detail::emit(out, {{"n", gen_n}, {"count", count}, {"found", found}, {"special", special}, {"trace_monotone", monotone},
                             {"epsilon", io::real_json(gen.epsilon().epsilon)}, {"results", rows}},
                       f);
        }
      }
    } else if (sub == s_nt) {
      auto f = fmt("json");
      detail::require_format(f, {"json", "text"}, "nontorsion");
      auto in = read_json_file(input_path);
      auto h = io::homology_from_json(in.at("homology"));
      std::vector<IntVector> classes;
      for (const auto& c : in.at("classes")) classes.push_back(io::int_vector_from_json(c));
      std::vector<RealScalar> acts;
      for (const auto& a : in.at("actions")) acts.push_back(io::real_from_json(a, d));
      RealScalar bound = in.contains("bound") ? io::real_from_json(in.at("bound"), d) : RealScalar(20);
      auto terms = in.value("terms", std::size_t{10});
      json r = io::nontorsion_json(nontorsion_analysis(h, classes, io::int_vector_from_json(in.at("gamma")), acts, bound, terms));
      r["homology"] = io::homology_json(h);
      detail::emit(out, r, f);
    } else if (sub == s_dyn) {
      auto f = fmt("json");
      if ((map_kind.rfind("ellipsoid", 0) == 0) && (a_arg.empty() || b_arg.empty())) throw UsageError("ellipsoid maps need --a and --b");
      auto map = detail::make_map(map_kind, turn, a_arg, b_arg, d);
      if (mode == "residual") {
        detail::require_format(f, {"json", "text"}, "dynamics --mode residual");
        auto r = area_preservation_residual(map, domain_samples(map.domain, 100));
        detail::emit(out, {{"map", map.name}, {"max", io::fixed(r.max, 6)}, {"mean", io::fixed(r.mean, 6)}, {"samples", r.samples}}, f);
      } else if (mode == "census") {
        auto c = find_periodic_points(map, Q, grid, tol);
        if (f == "csv")
          write_census_csv(out, c);
        else
          detail::emit(out, {{"map", map.name}, {"census", io::census_counts_json(c)}}, f);
      } else {
        auto r = franks_dichotomy_check(map, Q, grid, tol);
        if (f == "csv")
          write_census_csv(out, r.census);
        else {
          json j = io::dichotomy_json(r);
          j["map"] = map.name;
          detail::emit(out, j, f);
        }
      }
    } else if (sub == s_self) {
      auto f = fmt("text");
      detail::require_format(f, {"json", "text"}, "selftest");
      auto res = selftest::run_all(module);
      if (res.empty()) throw UsageError("no checks for module '" + module + "'");
      bool all = true;
      json rows = json::array();
      for (const auto& r : res) {
        all = all && r.pass;
        rows.push_back({{"module", r.module}, {"check", r.name}, {"pass", r.pass}, {"detail", r.detail}});
      }
      if (f == "json") {
        out << json{{"pass", all}, {"checks", rows}}.dump(2) << "\n";
      } else {
        for (const auto& r : res) out << (r.pass ? "PASS " : "FAIL ") << r.module << ": " << r.name << (r.pass ? "" : " -- " + r.detail) << "\n";
        out << (all ? "selftest passed" : "selftest FAILED") << " (" << res.size() << " checks)\n";
      }
      return all ? 0 : 2;
    }
    return 0;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    out << io::error_json(e.code(), e.what()).dump(2) << "\n";
    return 2;
  } catch (const json::exception& e) {
    out << io::error_json("parse", std::string("malformed input: ") + e.what()).dump(2) << "\n";
    return 2;
  }
}

}  // namespace echkit::cli
