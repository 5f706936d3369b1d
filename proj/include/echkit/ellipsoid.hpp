#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "echkit/core.hpp"
#include "echkit/errors.hpp"
#include "echkit/index.hpp"
#include "echkit/real_scalar.hpp"

namespace echkit {

/// Boundary of E(a,b) = { pi|z1|^2/a + pi|z2|^2/b <= 1 } with its standard
/// contact form. Two simple orbits: gamma1 (z2 = 0, action a, theta = a/b)
/// and gamma2 (z1 = 0, action b, theta = b/a).
class EllipsoidModel {
 public:
  /// Nondegenerate model: a/b must be certified irrational.
  EllipsoidModel(RealScalar a, RealScalar b) : EllipsoidModel(std::move(a), std::move(b), false) {}

  /// Model with a rational ratio, for degenerate experiments (ties in the
  /// spectrum, periodic return maps). No orbit table is available.
  static EllipsoidModel degenerate(RealScalar a, RealScalar b) { return EllipsoidModel(std::move(a), std::move(b), true); }

  const RealScalar& a() const { return a_; }
  const RealScalar& b() const { return b_; }
  double a_double() const { return ad_; }
  double b_double() const { return bd_; }
  bool nondegenerate() const { return !degenerate_; }
  RealScalar theta1() const { return a_ / b_; }
  RealScalar theta2() const { return b_ / a_; }
  RealScalar volume() const { return a_ * b_; }

  const OrbitTable& orbits() const {
    if (degenerate_) throw DegenerateError("rational ratio: the ellipsoid is degenerate and has no orbit table");
    return orbits_;
  }

  RealScalar action(long long m, long long n) const { return a_ * RealScalar(m) + b_ * RealScalar(n); }

  /// Absolute-index data: c_tau = m + n, Q_tau = 2mn.
  WeightedChernModel chern_model() const {
    return WeightedChernModel{orbits(), {{"gamma1", Rational(1)}, {"gamma2", Rational(1)}}, {{0, 1}, {1, 0}}};
  }

 private:
  EllipsoidModel(RealScalar a, RealScalar b, bool degenerate) : a_(std::move(a)), b_(std::move(b)), degenerate_(degenerate) {
    if (a_.try_sign().value_or(0) <= 0 || b_.try_sign().value_or(0) <= 0)
      throw PreconditionError("ellipsoid parameters must be positive");
    ad_ = a_.to_double();
    bd_ = b_.to_double();
    RealScalar ratio = a_ / b_;
    if (!degenerate_) {
      if (!ratio.is_known_irrational())
        throw DegenerateError("a/b = " + ratio.symbolic() + " is not certified irrational; nondegenerate mode refused");
      orbits_ = OrbitTable({make_orbit("gamma1", a_, ratio, OrbitType::elliptic),
                            make_orbit("gamma2", b_, b_ / a_, OrbitType::elliptic)});
    } else if (ratio.is_known_irrational()) {
      throw PreconditionError("degenerate mode needs a rational ratio a/b");
    }
  }

  RealScalar a_, b_;
  double ad_ = 0, bd_ = 0;
  bool degenerate_ = false;
  OrbitTable orbits_;
};

/// I(gamma1^m gamma2^n) = (m + n) + 2mn + sum_{k<=m} CZ(gamma1^k) + sum_{l<=n} CZ(gamma2^l).
inline long long grading(const EllipsoidModel& model, long long m, long long n) {
  if (m < 0 || n < 0) throw PreconditionError("multiplicities must be >= 0");
  return (m + n) + 2 * m * n + cz_sum(model.theta1(), m) + cz_sum(model.theta2(), n);
}

struct SpectrumEntry {
  long long k = 0;
  long long m = 0;
  long long n = 0;
  RealScalar action;
  double action_double = 0;
  std::optional<long long> grading;
};

namespace detail {

struct Generator {
  long long m, n;
  double value;
};

/// Generators sorted by action; close doubles are resolved exactly.
inline std::vector<Generator> sorted_generators(const EllipsoidModel& model, std::size_t K) {
  const double a = model.a_double(), b = model.b_double();
  // count of lattice points under T is about T^2 / (2ab) + T (1/a + 1/b) / 2
  double T = std::sqrt(2.0 * a * b * static_cast<double>(K)) + a + b;
  std::vector<Generator> g;
  for (;;) {
    g.clear();
    for (long long m = 0; m * a <= T; ++m)
      for (long long n = 0; m * a + n * b <= T; ++n) g.push_back({m, n, m * a + n * b});
    if (g.size() >= K + 1) break;
    T *= 1.25;
  }
  auto less = [&](const Generator& x, const Generator& y) {
    double scale = std::max(1.0, std::abs(x.value));
    if (std::abs(x.value - y.value) > 1e-9 * scale) return x.value < y.value;
    auto c = try_compare(model.action(x.m, x.n), model.action(y.m, y.n));
    if (c && *c != 0) return *c < 0;
    return std::make_pair(x.m, x.n) < std::make_pair(y.m, y.n);
  };
  // the K smallest are all below T; the last included point may sit at T
  std::sort(g.begin(), g.end(), less);
  g.resize(K);
  return g;
}

}  // namespace detail

/// The K smallest actions m a + n b with their generators; entry 0 is the
/// empty set. Gradings are filled in when `with_gradings` is set.
inline std::vector<SpectrumEntry> spectrum(const EllipsoidModel& model, long long K, bool with_gradings = true) {
  if (K < 1) throw PreconditionError("K must be >= 1");
  auto gens = detail::sorted_generators(model, static_cast<std::size_t>(K));
  std::vector<SpectrumEntry> out;
  out.reserve(gens.size());
  for (std::size_t k = 0; k < gens.size(); ++k) {
    SpectrumEntry e;
    e.k = static_cast<long long>(k);
    e.m = gens[k].m;
    e.n = gens[k].n;
    e.action_double = gens[k].value;
    e.action = model.action(e.m, e.n);
    if (with_gradings) e.grading = grading(model, e.m, e.n);
    out.push_back(std::move(e));
  }
  return out;
}

/// k, m, n, action (30 significant digits), grading.
inline void write_spectrum_csv(std::ostream& os, const std::vector<SpectrumEntry>& s) {
  os << "k,m,n,action,grading\n";
  for (const auto& e : s)
    os << e.k << ',' << e.m << ',' << e.n << ',' << e.action.to_string(30) << ',' << (e.grading ? std::to_string(*e.grading) : "")
       << '\n';
}

struct AsymptoticsPoint {
  long long k = 0;
  double N = 0;       // action of the k-th spectrum entry
  double ratio = 0;   // N^2 / (2k)
  double deviation = 0;  // |ratio - vol| / vol
};

struct AsymptoticsReport {
  double volume = 0;
  std::vector<AsymptoticsPoint> checkpoints;
  double final_deviation = 0;
  double decreasing_fraction = 0;  // share of consecutive checkpoints where |deviation| drops
  bool monotone = false;
  std::optional<double> exponent;  // least-squares slope of log N_k against log k
  bool convergence_claimed = false;
};

/// N_k^2 / (2k) at k = 10, 100, ..., and K, compared with vol = ab.
inline AsymptoticsReport volume_asymptotics(const EllipsoidModel& model, long long K) {
  if (K < 10) throw PreconditionError("K must be >= 10");
  auto gens = detail::sorted_generators(model, static_cast<std::size_t>(K) + 1);
  AsymptoticsReport r;
  r.volume = model.volume().to_double();
  std::vector<long long> ks;
  for (long long k = 10; k < K; k *= 10) ks.push_back(k);
  ks.push_back(K);
  for (long long k : ks) {
    AsymptoticsPoint p;
    p.k = k;
    p.N = gens[static_cast<std::size_t>(k)].value;
    p.ratio = p.N * p.N / (2.0 * static_cast<double>(k));
    p.deviation = std::abs(p.ratio - r.volume) / r.volume;
    r.checkpoints.push_back(p);
  }
  r.final_deviation = r.checkpoints.back().deviation;
  int drops = 0;
  for (std::size_t i = 1; i < r.checkpoints.size(); ++i)
    if (r.checkpoints[i].deviation < r.checkpoints[i - 1].deviation) ++drops;
  r.decreasing_fraction = r.checkpoints.size() > 1 ? static_cast<double>(drops) / static_cast<double>(r.checkpoints.size() - 1) : 0;
  r.monotone = drops + 1 == static_cast<int>(r.checkpoints.size());
  if (K >= 1000) {
    // fit over k in [K/100, K] on a logarithmic grid
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    long long lo = std::max<long long>(1, K / 100);
    for (int i = 0; i <= 200; ++i) {
      auto k = static_cast<long long>(std::llround(std::exp(std::log(double(lo)) + (std::log(double(K)) - std::log(double(lo))) * i / 200.0)));
      double x = std::log(double(k)), y = std::log(gens[static_cast<std::size_t>(k)].value);
      sx += x, sy += y, sxx += x * x, sxy += x * y, ++n;
    }
    r.exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    r.convergence_claimed = true;
  }
  return r;
}

struct USequenceReport {
  long long K = 0;
  bool strictly_increasing = false;
  bool gradings_step_two = false;
  bool pass = false;
};

/// Actions strictly increase along the spectrum and U lowers the grading by
/// exactly 2 from each entry to the previous one.
inline USequenceReport u_sequence_check(const EllipsoidModel& model, long long K) {
  auto s = spectrum(model, K);
  USequenceReport r;
  r.K = K;
  r.strictly_increasing = true;
  r.gradings_step_two = true;
  for (std::size_t k = 1; k < s.size(); ++k) {
    auto c = try_compare(s[k - 1].action, s[k].action);
    if (c && *c == 0)
      throw DegenerateError("tie in the action spectrum at k=" + std::to_string(k) + ": " + s[k].action.to_string(20) +
                            " (rational ratio)");
    if (c && *c > 0) r.strictly_increasing = false;
    if (*s[k].grading - *s[k - 1].grading != 2) r.gradings_step_two = false;
  }
  if (!s.empty() && *s[0].grading != 0) r.gradings_step_two = false;
  r.pass = r.strictly_increasing && r.gradings_step_two;
  return r;
}

/// Point of C^2 as (x1, y1, x2, y2).
using Point4 = std::array<double, 4>;

inline double boundary_defect(const EllipsoidModel& model, const Point4& p) {
  const double pi = std::numbers::pi;
  return pi * (p[0] * p[0] + p[1] * p[1]) / model.a_double() + pi * (p[2] * p[2] + p[3] * p[3]) / model.b_double() - 1.0;
}

/// Time-t Reeb flow: z1 -> z1 e^{2 pi i t / a}, z2 -> z2 e^{2 pi i t / b}.
inline Point4 reeb_flow(const EllipsoidModel& model, const Point4& p, double t) {
  if (std::abs(boundary_defect(model, p)) > 1e-10) throw PreconditionError("point is not on the ellipsoid boundary");
  const double pi = std::numbers::pi;
  double u = 2 * pi * t / model.a_double(), v = 2 * pi * t / model.b_double();
  return {p[0] * std::cos(u) - p[1] * std::sin(u), p[0] * std::sin(u) + p[1] * std::cos(u),
          p[2] * std::cos(v) - p[3] * std::sin(v), p[2] * std::sin(v) + p[3] * std::cos(v)};
}

/// Reeb vector field at p.
inline Point4 reeb_field(const EllipsoidModel& model, const Point4& p) {
  const double pi = std::numbers::pi;
  double u = 2 * pi / model.a_double(), v = 2 * pi / model.b_double();
  return {-u * p[1], u * p[0], -v * p[3], v * p[2]};
}

/// Section: the disk {z1 real and positive} bounded by gamma2, coordinatized
/// by z2 = (x, y) with pi|z2|^2 / b < 1.
inline Point4 section_point(const EllipsoidModel& model, double x, double y) {
  const double pi = std::numbers::pi;
  double s = 1.0 - pi * (x * x + y * y) / model.b_double();
  if (s <= 0) throw PreconditionError("point lies outside the section disk");
  return {std::sqrt(model.a_double() * s / pi), 0.0, x, y};
}

inline double section_radius(const EllipsoidModel& model) { return std::sqrt(model.b_double() / std::numbers::pi); }

struct ReturnResult {
  double x = 0;
  double y = 0;
  double time = 0;
};

/// First return to the section: after time a the z1 factor is back on the
/// positive real axis and z2 has turned by 2 pi a / b.
inline ReturnResult return_map(const EllipsoidModel& model, double x, double y) {
  Point4 p = section_point(model, x, y);
  double t = model.a_double();
  Point4 q = reeb_flow(model, p, t);
  return {q[2], q[3], t};
}

/// The same return map by RK4 integration of the Reeb field, stopping when
/// arg z1 crosses 0 again (refined by bisection on the last step).
inline ReturnResult return_map_integrated(const EllipsoidModel& model, double x, double y, int steps_per_period = 4000) {
  Point4 p = section_point(model, x, y);
  double h = model.a_double() / steps_per_period;
  auto rk4 = [&](const Point4& s, double dt) {
    auto add = [](const Point4& u, const Point4& v, double c) {
      return Point4{u[0] + c * v[0], u[1] + c * v[1], u[2] + c * v[2], u[3] + c * v[3]};
    };
    Point4 k1 = reeb_field(model, s), k2 = reeb_field(model, add(s, k1, dt / 2)), k3 = reeb_field(model, add(s, k2, dt / 2)),
           k4 = reeb_field(model, add(s, k3, dt));
    Point4 out;
    for (int i = 0; i < 4; ++i) out[static_cast<std::size_t>(i)] = s[i] + dt / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    return out;
  };
  Point4 s = p;
  double t = 0;
  for (int i = 0; i < 4 * steps_per_period; ++i) {
    Point4 nxt = rk4(s, h);
    if (i > steps_per_period / 2 && s[1] < 0 && nxt[1] >= 0 && nxt[0] > 0) {
      double lo = 0, hi = h;
      for (int it = 0; it < 60; ++it) {
        double mid = (lo + hi) / 2;
        (rk4(s, mid)[1] < 0 ? lo : hi) = mid;
      }
      Point4 q = rk4(s, hi);
      return {q[2], q[3], t + hi};
    }
    s = nxt;
    t += h;
  }
  throw DegenerateError("integration failed to return to the section");
}

}  // namespace echkit
