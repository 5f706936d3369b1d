#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "echkit/ellipsoid.hpp"
#include "echkit/errors.hpp"
#include "echkit/real_scalar.hpp"

namespace echkit {

using Vec2 = std::array<double, 2>;

struct Domain {
  enum class Kind { disk, annulus, chart };
  Kind kind = Kind::disk;
  double inner = 0;  // annulus only
  double outer = 1;  // disk/annulus radius, half-width of the chart box

  bool contains(const Vec2& p) const {
    double r = std::hypot(p[0], p[1]);
    switch (kind) {
      case Kind::disk:
        return r < outer;
      case Kind::annulus:
        return r > inner && r < outer;
      case Kind::chart:
        return std::abs(p[0]) < outer && std::abs(p[1]) < outer;
    }
    return false;
  }
};

/// A planar map on a disk, annulus or coordinate chart. For disks the center
/// is a marked point (the binding of the section) and periodic points there
/// are reported separately.
struct SurfaceMap {
  enum class Kind { rotation, twist, ellipsoid_return, shear, contraction, custom };
  Kind kind = Kind::custom;
  std::string name;
  Domain domain;
  std::function<Vec2(const Vec2&)> f;
  bool declared_area_preserving = true;
  /// Rotation number as an exact fraction of a full turn, when known.
  std::optional<RealScalar> exact_turn;

  Vec2 operator()(const Vec2& p) const { return f(p); }

  Vec2 iterate(Vec2 p, long long q) const {
    for (long long i = 0; i < q; ++i) {
      p = f(p);
      if (!std::isfinite(p[0]) || !std::isfinite(p[1])) throw DegenerateError("non-finite map evaluation in " + name);
    }
    return p;
  }
};

inline Vec2 rotate(const Vec2& p, double angle) {
  double c = std::cos(angle), s = std::sin(angle);
  return {c * p[0] - s * p[1], s * p[0] + c * p[1]};
}

/// Rigid rotation of the annulus 1 < |z| < 2 by `turn` full turns.
inline SurfaceMap rotation_map(const RealScalar& turn) {
  SurfaceMap m;
  m.kind = SurfaceMap::Kind::rotation;
  m.name = "rotation(" + turn.symbolic() + ")";
  m.domain = {Domain::Kind::annulus, 1.0, 2.0};
  double angle = 2 * std::numbers::pi * turn.to_double();
  double c = std::cos(angle), s = std::sin(angle);
  m.f = [c, s](const Vec2& p) { return Vec2{c * p[0] - s * p[1], s * p[0] + c * p[1]}; };
  m.exact_turn = turn;
  return m;
}

/// Twist of the annulus 1 < |z| < 2: the circle of radius 1 + r turns by
/// profile(r) full turns; the default profile is r itself.
inline SurfaceMap twist_map(std::function<double(double)> profile = [](double r) { return r; }) {
  SurfaceMap m;
  m.kind = SurfaceMap::Kind::twist;
  m.name = "twist";
  m.domain = {Domain::Kind::annulus, 1.0, 2.0};
  m.f = [profile](const Vec2& p) { return rotate(p, 2 * std::numbers::pi * profile(std::hypot(p[0], p[1]) - 1.0)); };
  return m;
}

/// First-return map of the ellipsoid Reeb flow on its disk section.
inline SurfaceMap ellipsoid_return_map(const EllipsoidModel& model) {
  SurfaceMap m;
  m.kind = SurfaceMap::Kind::ellipsoid_return;
  m.name = "ellipsoid_return(" + model.a().symbolic() + ", " + model.b().symbolic() + ")";
  m.domain = {Domain::Kind::disk, 0.0, section_radius(model)};
  m.f = [model](const Vec2& p) {
    auto r = return_map(model, p[0], p[1]);
    return Vec2{r.x, r.y};
  };
  m.exact_turn = model.a() / model.b();
  return m;
}

/// The same return map computed by numerical integration of the flow.
inline SurfaceMap ellipsoid_return_map_integrated(const EllipsoidModel& model) {
  SurfaceMap m = ellipsoid_return_map(model);
  m.name += " [rk4]";
  m.f = [model](const Vec2& p) {
    auto r = return_map_integrated(model, p[0], p[1]);
    return Vec2{r.x, r.y};
  };
  return m;
}

/// (x, y) -> (x + y, y) on the chart |x|, |y| < 1.
inline SurfaceMap shear_map() {
  SurfaceMap m;
  m.kind = SurfaceMap::Kind::shear;
  m.name = "shear";
  m.domain = {Domain::Kind::chart, 0.0, 1.0};
  m.f = [](const Vec2& p) { return Vec2{p[0] + p[1], p[1]}; };
  return m;
}

/// (x, y) -> (x, y) / 2 on the unit disk; not area-preserving.
inline SurfaceMap contraction_map() {
  SurfaceMap m;
  m.kind = SurfaceMap::Kind::contraction;
  m.name = "contraction";
  m.domain = {Domain::Kind::disk, 0.0, 1.0};
  m.f = [](const Vec2& p) { return Vec2{p[0] / 2, p[1] / 2}; };
  m.declared_area_preserving = false;
  return m;
}

inline SurfaceMap custom_map(std::string name, Domain domain, std::function<Vec2(const Vec2&)> f, bool area_preserving) {
  SurfaceMap m;
  m.kind = SurfaceMap::Kind::custom;
  m.name = std::move(name);
  m.domain = domain;
  m.f = std::move(f);
  m.declared_area_preserving = area_preserving;
  return m;
}

namespace detail {

inline std::array<double, 4> jacobian(const SurfaceMap& map, const Vec2& p, double h, long long q = 1) {
  Vec2 xp = map.iterate({p[0] + h, p[1]}, q), xm = map.iterate({p[0] - h, p[1]}, q);
  Vec2 yp = map.iterate({p[0], p[1] + h}, q), ym = map.iterate({p[0], p[1] - h}, q);
  return {(xp[0] - xm[0]) / (2 * h), (yp[0] - ym[0]) / (2 * h), (xp[1] - xm[1]) / (2 * h), (yp[1] - ym[1]) / (2 * h)};
}

}  // namespace detail

struct ResidualStats {
  double max = 0;
  double mean = 0;
  std::size_t samples = 0;
};

/// max and mean |det Df - 1| by central differences with step 1e-5.
inline ResidualStats area_preservation_residual(const SurfaceMap& map, const std::vector<Vec2>& samples) {
  const double h = 1e-5;
  ResidualStats s;
  for (const auto& p : samples) {
    if (!map.domain.contains(p)) throw PreconditionError("sample point lies outside the domain of " + map.name);
    auto J = detail::jacobian(map, p, h);
    double r = std::abs(J[0] * J[3] - J[1] * J[2] - 1.0);
    s.max = std::max(s.max, r);
    s.mean += r;
    ++s.samples;
  }
  if (s.samples) s.mean /= static_cast<double>(s.samples);
  return s;
}

/// Deterministic interior samples: a golden-angle spiral over the domain.
inline std::vector<Vec2> domain_samples(const Domain& d, std::size_t n) {
  std::vector<Vec2> out;
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  double lo = d.kind == Domain::Kind::annulus ? d.inner : 0.0;
  double hi = d.kind == Domain::Kind::chart ? d.outer * 0.95 : d.outer;
  for (std::size_t i = 0; i < n; ++i) {
    double t = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    double r = std::sqrt(lo * lo + t * (hi * hi - lo * lo));
    r = lo + (r - lo) * 0.98 + (hi - lo) * 0.01;
    double phi = golden * static_cast<double>(i);
    out.push_back({r * std::cos(phi), r * std::sin(phi)});
    if (d.kind == Domain::Kind::chart) out.back() = {std::clamp(out.back()[0], -hi, hi), std::clamp(out.back()[1], -hi, hi)};
  }
  return out;
}

struct PeriodicPoint {
  Vec2 point;
  long long period = 0;
  double residual = 0;
};

struct Census {
  long long max_period = 0;
  int grid = 0;
  double tol = 0;
  std::vector<PeriodicPoint> points;          // interior periodic points, orbits expanded
  std::vector<PeriodicPoint> binding;         // periodic points at the marked center
  std::map<long long, std::size_t> counts;    // period -> number of points

  std::size_t size() const { return points.size(); }
};

namespace detail {

/// Hash grid for deduplication at a fixed radius.
class PointIndex {
 public:
  explicit PointIndex(double radius) : r_(radius) {}

  bool near(const Vec2& p) const {
    auto [i, j] = cell(p);
    for (long long di = -1; di <= 1; ++di)
      for (long long dj = -1; dj <= 1; ++dj) {
        auto it = cells_.find(key(i + di, j + dj));
        if (it == cells_.end()) continue;
        for (const auto& q : it->second)
          if (std::hypot(q[0] - p[0], q[1] - p[1]) < r_) return true;
      }
    return false;
  }

  void insert(const Vec2& p) {
    auto [i, j] = cell(p);
    cells_[key(i, j)].push_back(p);
  }

 private:
  std::pair<long long, long long> cell(const Vec2& p) const {
    return {static_cast<long long>(std::floor(p[0] / r_)), static_cast<long long>(std::floor(p[1] / r_))};
  }
  static long long key(long long i, long long j) { return i * 1000003LL + j; }

  double r_;
  std::unordered_map<long long, std::vector<Vec2>> cells_;
};

/// Levenberg-Marquardt on F(x) = f^q(x) - x, at most 50 iterations.
inline std::optional<Vec2> refine_periodic(const SurfaceMap& map, Vec2 x, long long q, double tol) {
  auto F = [&](const Vec2& p) {
    Vec2 y = map.iterate(p, q);
    return Vec2{y[0] - p[0], y[1] - p[1]};
  };
  Vec2 r = F(x);
  double norm = std::hypot(r[0], r[1]);
  double mu = 1e-3;
  for (int it = 0; it < 50 && norm >= tol * 1e-3; ++it) {
    auto J = jacobian(map, x, 1e-7, q);
    J[0] -= 1.0;
    J[3] -= 1.0;
    // (J^T J + mu I) d = -J^T r
    double a = J[0] * J[0] + J[2] * J[2] + mu, b = J[0] * J[1] + J[2] * J[3], d = J[1] * J[1] + J[3] * J[3] + mu;
    double g0 = -(J[0] * r[0] + J[2] * r[1]), g1 = -(J[1] * r[0] + J[3] * r[1]);
    double det = a * d - b * b;
    if (!(std::abs(det) > 0)) break;
    Vec2 step{(d * g0 - b * g1) / det, (a * g1 - b * g0) / det};
    Vec2 cand{x[0] + step[0], x[1] + step[1]};
    if (!map.domain.contains(cand)) {
      mu *= 4;
      if (mu > 1e8) break;
      continue;
    }
    Vec2 rc = F(cand);
    double nc = std::hypot(rc[0], rc[1]);
    if (nc < norm) {
      x = cand;
      r = rc;
      norm = nc;
      mu = std::max(mu / 3, 1e-12);
    } else {
      mu *= 4;
      if (mu > 1e8) break;
    }
  }
  if (norm < tol && map.domain.contains(x)) return x;
  return std::nullopt;
}

}  // namespace detail

/// Periodic points of period q <= Q seeded from an N x N grid of cell
/// centers, refined by Levenberg-Marquardt and deduplicated by orbit.
inline Census find_periodic_points(const SurfaceMap& map, long long Q, int grid, double tol) {
  if (Q < 1) throw PreconditionError("max period must be >= 1");
  if (!(tol > 0)) throw PreconditionError("tolerance must be positive");
  if (grid < 1) throw PreconditionError("grid resolution must be >= 1");
  Census c;
  c.max_period = Q;
  c.grid = grid;
  c.tol = tol;
  const double R = map.domain.outer;
  const double dedup = std::max(10 * tol, 1e-9);
  detail::PointIndex index(dedup);
  bool marked_center = map.domain.kind == Domain::Kind::disk;

  for (long long q = 1; q <= Q; ++q) {
    for (int i = 0; i < grid; ++i)
      for (int j = 0; j < grid; ++j) {
        Vec2 seed{-R + (i + 0.5) * 2 * R / grid, -R + (j + 0.5) * 2 * R / grid};
        if (!map.domain.contains(seed)) continue;
        auto x = detail::refine_periodic(map, seed, q, tol);
        if (!x || index.near(*x)) continue;
        // minimal period: skip if a proper divisor already closes the orbit
        bool smaller = false;
        for (long long d = 1; d < q && !smaller; ++d) {
          if (q % d) continue;
          Vec2 y = map.iterate(*x, d);
          smaller = std::hypot(y[0] - (*x)[0], y[1] - (*x)[1]) < tol;
        }
        if (smaller) continue;
        Vec2 y = map.iterate(*x, q);
        double res = std::hypot(y[0] - (*x)[0], y[1] - (*x)[1]);
        if (marked_center && std::hypot((*x)[0], (*x)[1]) < dedup) {
          c.binding.push_back({*x, q, res});
          index.insert(*x);
          continue;
        }
        Vec2 p = *x;
        for (long long k = 0; k < q; ++k) {
          if (!index.near(p)) {
            index.insert(p);
            c.points.push_back({p, q, res});
            ++c.counts[q];
          }
          p = map(p);
        }
      }
  }
  return c;
}

inline void write_census_csv(std::ostream& os, const Census& c) {
  os << "period,x,y,residual\n";
  char buf[128];
  for (const auto& p : c.points) {
    std::snprintf(buf, sizeof buf, "%lld,%.17g,%.17g,%.3e\n", p.period, p.point[0], p.point[1], p.residual);
    os << buf;
  }
}

struct DichotomyReport {
  enum class Verdict { none_found, infinite_evidence, inconclusive };
  Verdict verdict = Verdict::none_found;
  ResidualStats area;
  Census census;
  Census refined;                   // same search on a grid three times as fine (seeds nest)
  std::map<long long, std::pair<std::size_t, std::size_t>> growth;  // period -> (count, refined count)
  bool growth_strict = false;       // every period found gains points under refinement
  std::size_t binding_points = 0;
};

/// Zero-or-infinitely-many check. Refuses maps that fail the area test. A
/// nonempty census counts as evidence of infinitely many periodic points when
/// every period found gains points on the refined grid; otherwise the result
/// is inconclusive.
inline DichotomyReport franks_dichotomy_check(const SurfaceMap& map, long long Q, int grid = 24, double tol = 1e-8) {
  DichotomyReport r;
  r.area = area_preservation_residual(map, domain_samples(map.domain, 100));
  if (!map.declared_area_preserving || r.area.max > 1e-6)
    throw PreconditionError("hypothesis violated: " + map.name + " is not area-preserving (max |det Df - 1| = " +
                            std::to_string(r.area.max) + ")");
  r.census = find_periodic_points(map, Q, grid, tol);
  r.binding_points = r.census.binding.size();
  if (r.census.points.empty()) return r;
  r.refined = find_periodic_points(map, Q, 3 * grid, tol);
  r.growth_strict = true;
  for (const auto& [q, n] : r.census.counts) {
    std::size_t m = r.refined.counts.count(q) ? r.refined.counts.at(q) : 0;
    r.growth[q] = {n, m};
    if (m <= n) r.growth_strict = false;
  }
  r.verdict = r.growth_strict ? DichotomyReport::Verdict::infinite_evidence : DichotomyReport::Verdict::inconclusive;
  return r;
}

}  // namespace echkit
