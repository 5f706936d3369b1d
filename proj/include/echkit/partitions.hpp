#pragma once

#include <algorithm>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "echkit/core.hpp"
#include "echkit/errors.hpp"
#include "echkit/real_scalar.hpp"

namespace echkit {

struct LatticePoint {
  long long x = 0;
  long long y = 0;
  friend bool operator==(const LatticePoint&, const LatticePoint&) = default;
};

/// Polygonal path through lattice points, x strictly increasing from (0,0).
struct LatticePath {
  std::vector<LatticePoint> vertices;

  const LatticePoint& end() const { return vertices.back(); }
};

/// Parts in path order; `multiset()` gives the unordered view.
struct Partition {
  std::vector<long long> parts;

  std::size_t size() const { return parts.size(); }
  long long sum() const { return std::accumulate(parts.begin(), parts.end(), 0LL); }

  std::vector<long long> multiset() const {
    auto out = parts;
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
  }

  bool contains(long long v) const { return std::find(parts.begin(), parts.end(), v) != parts.end(); }

  std::string to_string() const {
    std::string out = "(";
    for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? "," : "") + std::to_string(parts[i]);
    return out + ")";
  }
};

struct PartitionResult {
  Partition partition;
  LatticePath path;
};

namespace detail {

inline long long cross(const LatticePoint& o, const LatticePoint& a, const LatticePoint& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

/// Upper hull of (k, floor(k theta)), then every hull edge split at its
/// interior lattice points.
inline PartitionResult upper_hull_partition(const std::vector<long long>& ys) {
  std::vector<LatticePoint> hull;
  for (long long k = 0; k < static_cast<long long>(ys.size()); ++k) {
    LatticePoint p{k, ys[static_cast<std::size_t>(k)]};
    while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), p) >= 0) hull.pop_back();
    hull.push_back(p);
  }
  PartitionResult out;
  out.path.vertices.push_back(hull.front());
  for (std::size_t i = 1; i < hull.size(); ++i) {
    long long dx = hull[i].x - hull[i - 1].x;
    long long dy = hull[i].y - hull[i - 1].y;
    long long g = std::gcd(dx, dy < 0 ? -dy : dy);
    for (long long s = 1; s <= g; ++s) {
      out.path.vertices.push_back({hull[i - 1].x + s * dx / g, hull[i - 1].y + s * dy / g});
      out.partition.parts.push_back(dx / g);
    }
  }
  return out;
}

inline std::vector<long long> floor_multiples(const RealScalar& theta, long long m) {
  std::vector<long long> ys(static_cast<std::size_t>(m) + 1);
  for (long long k = 1; k <= m; ++k) ys[static_cast<std::size_t>(k)] = (theta * RealScalar(k)).floor_int();
  return ys;
}

}  // namespace detail

/// Maximal concave lattice path from (0,0) to (m, floor(m theta)) not above
/// y = theta x, with its horizontal segment lengths.
inline PartitionResult positive_partition(const RealScalar& theta, long long m) {
  if (m < 1) throw PreconditionError("partition needs m >= 1");
  return detail::upper_hull_partition(detail::floor_multiples(theta, m));
}

/// Minimal convex lattice path from (0,0) to (m, ceil(m theta)) not below
/// y = theta x; the mirror image of the positive path for -theta.
inline PartitionResult negative_partition(const RealScalar& theta, long long m) {
  PartitionResult r = positive_partition(-theta, m);
  for (auto& v : r.path.vertices) v.y = -v.y;
  return r;
}

struct PartitionPair {
  PartitionResult plus;
  PartitionResult minus;
};

inline PartitionPair partitions(const RealScalar& theta, long long m) {
  return {positive_partition(theta, m), negative_partition(theta, m)};
}

inline bool is_exceptional(const RealScalar& theta, long long m) {
  auto p = partitions(theta, m);
  return p.plus.partition.size() + p.minus.partition.size() <= 3;
}

struct ExceptionalResult {
  std::vector<long long> multiplicities;
  long long cutoff = 0;  // every exceptional m is <= cutoff
};

/// Smallest m0 such that every exceptional m satisfies m <= m0.
inline long long exceptional_cutoff(const RealScalar& theta, OrbitType type) {
  switch (type) {
    case OrbitType::positive_hyperbolic:
      return 1;
    case OrbitType::negative_hyperbolic:
      return 2;
    case OrbitType::elliptic: {
      RealScalar f = theta.frac();
      if (f.try_sign().value_or(0) <= 0 || (RealScalar(1) - f).try_sign().value_or(0) <= 0)
        throw AmbiguousError("fractional part of " + theta.to_string(25) + " is not separated from 0 and 1");
      RealScalar bound = max(RealScalar(2) / f, RealScalar(2) / (RealScalar(1) - f));
      return bound.ceil_int();
    }
  }
  return 0;
}

inline ExceptionalResult exceptional_multiplicities(const RealScalar& theta, OrbitType type) {
  OrbitType forced = type_of_theta(theta);
  if (forced != type)
    throw PreconditionError("rotation number " + theta.symbolic() + " is inconsistent with type " + to_string(type));
  ExceptionalResult out;
  out.cutoff = exceptional_cutoff(theta, type);
  for (long long m = 1; m <= out.cutoff; ++m)
    if (is_exceptional(theta, m)) out.multiplicities.push_back(m);
  return out;
}

struct ClaimCertificate {
  bool one_in_minus = false;        // 1 is a part of the negative partition
  long long smallest_part = 0;      // a
  LatticePoint triangle[3];
  Rational determinant_area;        // a/2 by the shoelace formula
  long long boundary_points = 0;
  long long interior_points = 0;
  Rational pick_area;               // I + B/2 - 1
  bool holds = false;               // both routes give area 1/2 and a = 1
};

/// Given p+(m) = (m), checks 1 in p-(m) directly and through the lattice
/// triangle with vertices (m, floor), (m, ceil), (m - a, ceil((m - a) theta)).
inline ClaimCertificate check_claim(const RealScalar& theta, long long m) {
  auto pp = partitions(theta, m);
  if (pp.plus.partition.parts != std::vector<long long>{m})
    throw PreconditionError("claim needs p+(" + std::to_string(m) + ") = (" + std::to_string(m) + "), got " +
                            pp.plus.partition.to_string());
  ClaimCertificate c;
  const auto& parts = pp.minus.partition.parts;
  c.one_in_minus = pp.minus.partition.contains(1);
  c.smallest_part = *std::min_element(parts.begin(), parts.end());
  long long a = c.smallest_part;
  c.triangle[0] = {m, (theta * RealScalar(m)).floor_int()};
  c.triangle[1] = {m, (theta * RealScalar(m)).ceil_int()};
  c.triangle[2] = {m - a, (theta * RealScalar(m - a)).ceil_int()};
  long long twice = detail::cross(c.triangle[0], c.triangle[1], c.triangle[2]);
  c.determinant_area = Rational(twice < 0 ? -twice : twice, 2);

  const auto& t = c.triangle;
  long long min_y = std::min({t[0].y, t[1].y, t[2].y}), max_y = std::max({t[0].y, t[1].y, t[2].y});
  for (long long x = m - a; x <= m; ++x)
    for (long long y = min_y; y <= max_y; ++y) {
      LatticePoint p{x, y};
      long long d0 = detail::cross(t[0], t[1], p), d1 = detail::cross(t[1], t[2], p), d2 = detail::cross(t[2], t[0], p);
      bool neg = d0 < 0 || d1 < 0 || d2 < 0, pos = d0 > 0 || d1 > 0 || d2 > 0;
      if (neg && pos) continue;
      if (d0 == 0 || d1 == 0 || d2 == 0) {
        ++c.boundary_points;
      } else {
        ++c.interior_points;
      }
    }
  c.pick_area = Rational(c.interior_points) + Rational(c.boundary_points, 2) - 1;
  c.holds = c.one_in_minus && a == 1 && c.pick_area == Rational(1, 2) && c.determinant_area == Rational(1, 2);
  return c;
}

}  // namespace echkit
