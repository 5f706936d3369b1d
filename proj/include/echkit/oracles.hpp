#pragma once

// Reference implementations used to cross-check the library. They take
// deliberately different routes (brute force, floating point at higher
// precision, rational elimination) and are meant for tests and `selftest`
// only; nothing under include/echkit depends on this file.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <utility>
#include <vector>

#include "echkit/homology.hpp"
#include "echkit/real_scalar.hpp"

namespace echkit::oracle {

using WideFloat = mp::number<mp::cpp_bin_float<220>, mp::et_off>;

inline WideFloat wide_value(const RealScalar& x) {
  auto q = [](const Rational& r) { return WideFloat(mp::numerator(r)) / WideFloat(mp::denominator(r)); };
  switch (x.kind()) {
    case RealScalar::Kind::rational:
      return q(x.rational_part());
    case RealScalar::Kind::quadratic:
      return q(x.rational_part()) + q(x.surd_coefficient()) * sqrt(WideFloat(x.radicand()));
    case RealScalar::Kind::certified:
      return WideFloat(x.midpoint());
  }
  return 0;
}

/// Floor of an exact value through a 220-digit decimal approximation and a
/// bisection on the integer part.
inline BigInt floor_by_bisection(const RealScalar& x) {
  WideFloat v = wide_value(x);
  BigInt lo = -1, hi = 1;
  while (WideFloat(lo) > v) lo *= 2;
  while (WideFloat(hi) <= v) hi *= 2;
  while (hi - lo > 1) {
    BigInt mid = (lo + hi) / 2;
    if (WideFloat(mid) <= v) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

inline BigInt ceil_by_bisection(const RealScalar& x) {
  BigInt f = floor_by_bisection(x);
  return WideFloat(f) == wide_value(x) ? f : f + 1;
}

/// Number of (m_1..m_n) >= 0 with sum m_i a_i < L, by nested loops.
inline std::size_t grid_count_below(const std::vector<RealScalar>& actions, int L) {
  std::function<std::size_t(std::size_t, RealScalar)> rec = [&](std::size_t i, RealScalar left) -> std::size_t {
    if (i == actions.size()) return 1;
    std::size_t n = 0;
    for (RealScalar rem = left; rem.sign() > 0; rem = rem - actions[i]) n += rec(i + 1, rem);
    return n;
  };
  return rec(0, RealScalar(L));
}


/// Exhaustive search over concave (sign = +1) or convex (sign = -1) lattice
/// chains from (0,0) to (m, floor(m theta)) / (m, ceil(m theta)) that stay on
/// the correct side of y = theta x. Returns the parts of the extremal chain
/// (largest area for concave, smallest for convex), with each chain edge
/// split at its lattice points.
inline std::vector<long long> brute_force_partition(const RealScalar& theta, long long m, int sign) {
  std::vector<BigInt> bound(static_cast<std::size_t>(m) + 1);
  for (long long x = 0; x <= m; ++x)
    bound[static_cast<std::size_t>(x)] = sign > 0 ? floor_by_bisection(theta * RealScalar(x))
                                                  : ceil_by_bisection(theta * RealScalar(x));
  const long long Y = static_cast<long long>(bound.back());
  // chain stays between the chord to (m, Y) and the line
  auto lo = [&](long long x) -> long long {
    if (sign > 0) {  // ceil(x Y / m)
      long long n = x * Y;
      return n >= 0 ? (n + m - 1) / m : -((-n) / m);
    }
    return static_cast<long long>(bound[static_cast<std::size_t>(x)]);
  };
  auto hi = [&](long long x) -> long long {
    if (sign > 0) return static_cast<long long>(bound[static_cast<std::size_t>(x)]);
    long long n = x * Y;  // floor(x Y / m)
    return n >= 0 ? n / m : -((-n + m - 1) / m);
  };

  std::vector<std::pair<long long, long long>> chain{{0, 0}}, best_chain;
  long long best_area2 = 0;
  bool have_best = false;
  std::function<void(long long)> dfs = [&](long long area2) {
    auto [x, y] = chain.back();
    if (x == m) {
      if (!have_best || (sign > 0 ? area2 > best_area2 : area2 < best_area2)) {
        have_best = true;
        best_area2 = area2;
        best_chain = chain;
      }
      return;
    }
    for (long long nx = x + 1; nx <= m; ++nx) {
      long long ylo = nx == m ? Y : lo(nx), yhi = nx == m ? Y : hi(nx);
      for (long long ny = ylo; ny <= yhi; ++ny) {
        if (chain.size() >= 2) {
          auto [px, py] = chain[chain.size() - 2];
          // strict slope monotonicity: compare (ny - y)/(nx - x) with (y - py)/(x - px)
          long long lhs = (ny - y) * (x - px), rhs = (y - py) * (nx - x);
          if (sign > 0 ? lhs >= rhs : lhs <= rhs) continue;
        }
        chain.push_back({nx, ny});
        dfs(area2 + (y + ny) * (nx - x));
        chain.pop_back();
      }
    }
  };
  dfs(0);
  std::vector<long long> parts;
  for (std::size_t i = 1; i < best_chain.size(); ++i) {
    long long dx = best_chain[i].first - best_chain[i - 1].first;
    long long dy = best_chain[i].second - best_chain[i - 1].second;
    long long g = std::gcd(dx, dy < 0 ? -dy : dy);
    for (long long k = 0; k < g; ++k) parts.push_back(dx / g);
  }
  return parts;
}

/// Rank over Q by Gaussian elimination on rationals.
inline std::size_t rational_rank(const IntMatrix& A) {
  std::vector<std::vector<Rational>> m(A.rows(), std::vector<Rational>(A.cols()));
  for (std::size_t i = 0; i < A.rows(); ++i)
    for (std::size_t j = 0; j < A.cols(); ++j) m[i][j] = Rational(A(i, j));
  std::size_t rank = 0;
  for (std::size_t col = 0; col < A.cols() && rank < A.rows(); ++col) {
    std::size_t piv = rank;
    while (piv < A.rows() && m[piv][col] == 0) ++piv;
    if (piv == A.rows()) continue;
    std::swap(m[piv], m[rank]);
    for (std::size_t i = 0; i < A.rows(); ++i) {
      if (i == rank || m[i][col] == 0) continue;
      Rational f = m[i][col] / m[rank][col];
      for (std::size_t j = col; j < A.cols(); ++j) m[i][j] -= f * m[rank][j];
    }
    ++rank;
  }
  return rank;
}

/// Kernel rank of Z^n -> Z^g / <R>: n - (rank[C; R] - rank R).
inline std::size_t kernel_rank_rational(const std::vector<IntVector>& classes, const IntMatrix& R) {
  std::size_t g = R.cols();
  IntMatrix M(classes.size() + R.rows(), g);
  for (std::size_t i = 0; i < classes.size(); ++i)
    for (std::size_t j = 0; j < g; ++j) M(i, j) = classes[i][j];
  for (std::size_t i = 0; i < R.rows(); ++i)
    for (std::size_t j = 0; j < g; ++j) M(classes.size() + i, j) = R(i, j);
  return classes.size() - (rational_rank(M) - rational_rank(R));
}

}  // namespace echkit::oracle
