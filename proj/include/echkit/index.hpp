#pragma once

#include <cstdlib>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "echkit/core.hpp"
#include "echkit/errors.hpp"
#include "echkit/real_scalar.hpp"

namespace echkit {

/// floor(k theta) + ceil(k theta).
inline long long cz_index(const RealScalar& theta, long long k) {
  if (k < 1) throw PreconditionError("cover multiplicity must be >= 1");
  RealScalar kt = theta * RealScalar(k);
  BigInt f = kt.floor();
  BigInt c = kt.is_integer() ? f : f + 1;
  return to_int64(f + c);
}

/// sum_{k=1}^{m} CZ(gamma^k); m = 0 gives 0.
inline long long cz_sum(const RealScalar& theta, long long m) {
  long long s = 0;
  for (long long k = 1; k <= m; ++k) s += cz_index(theta, k);
  return s;
}

/// Data attached to a relative class Z in H_2(Y, alpha, beta).
struct RelativeClassData {
  OrbitSet alpha;
  OrbitSet beta;
  long long c_tau = 0;
  long long Q_tau = 0;
  std::map<std::string, RealScalar> theta_lifts;

  const RealScalar& theta(const std::string& id) const {
    auto it = theta_lifts.find(id);
    if (it == theta_lifts.end()) throw UnknownOrbitError(id);
    return it->second;
  }
};

inline RelativeClassData relative_data(OrbitSet alpha, OrbitSet beta, long long c, long long Q, const OrbitTable& orbits) {
  RelativeClassData d{std::move(alpha), std::move(beta), c, Q, {}};
  for (const auto* s : {&d.alpha, &d.beta})
    for (const auto& [id, m] : s->entries()) d.theta_lifts.emplace(id, orbits.at(id).theta);
  return d;
}

inline long long ech_index(const RelativeClassData& d) {
  long long v = d.c_tau + d.Q_tau;
  for (const auto& [id, m] : d.alpha.entries()) v += cz_sum(d.theta(id), m);
  for (const auto& [id, n] : d.beta.entries()) v -= cz_sum(d.theta(id), n);
  return v;
}

inline long long j0_index(const RelativeClassData& d) {
  long long v = -d.c_tau + d.Q_tau;
  for (const auto& [id, m] : d.alpha.entries()) v += cz_sum(d.theta(id), m - 1);
  for (const auto& [id, n] : d.beta.entries()) v -= cz_sum(d.theta(id), n - 1);
  return v;
}

struct IMinusJ0 {
  long long value = 0;  // 2c + sum CZ(alpha_i^{m_i}) - sum CZ(beta_j^{n_j})
  long long I = 0;
  long long J0 = 0;
};

/// Closed form of I - J0, checked against the two index sums.
inline IMinusJ0 i_minus_j0(const RelativeClassData& d) {
  IMinusJ0 r;
  r.value = 2 * d.c_tau;
  for (const auto& [id, m] : d.alpha.entries()) r.value += cz_index(d.theta(id), m);
  for (const auto& [id, n] : d.beta.entries()) r.value -= cz_index(d.theta(id), n);
  r.I = ech_index(d);
  r.J0 = j0_index(d);
  if (r.I - r.J0 != r.value)
    throw InconsistencyError("I - J0 = " + std::to_string(r.I - r.J0) + " but closed form gives " + std::to_string(r.value));
  return r;
}

/// ind = -chi + 2 c_tau + sum CZ(positive ends) - sum CZ(negative ends).
inline long long fredholm_index(long long chi, long long c_tau, const std::vector<long long>& cz_plus,
                                const std::vector<long long>& cz_minus) {
  long long v = -chi + 2 * c_tau;
  for (long long z : cz_plus) v += z;
  for (long long z : cz_minus) v -= z;
  return v;
}

/// Absolute-grading data: c_tau(alpha) = sum w_i m_i and
/// Q_tau(alpha) = sum_{i,j} q_ij m_i m_j, indices in orbit-id order.
struct WeightedChernModel {
  OrbitTable orbits;
  std::map<std::string, Rational> weights;
  std::vector<std::vector<long long>> q;

  std::vector<long long> multiplicities(const OrbitSet& alpha) const {
    std::vector<long long> m;
    for (const auto& id : orbits.ids()) m.push_back(alpha.multiplicity(id));
    for (const auto& [id, k] : alpha.entries()) (void)orbits.at(id);
    return m;
  }

  long long c_tau(const OrbitSet& alpha) const {
    Rational c = 0;
    for (const auto& [id, m] : alpha.entries()) {
      auto it = weights.find(id);
      if (it == weights.end()) throw UnknownOrbitError(id);
      c += it->second * m;
    }
    if (mp::denominator(c) != 1)
      throw PreconditionError("c_tau of " + alpha.to_string() + " is not an integer (" + mp::numerator(c).str() + "/" +
                              mp::denominator(c).str() + ")");
    return static_cast<long long>(mp::numerator(c));
  }

  long long Q_tau(const OrbitSet& alpha) const {
    auto m = multiplicities(alpha);
    if (q.size() != m.size()) throw DimensionError("Q matrix size does not match orbit count");
    long long s = 0;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (q[i].size() != m.size()) throw DimensionError("Q matrix is not square");
      for (std::size_t j = 0; j < m.size(); ++j) s += q[i][j] * m[i] * m[j];
    }
    return s;
  }

  /// Relative data for (alpha, beta) with Z the difference of the two
  /// absolute classes.
  RelativeClassData relative(const OrbitSet& alpha, const OrbitSet& beta) const {
    return relative_data(alpha, beta, c_tau(alpha) - c_tau(beta), Q_tau(alpha) - Q_tau(beta), orbits);
  }
};

struct AbsIndices {
  long long I = 0;
  long long J0 = 0;
};

inline AbsIndices abs_indices(const OrbitSet& alpha, const WeightedChernModel& model) {
  RelativeClassData d = relative_data(alpha, OrbitSet{}, model.c_tau(alpha), model.Q_tau(alpha), model.orbits);
  return {ech_index(d), j0_index(d)};
}

/// delta_1 = max_i 2(|w_i| + ceil|theta_i|) / a_i, so that
/// |I(alpha) - J0(alpha)| <= delta_1 A(alpha).
inline RealScalar delta1_bound(const WeightedChernModel& model) {
  if (model.orbits.empty()) throw PreconditionError("empty orbit table");
  std::optional<RealScalar> best;
  for (const auto* o : model.orbits.list()) {
    auto it = model.weights.find(o->id);
    if (it == model.weights.end()) throw UnknownOrbitError(o->id);
    Rational w = it->second < 0 ? Rational(-it->second) : it->second;
    RealScalar d = RealScalar(Rational(2) * (w + Rational(abs(o->theta).ceil()))) / o->action;
    if (!best || compare(d, *best) > 0) best = d;
  }
  return *best;
}

struct Delta1Violation {
  OrbitSet alpha;
  long long I = 0;
  long long J0 = 0;
};

struct Delta1Report {
  RealScalar delta1;
  std::size_t checked = 0;
  std::vector<Delta1Violation> violations;
};

/// Checks |I - J0| <= delta_1 A over every orbit set with action <= L.
inline Delta1Report verify_delta1(const WeightedChernModel& model, const RealScalar& L) {
  Delta1Report r{delta1_bound(model), 0, {}};
  for (const auto& alpha : enumerate_orbit_sets(model.orbits, L + RealScalar(1))) {
    RealScalar a = action(alpha, model.orbits);
    if (compare(a, L) > 0) continue;
    ++r.checked;
    auto ij = abs_indices(alpha, model);
    long long diff = std::llabs(ij.I - ij.J0);
    if (compare(RealScalar(diff), r.delta1 * a) > 0) r.violations.push_back({alpha, ij.I, ij.J0});
  }
  return r;
}

struct IndexShift {
  long long dI = 0;
  long long dJ0 = 0;
};

/// Change of I and J0 when Z is replaced by Z', given <c_1(xi), Z - Z'> and
/// <PD(Gamma), Z - Z'>.
inline IndexShift ambiguity_shift(long long pairing_c1, long long pairing_gamma) {
  return {pairing_c1 + 2 * pairing_gamma, -pairing_c1 + 2 * pairing_gamma};
}

}  // namespace echkit
