#pragma once

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <ios>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>

#include "echkit/errors.hpp"

namespace echkit {

namespace mp = boost::multiprecision;

using BigInt = mp::number<mp::cpp_int_backend<>, mp::et_off>;
using Rational = mp::number<mp::cpp_rational_backend, mp::et_off>;
using BigFloat = mp::number<mp::cpp_bin_float<120>, mp::et_off>;

inline constexpr int kDefaultWorkingDigits = 50;
inline constexpr int kMinWorkingDigits = 20;
inline constexpr int kMaxWorkingDigits = 110;

/// Largest radius a certified input may carry.
inline const BigFloat& max_input_radius() {
  static const BigFloat r("1e-12");
  return r;
}

namespace detail {

inline BigInt floor_div(const BigInt& a, const BigInt& b) {
  // b > 0
  BigInt q = a / b;
  if (a % b != 0 && a < 0) --q;
  return q;
}

inline long long squarefree_part(long long d, long long& square_root_of_rest) {
  square_root_of_rest = 1;
  long long out = d;
  for (long long p = 2; p * p <= out; ++p) {
    while (out % (p * p) == 0) {
      out /= p * p;
      square_root_of_rest *= p;
    }
  }
  return out;
}

inline BigFloat rounding_slack(const BigFloat& v) {
  static const BigFloat eps("1e-112");
  return (abs(v) + 1) * eps;
}

}  // namespace detail

inline long long to_int64(const BigInt& v) {
  if (v > std::numeric_limits<long long>::max() || v < std::numeric_limits<long long>::min()) {
    throw Error("overflow", "integer does not fit in 64 bits");
  }
  return static_cast<long long>(v);
}

/// A real number that is either exact (a rational, or an element r + s*sqrt(d)
/// of a real quadratic field) or certified (a midpoint with an error radius).
///
/// Floor/ceil/sign queries are always answered exactly or rejected with
/// AmbiguousError; nothing is silently rounded.
class RealScalar {
 public:
  enum class Kind { rational, quadratic, certified };

  RealScalar() = default;
  RealScalar(long long v) : r_(v) {}  // NOLINT(google-explicit-constructor)
  RealScalar(int v) : r_(v) {}        // NOLINT(google-explicit-constructor)
  explicit RealScalar(Rational q) : r_(std::move(q)) {}

  static RealScalar fraction(const BigInt& p, const BigInt& q) {
    if (q == 0) throw PreconditionError("zero denominator");
    return RealScalar(Rational(p, q));
  }

  /// r + s*sqrt(d), d > 0. Square factors of d are pulled into s.
  static RealScalar quadratic(const Rational& r, const Rational& s, long long d) {
    if (d <= 0) throw PreconditionError("radicand must be positive");
    long long root = 1;
    long long core = detail::squarefree_part(d, root);
    Rational coeff = s * root;
    RealScalar out;
    if (coeff == 0 || core == 1) {
      out.r_ = r + (core == 1 ? coeff : Rational(0));
      return out;
    }
    out.kind_ = Kind::quadratic;
    out.r_ = r;
    out.s_ = coeff;
    out.d_ = core;
    return out;
  }

  static RealScalar sqrt_of(long long d) { return quadratic(0, 1, d); }

  static RealScalar certified(const BigFloat& value, const BigFloat& radius, bool declared_irrational) {
    if (radius < 0) throw PreconditionError("negative radius");
    RealScalar out;
    out.kind_ = Kind::certified;
    out.mid_ = value;
    out.rad_ = radius;
    out.irrational_ = declared_irrational;
    return out;
  }

  static RealScalar pi(int working_digits = kDefaultWorkingDigits) {
    return certified(boost::math::constants::pi<BigFloat>(), digits_radius(working_digits), true);
  }

  static RealScalar e(int working_digits = kDefaultWorkingDigits) {
    return certified(boost::math::constants::e<BigFloat>(), digits_radius(working_digits), true);
  }

  static BigFloat digits_radius(int working_digits) {
    if (working_digits < kMinWorkingDigits || working_digits > kMaxWorkingDigits) {
      throw PreconditionError("working digits must lie in [" + std::to_string(kMinWorkingDigits) + ", " +
                              std::to_string(kMaxWorkingDigits) + "]");
    }
    return pow(BigFloat(10), -working_digits);
  }

  Kind kind() const { return kind_; }
  bool is_exact() const { return kind_ != Kind::certified; }
  bool is_rational() const { return kind_ == Kind::rational; }
  const Rational& rational_part() const { return r_; }
  const Rational& surd_coefficient() const { return s_; }
  long long radicand() const { return d_; }
  const BigFloat& radius() const { return rad_; }
  bool declared_irrational() const { return irrational_; }

  /// True when the value is certainly not rational.
  bool is_known_irrational() const {
    return kind_ == Kind::quadratic || (kind_ == Kind::certified && irrational_);
  }

  BigFloat midpoint() const {
    switch (kind_) {
      case Kind::rational:
        return rational_to_float(r_);
      case Kind::quadratic:
        return rational_to_float(r_) + rational_to_float(s_) * sqrt(BigFloat(d_));
      case Kind::certified:
        return mid_;
    }
    return 0;
  }

  double to_double() const { return static_cast<double>(midpoint()); }
  long double to_long_double() const { return static_cast<long double>(midpoint()); }

  /// Sign of the value; certified values straddling zero are ambiguous.
  int sign() const {
    switch (kind_) {
      case Kind::rational:
        return r_ > 0 ? 1 : (r_ < 0 ? -1 : 0);
      case Kind::quadratic:
        return quadratic_sign();
      case Kind::certified:
        if (mid_ - rad_ > 0) return 1;
        if (mid_ + rad_ < 0) return -1;
        throw AmbiguousError("sign of certified value " + to_string(20) + " is not resolved");
    }
    return 0;
  }

  std::optional<int> try_sign() const {
    if (kind_ == Kind::certified && !(mid_ - rad_ > 0) && !(mid_ + rad_ < 0)) return std::nullopt;
    return sign();
  }

  BigInt floor() const {
    switch (kind_) {
      case Kind::rational:
        return detail::floor_div(mp::numerator(r_), mp::denominator(r_));
      case Kind::quadratic:
        return quadratic_floor();
      case Kind::certified: {
        BigFloat lo = mid_ - rad_;
        BigFloat hi = mid_ + rad_;
        BigFloat flo = mp::floor(lo);
        if (mp::floor(hi) != flo || flo == lo) {
          throw AmbiguousError("floor of " + to_string(25) + " is ambiguous within radius " +
                               rad_.str(3, std::ios_base::scientific));
        }
        return static_cast<BigInt>(flo);
      }
    }
    return 0;
  }

  BigInt ceil() const {
    BigInt f = floor();
    return is_integer() ? f : f + 1;
  }

  long long floor_int() const { return to_int64(floor()); }
  long long ceil_int() const { return to_int64(ceil()); }

  /// Exact integrality test. Certified values are integers only if that is
  /// impossible to rule out, in which case the query is ambiguous.
  bool is_integer() const {
    switch (kind_) {
      case Kind::rational:
        return mp::denominator(r_) == 1;
      case Kind::quadratic:
        return false;
      case Kind::certified:
        if (irrational_) return false;
        (void)floor();  // throws when an integer lies within the radius
        return false;
    }
    return false;
  }

  /// Fractional part x - floor(x), in [0, 1).
  RealScalar frac() const { return *this - RealScalar(Rational(floor())); }

  RealScalar abs() const { return sign() < 0 ? -*this : *this; }

  /// Decimal rendering with `sig` significant digits (general notation).
  std::string to_string(int sig = 30) const {
    if (kind_ == Kind::rational && mp::denominator(r_) == 1) return mp::numerator(r_).str();
    BigFloat v = midpoint();
    if (v == 0) return "0";
    return v.str(sig, std::ios_base::fmtflags(0));
  }

  /// Exact token accepted back by parse_real for exact values; certified
  /// values render as a decimal with the `~` marker.
  std::string symbolic() const {
    switch (kind_) {
      case Kind::rational:
        return rational_str(r_);
      case Kind::quadratic: {
        std::string out;
        if (r_ != 0) out = rational_str(r_);
        Rational s = s_;
        if (!out.empty()) {
          out += s < 0 ? "-" : "+";
          s = s < 0 ? Rational(-s) : s;
        } else if (s < 0) {
          out = "-";
          s = -s;
        }
        if (s != 1) out += "(" + rational_str(s) + ")*";
        out += "sqrt" + std::to_string(d_);
        return out;
      }
      case Kind::certified: {
        // Enough digits that the printed value re-parses inside the radius.
        std::string s = mid_.str(kMaxWorkingDigits, std::ios_base::fixed);
        return s + "~";
      }
    }
    return "";
  }

  friend RealScalar operator-(const RealScalar& a) {
    RealScalar out = a;
    out.r_ = -a.r_;
    out.s_ = -a.s_;
    out.mid_ = -a.mid_;
    return out;
  }

  friend RealScalar operator+(const RealScalar& a, const RealScalar& b) {
    if (auto d = common_field(a, b)) {
      return exact(a.r_ + b.r_, a.s_ + b.s_, *d);
    }
    RealScalar x = a.as_certified();
    RealScalar y = b.as_certified();
    BigFloat mid = x.mid_ + y.mid_;
    bool irr = (x.irrational_ && b.is_rational()) || (y.irrational_ && a.is_rational());
    return certified(mid, x.rad_ + y.rad_ + detail::rounding_slack(mid), irr);
  }

  friend RealScalar operator-(const RealScalar& a, const RealScalar& b) { return a + (-b); }

  friend RealScalar operator*(const RealScalar& a, const RealScalar& b) {
    if (auto d = common_field(a, b)) {
      Rational dd = *d;
      return exact(a.r_ * b.r_ + a.s_ * b.s_ * dd, a.r_ * b.s_ + a.s_ * b.r_, *d);
    }
    if ((a.is_rational() && a.r_ == 0) || (b.is_rational() && b.r_ == 0)) return RealScalar(0);
    RealScalar x = a.as_certified();
    RealScalar y = b.as_certified();
    BigFloat mid = x.mid_ * y.mid_;
    BigFloat rad = mp::abs(x.mid_) * y.rad_ + mp::abs(y.mid_) * x.rad_ + x.rad_ * y.rad_;
    bool irr = (x.irrational_ && b.is_rational() && b.r_ != 0) || (y.irrational_ && a.is_rational() && a.r_ != 0);
    return certified(mid, rad + detail::rounding_slack(mid), irr);
  }

  friend RealScalar operator/(const RealScalar& a, const RealScalar& b) {
    if (auto d = common_field(a, b)) {
      Rational dd = *d;
      Rational norm = b.r_ * b.r_ - b.s_ * b.s_ * dd;
      if (norm == 0) throw PreconditionError("division by zero");
      // a * conj(b) / norm(b)
      Rational re = (a.r_ * b.r_ - a.s_ * b.s_ * dd) / norm;
      Rational im = (a.s_ * b.r_ - a.r_ * b.s_) / norm;
      return exact(re, im, *d);
    }
    RealScalar x = a.as_certified();
    RealScalar y = b.as_certified();
    BigFloat den = mp::abs(y.mid_);
    if (den <= y.rad_) throw AmbiguousError("division by a value not certified nonzero");
    BigFloat mid = x.mid_ / y.mid_;
    BigFloat rad = (mp::abs(x.mid_) * y.rad_ + den * x.rad_) / (den * (den - y.rad_));
    bool irr = (x.irrational_ && b.is_rational()) || (y.irrational_ && a.is_rational() && a.r_ != 0);
    return certified(mid, rad + detail::rounding_slack(mid), irr);
  }

  RealScalar& operator+=(const RealScalar& o) { return *this = *this + o; }
  RealScalar& operator-=(const RealScalar& o) { return *this = *this - o; }
  RealScalar& operator*=(const RealScalar& o) { return *this = *this * o; }

  /// Sign of a - b; throws AmbiguousError when not resolvable.
  friend int compare(const RealScalar& a, const RealScalar& b) { return (a - b).sign(); }

  /// Like compare, but returns nullopt instead of throwing.
  friend std::optional<int> try_compare(const RealScalar& a, const RealScalar& b) { return (a - b).try_sign(); }

  friend bool operator<(const RealScalar& a, const RealScalar& b) { return compare(a, b) < 0; }
  friend bool operator>(const RealScalar& a, const RealScalar& b) { return compare(a, b) > 0; }
  friend bool operator<=(const RealScalar& a, const RealScalar& b) { return compare(a, b) <= 0; }
  friend bool operator>=(const RealScalar& a, const RealScalar& b) { return compare(a, b) >= 0; }
  friend bool operator==(const RealScalar& a, const RealScalar& b) { return compare(a, b) == 0; }
  friend bool operator!=(const RealScalar& a, const RealScalar& b) { return compare(a, b) != 0; }

 private:
  static BigFloat rational_to_float(const Rational& q) {
    return BigFloat(mp::numerator(q)) / BigFloat(mp::denominator(q));
  }

  static std::string rational_str(const Rational& q) {
    if (mp::denominator(q) == 1) return mp::numerator(q).str();
    return mp::numerator(q).str() + "/" + mp::denominator(q).str();
  }

  static RealScalar exact(const Rational& r, const Rational& s, long long d) {
    if (s == 0 || d == 0) return RealScalar(r);
    RealScalar out;
    out.kind_ = Kind::quadratic;
    out.r_ = r;
    out.s_ = s;
    out.d_ = d;
    return out;
  }

  /// Radicand shared by two exact operands (0 when both are rational).
  static std::optional<long long> common_field(const RealScalar& a, const RealScalar& b) {
    if (!a.is_exact() || !b.is_exact()) return std::nullopt;
    if (a.kind_ == Kind::rational) return b.d_;
    if (b.kind_ == Kind::rational) return a.d_;
    if (a.d_ == b.d_) return a.d_;
    return std::nullopt;
  }

  RealScalar as_certified() const {
    if (kind_ == Kind::certified) return *this;
    BigFloat v = midpoint();
    return certified(v, detail::rounding_slack(v), kind_ == Kind::quadratic);
  }

  /// Integer numerators A, B and denominator C > 0 with value (A + B sqrt d) / C.
  void common_denominator(BigInt& A, BigInt& B, BigInt& C) const {
    BigInt dr = mp::denominator(r_);
    BigInt ds = mp::denominator(s_);
    C = mp::lcm(dr, ds);
    A = mp::numerator(r_) * (C / dr);
    B = mp::numerator(s_) * (C / ds);
  }

  int quadratic_sign() const {
    BigInt A, B, C;
    common_denominator(A, B, C);
    int sa = A > 0 ? 1 : (A < 0 ? -1 : 0);
    int sb = B > 0 ? 1 : (B < 0 ? -1 : 0);
    if (sb == 0) return sa;
    if (sa == 0 || sa == sb) return sb;
    BigInt lhs = A * A;
    BigInt rhs = B * B * d_;
    return lhs > rhs ? sa : sb;
  }

  BigInt quadratic_floor() const {
    BigInt A, B, C;
    common_denominator(A, B, C);
    BigInt t = mp::sqrt(BigInt(B * B * d_));  // floor of |B| sqrt(d); never exact
    BigInt n = B > 0 ? A + t : A - t - 1;    // A + B sqrt(d) lies in (n, n + 1)
    return detail::floor_div(n, C);
  }

  Kind kind_ = Kind::rational;
  Rational r_{0};
  Rational s_{0};
  long long d_ = 0;
  BigFloat mid_{0};
  BigFloat rad_{0};
  bool irrational_ = false;
};

inline RealScalar abs(const RealScalar& x) { return x.abs(); }

inline RealScalar min(const RealScalar& a, const RealScalar& b) { return compare(a, b) <= 0 ? a : b; }
inline RealScalar max(const RealScalar& a, const RealScalar& b) { return compare(a, b) >= 0 ? a : b; }

namespace detail {

/// Recursive-descent parser for real tokens:
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := ('+'|'-') factor | '(' expr ')' | atom
///   atom   := integer | decimal ['~'] | 'sqrt' digits | 'sqrt(' integer ')' | 'pi' | 'e' | 'golden' | 'phi'
/// A decimal literal is exact unless it carries the '~' marker, which declares
/// it irrational with a radius of one unit in its last digit.
class RealParser {
 public:
  RealParser(std::string_view text, int digits) : s_(text), digits_(digits) {}

  RealScalar parse() {
    RealScalar v = expr();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw ParseError("cannot parse real '" + std::string(s_) + "' at offset " + std::to_string(pos_) + ": " + why);
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  bool eat_word(std::string_view w) {
    skip_ws();
    if (s_.substr(pos_, w.size()) == w) {
      std::size_t end = pos_ + w.size();
      // identifiers must not run into more letters ("pix" is not "pi")
      if (end < s_.size() && std::isalpha(static_cast<unsigned char>(s_[end]))) return false;
      pos_ = end;
      return true;
    }
    return false;
  }

  RealScalar expr() {
    RealScalar v = term();
    for (;;) {
      if (eat('+')) {
        v = v + term();
      } else if (eat('-')) {
        v = v - term();
      } else {
        return v;
      }
    }
  }

  RealScalar term() {
    RealScalar v = factor();
    for (;;) {
      if (eat('*')) {
        v = v * factor();
      } else if (eat('/')) {
        v = v / factor();
      } else {
        return v;
      }
    }
  }

  RealScalar factor() {
    if (eat('-')) return -factor();
    if (eat('+')) return factor();
    if (eat('(')) {
      RealScalar v = expr();
      if (!eat(')')) fail("expected ')'");
      return v;
    }
    return atom();
  }

  std::string digits() {
    std::string out;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) out += s_[pos_++];
    return out;
  }

  RealScalar atom() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    if (s_.substr(pos_, 4) == "sqrt") {
      pos_ += 4;
      std::string d;
      if (eat('(')) {
        skip_ws();
        d = digits();
        if (!eat(')')) fail("expected ')' after sqrt radicand");
      } else {
        d = digits();
      }
      if (d.empty()) fail("sqrt needs an integer radicand");
      return RealScalar::sqrt_of(std::stoll(d));
    }
    if (eat_word("pi")) return RealScalar::pi(digits_);
    if (eat_word("golden") || eat_word("phi")) return RealScalar::quadratic(Rational(1, 2), Rational(1, 2), 5);
    if (eat_word("e")) return RealScalar::e(digits_);
    if (!std::isdigit(static_cast<unsigned char>(s_[pos_]))) fail("expected a number");
    std::string whole = digits();
    std::string frac;
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      frac = digits();
    }
    std::string all = whole + frac;
    all.erase(0, std::min(all.find_first_not_of('0'), all.size()));
    BigInt num(all.empty() ? std::string("0") : all);  // no leading zeros: they would read as octal
    BigInt den = mp::pow(BigInt(10), static_cast<unsigned>(frac.size()));
    if (pos_ < s_.size() && s_[pos_] == '~') {
      ++pos_;
      BigFloat radius = pow(BigFloat(10), -static_cast<int>(frac.size()));
      if (radius >= max_input_radius()) fail("declared-irrational decimal needs at least 13 fractional digits");
      return RealScalar::certified(BigFloat(num) / BigFloat(den), radius, true);
    }
    return RealScalar::fraction(num, den);
  }

  std::string_view s_;
  int digits_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses tokens such as "3", "-2/7", "sqrt2", "sqrt2-1", "1+2*sqrt5",
/// "golden-1", "1/pi", "e-1" or "0.31830988618379067~".
inline RealScalar parse_real(std::string_view token, int working_digits = kDefaultWorkingDigits) {
  return detail::RealParser(token, working_digits).parse();
}

}  // namespace echkit
