#pragma once
// Exact scalars and phase angles.

#include <boost/multiprecision/cpp_int.hpp>

#include <stdexcept>
#include <string>

namespace qpel {

using Rational = boost::multiprecision::cpp_rational;

inline Rational make_rational(long long num, long long den = 1) {
  return Rational(num, den);
}

/// Parses "p", "p/q" (optionally signed). Throws std::invalid_argument.
inline Rational parse_rational(const std::string& text) {
  auto slash = text.find('/');
  try {
    if (slash == std::string::npos) {
      return Rational(boost::multiprecision::cpp_int(text));
    }
    boost::multiprecision::cpp_int num(text.substr(0, slash));
    boost::multiprecision::cpp_int den(text.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator in '" + text + "'");
    return Rational(num, den);
  } catch (const std::runtime_error&) {
    throw std::invalid_argument("malformed rational '" + text + "'");
  }
}

inline std::string to_string(const Rational& r) {
  if (denominator(r) == 1) return numerator(r).str();
  return numerator(r).str() + "/" + denominator(r).str();
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

/// A phase angle alpha = turns * pi, kept normalised to turns in [0, 2).
class Angle {
 public:
  Angle() = default;
  explicit Angle(Rational turns_of_pi) : q_(normalise(std::move(turns_of_pi))) {}

  const Rational& over_pi() const { return q_; }
  double radians() const;

  Angle negated() const { return Angle(-q_); }
  Angle shifted(const Rational& by_pi) const { return Angle(q_ + by_pi); }

  friend bool operator==(const Angle& a, const Angle& b) { return a.q_ == b.q_; }
  friend bool operator<(const Angle& a, const Angle& b) { return a.q_ < b.q_; }

  /// True when the rational is already inside [0, 2).
  static bool in_range(const Rational& q) { return q >= 0 && q < 2; }

 private:
  static Rational normalise(Rational q) {
    using boost::multiprecision::cpp_int;
    // floor(q / 2)
    Rational half = q / 2;
    cpp_int n = numerator(half), d = denominator(half);
    cpp_int fl = n / d;
    if (n < 0 && fl * d != n) fl -= 1;
    return q - Rational(fl) * 2;
  }
  Rational q_{0};
};

inline double Angle::radians() const {
  return to_double(q_) * 3.14159265358979323846;
}

}  // namespace qpel
