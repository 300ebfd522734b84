#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <stdexcept>
#include <string>
#include <string_view>

namespace ksv {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// High-precision real type used for archimedean embeddings.
using Real = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<120>>;

inline constexpr int kMaxDigits = 100;
inline constexpr int kDefaultDigits = 40;

/// Thrown when caller-supplied data violates a documented precondition.
class precondition_error : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

inline Integer num(const Rational& q) { return boost::multiprecision::numerator(q); }
inline Integer den(const Rational& q) { return boost::multiprecision::denominator(q); }

inline bool is_integral(const Rational& q) { return den(q) == 1; }

inline Rational abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

inline Integer floor_div(const Integer& a, const Integer& b) {
    Integer q = a / b;
    Integer r = a % b;
    if (r != 0 && ((r < 0) != (b < 0))) --q;
    return q;
}

inline Integer floor(const Rational& q) { return floor_div(num(q), den(q)); }

inline Integer lcm_int(const Integer& a, const Integer& b) {
    if (a == 0 || b == 0) return 0;
    Integer g = boost::multiprecision::gcd(a, b);
    Integer l = a / g * b;
    return l < 0 ? Integer(-l) : l;
}

/// Parses "p", "-p" or "p/q".
inline Rational parse_rational(std::string_view text) {
    std::string s(text);
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rational(Integer(s));
        Integer p(s.substr(0, slash));
        Integer q(s.substr(slash + 1));
        if (q == 0) throw precondition_error("zero denominator in rational '" + s + "'");
        return Rational(p, q);
    } catch (const std::runtime_error&) {
        throw precondition_error("malformed rational '" + s + "'");
    }
}

inline std::string to_string(const Rational& q) {
    if (is_integral(q)) return num(q).str();
    return num(q).str() + "/" + den(q).str();
}

inline Real to_real(const Rational& q) { return Real(num(q)) / Real(den(q)); }

inline double to_double(const Rational& q) { return static_cast<double>(to_real(q)); }

/// Exact integer square root of a perfect square, or throws.
inline Integer exact_isqrt(const Integer& n) {
    if (n < 0) throw precondition_error("square root of a negative integer");
    Integer r = boost::multiprecision::sqrt(n);
    if (r * r != n) throw precondition_error("integer " + n.str() + " is not a perfect square");
    return r;
}

inline bool is_perfect_square(const Rational& q) {
    if (q < 0) return false;
    Integer a = boost::multiprecision::sqrt(num(q));
    Integer b = boost::multiprecision::sqrt(den(q));
    return a * a == num(q) && b * b == den(q);
}

inline Rational exact_sqrt(const Rational& q) {
    if (!is_perfect_square(q)) throw precondition_error("rational " + to_string(q) + " is not a perfect square");
    return Rational(boost::multiprecision::sqrt(num(q)), boost::multiprecision::sqrt(den(q)));
}

/// Product of primes dividing n exactly once equals n (n > 0).
inline bool is_squarefree(Integer n) {
    if (n < 0) n = -n;
    if (n == 0) return false;
    for (Integer p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            n /= p;
            if (n % p == 0) return false;
        }
    }
    return true;
}

}  // namespace ksv
