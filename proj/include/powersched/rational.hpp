#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>

namespace powersched {

// Exact rational over 64-bit integers, normalized (den > 0, gcd 1).
// Arithmetic runs through 128-bit intermediates and throws std::overflow_error
// instead of wrapping; energy accounting must never drift.
class Rational {
public:
  constexpr Rational() = default;
  Rational(long long value) : num_(value), den_(1) {}  // NOLINT: implicit by design
  Rational(long long num, long long den);

  long long num() const { return num_; }
  long long den() const { return den_; }

  bool is_zero() const { return num_ == 0; }
  bool is_integer() const { return den_ == 1; }
  long long floor() const;
  long long ceil() const;
  double to_double() const;

  // Accepts "7", "-3/4", "0.1218".
  static Rational parse(const std::string& text);
  std::string str() const;

  Rational operator-() const;
  Rational& operator+=(const Rational& o);
  Rational& operator-=(const Rational& o);
  Rational& operator*=(const Rational& o);
  Rational& operator/=(const Rational& o);

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

private:
  static Rational reduce(__int128 num, __int128 den);

  long long num_ = 0;
  long long den_ = 1;
};

std::ostream& operator<<(std::ostream& os, const Rational& r);

}  // namespace powersched
