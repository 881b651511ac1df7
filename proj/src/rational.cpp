#include "powersched/rational.hpp"

#include <cctype>
#include <cstdlib>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace powersched {

namespace {

using i128 = __int128;
using u128 = unsigned __int128;

u128 abs128(i128 v) { return v < 0 ? u128(-(v + 1)) + 1 : u128(v); }

u128 gcd128(u128 a, u128 b) {
  while (b != 0) {
    u128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

long long narrow(i128 v) {
  if (v > i128(std::numeric_limits<long long>::max()) ||
      v < i128(std::numeric_limits<long long>::min())) {
    throw std::overflow_error("rational overflow");
  }
  return static_cast<long long>(v);
}

}  // namespace

Rational Rational::reduce(i128 num, i128 den) {
  if (den == 0) throw std::domain_error("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  if (num == 0) return Rational();
  u128 g = gcd128(abs128(num), abs128(den));
  num /= i128(g);
  den /= i128(g);
  Rational r;
  r.num_ = narrow(num);
  r.den_ = narrow(den);
  return r;
}

Rational::Rational(long long num, long long den) { *this = reduce(num, den); }

long long Rational::floor() const {
  long long q = num_ / den_;
  if (num_ % den_ != 0 && num_ < 0) --q;
  return q;
}

long long Rational::ceil() const {
  long long q = num_ / den_;
  if (num_ % den_ != 0 && num_ > 0) ++q;
  return q;
}

double Rational::to_double() const {
  return static_cast<double>(num_) / static_cast<double>(den_);
}

Rational Rational::operator-() const { return reduce(-i128(num_), den_); }

Rational& Rational::operator+=(const Rational& o) {
  *this = reduce(i128(num_) * o.den_ + i128(o.num_) * den_, i128(den_) * o.den_);
  return *this;
}

Rational& Rational::operator-=(const Rational& o) {
  *this = reduce(i128(num_) * o.den_ - i128(o.num_) * den_, i128(den_) * o.den_);
  return *this;
}

Rational& Rational::operator*=(const Rational& o) {
  *this = reduce(i128(num_) * o.num_, i128(den_) * o.den_);
  return *this;
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.num_ == 0) throw std::domain_error("rational division by zero");
  *this = reduce(i128(num_) * o.den_, i128(den_) * o.num_);
  return *this;
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  i128 lhs = i128(a.num_) * b.den_;
  i128 rhs = i128(b.num_) * a.den_;
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

Rational Rational::parse(const std::string& text) {
  size_t begin = text.find_first_not_of(" \t");
  size_t last = text.find_last_not_of(" \t");
  if (begin == std::string::npos) throw std::invalid_argument("empty rational literal");
  std::string s = text.substr(begin, last - begin + 1);

  auto parse_ll = [](const std::string& part) {
    if (part.empty()) throw std::invalid_argument("malformed rational literal");
    size_t pos = 0;
    long long v;
    try {
      v = std::stoll(part, &pos);
    } catch (const std::exception&) {
      throw std::invalid_argument("malformed rational literal: " + part);
    }
    if (pos != part.size()) throw std::invalid_argument("malformed rational literal: " + part);
    return v;
  };

  if (size_t slash = s.find('/'); slash != std::string::npos) {
    long long n = parse_ll(s.substr(0, slash));
    long long d = parse_ll(s.substr(slash + 1));
    return Rational(n, d);
  }
  if (size_t dot = s.find('.'); dot != std::string::npos) {
    std::string ipart = s.substr(0, dot);
    std::string fpart = s.substr(dot + 1);
    if (fpart.empty() || fpart.size() > 18)
      throw std::invalid_argument("malformed rational literal: " + s);
    for (char c : fpart)
      if (!std::isdigit(static_cast<unsigned char>(c)))
        throw std::invalid_argument("malformed rational literal: " + s);
    bool neg = !ipart.empty() && ipart[0] == '-';
    if (ipart.empty() || ipart == "-" || ipart == "+") ipart += '0';
    long long whole = parse_ll(ipart);
    long long scale = 1;
    for (size_t i = 0; i < fpart.size(); ++i) scale *= 10;
    long long frac = parse_ll(fpart);
    i128 num = i128(whole) * scale + (neg ? -i128(frac) : i128(frac));
    return reduce(num, scale);
  }
  return Rational(parse_ll(s));
}

std::string Rational::str() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

}  // namespace powersched
