#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <stdexcept>
#include <string>

namespace resched {

// Exact rational arithmetic on 64-bit numerator/denominator. All
// intermediates run through __int128; any result whose reduced components
// do not fit back into 64 bits throws std::overflow_error instead of
// silently losing exactness.
class Rat {
 public:
  constexpr Rat() = default;
  constexpr Rat(long long n) : num_(n), den_(1) {}  // NOLINT(google-explicit-constructor)
  Rat(long long n, long long d) { *this = make(n, d); }

  static Rat make(__int128 n, __int128 d);

  long long num() const { return num_; }
  long long den() const { return den_; }

  bool is_zero() const { return num_ == 0; }
  bool is_integer() const { return den_ == 1; }
  int sign() const { return num_ > 0 ? 1 : (num_ < 0 ? -1 : 0); }

  Rat operator-() const { return make(-static_cast<__int128>(num_), den_); }

  friend Rat operator+(const Rat& a, const Rat& b) {
    return make(i128(a.num_) * b.den_ + i128(b.num_) * a.den_,
                i128(a.den_) * b.den_);
  }
  friend Rat operator-(const Rat& a, const Rat& b) {
    return make(i128(a.num_) * b.den_ - i128(b.num_) * a.den_,
                i128(a.den_) * b.den_);
  }
  friend Rat operator*(const Rat& a, const Rat& b) {
    return make(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
  }
  friend Rat operator/(const Rat& a, const Rat& b) {
    if (b.num_ == 0) throw std::domain_error("Rat: division by zero");
    return make(i128(a.num_) * b.den_, i128(a.den_) * b.num_);
  }

  Rat& operator+=(const Rat& b) { return *this = *this + b; }
  Rat& operator-=(const Rat& b) { return *this = *this - b; }
  Rat& operator*=(const Rat& b) { return *this = *this * b; }
  Rat& operator/=(const Rat& b) { return *this = *this / b; }

  friend bool operator==(const Rat& a, const Rat& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rat& a, const Rat& b) { return !(a == b); }
  friend bool operator<(const Rat& a, const Rat& b) {
    return i128(a.num_) * b.den_ < i128(b.num_) * a.den_;
  }
  friend bool operator>(const Rat& a, const Rat& b) { return b < a; }
  friend bool operator<=(const Rat& a, const Rat& b) { return !(b < a); }
  friend bool operator>=(const Rat& a, const Rat& b) { return !(a < b); }

  double to_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  // Largest integer <= value.
  long long floor() const {
    long long q = num_ / den_;
    if (num_ % den_ != 0 && num_ < 0) --q;
    return q;
  }
  long long ceil() const {
    long long q = num_ / den_;
    if (num_ % den_ != 0 && num_ > 0) ++q;
    return q;
  }

  std::string str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

  // Parses "a/b" or "a". Throws std::invalid_argument on malformed input.
  static Rat parse(const std::string& s);

  // Best rational approximation with denominator <= max_den (continued
  // fractions / Stern-Brocot walk).
  static Rat approx(double v, long long max_den);

  // Value snapped onto the 2^-bits grid. `up` selects the rounding
  // direction; the dyadic result keeps later rational products small.
  static Rat quantize(double v, int bits = 26, bool up = false);

 private:
  using i128 = __int128;
  long long num_ = 0;
  long long den_ = 1;
};

inline Rat Rat::make(__int128 n, __int128 d) {
  if (d == 0) throw std::domain_error("Rat: zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  // gcd over unsigned 128-bit magnitudes
  unsigned __int128 a = n < 0 ? static_cast<unsigned __int128>(-n)
                              : static_cast<unsigned __int128>(n);
  unsigned __int128 b = static_cast<unsigned __int128>(d);
  while (b != 0) {
    unsigned __int128 t = a % b;
    a = b;
    b = t;
  }
  if (a > 1) {
    n /= static_cast<__int128>(a);
    d /= static_cast<__int128>(a);
  }
  constexpr __int128 kMax = static_cast<__int128>(INT64_MAX);
  if (n > kMax || n < -kMax || d > kMax)
    throw std::overflow_error("Rat: value does not fit in 64-bit fraction");
  Rat r;
  r.num_ = static_cast<long long>(n);
  r.den_ = static_cast<long long>(d);
  return r;
}

inline Rat Rat::parse(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("Rat: empty string");
  size_t slash = s.find('/');
  try {
    size_t pos = 0;
    long long n = std::stoll(s.substr(0, slash), &pos);
    if (slash == std::string::npos) {
      if (pos != s.size()) throw std::invalid_argument("trailing chars");
      return Rat(n);
    }
    size_t pos2 = 0;
    std::string dens = s.substr(slash + 1);
    long long d = std::stoll(dens, &pos2);
    if (pos != slash || pos2 != dens.size())
      throw std::invalid_argument("trailing chars");
    return Rat(n, d);
  } catch (const std::out_of_range&) {
    throw std::invalid_argument("Rat: out of range: " + s);
  }
}

inline Rat Rat::approx(double v, long long max_den) {
  if (!(max_den >= 1)) throw std::invalid_argument("Rat::approx: max_den");
  if (!(v == v) || v > 9.0e18 || v < -9.0e18)
    throw std::overflow_error("Rat::approx: value out of range");
  bool neg = v < 0;
  double x = neg ? -v : v;
  // Stern-Brocot mediant walk: (p0/q0) lower, (p1/q1) upper bracket.
  long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double rem = x;
  while (true) {
    double fl = std::floor(rem);
    if (fl > 9.0e18) break;
    long long a = static_cast<long long>(fl);
    // next convergent p1*a + p0 etc.
    if (q1 > 0 && (q1 > (max_den - q0) / a)) break;  // denominator would exceed
    long long p2 = a * p1 + p0, q2 = a * q1 + q0;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    double frac = rem - fl;
    if (frac < 1e-18) break;
    rem = 1.0 / frac;
    if (rem > 9.0e18) break;
  }
  // p1/q1 is the last full convergent; also consider the best semiconvergent.
  Rat best = Rat(p1, q1 == 0 ? 1 : q1);
  if (q0 > 0 && q1 > 0) {
    long long k = (max_den - q0) / q1;
    if (k > 0) {
      Rat semi(p0 + k * p1, q0 + k * q1);
      if (std::abs(semi.to_double() - x) < std::abs(best.to_double() - x))
        best = semi;
    }
  }
  return neg ? -best : best;
}

inline Rat Rat::quantize(double v, int bits, bool up) {
  if (bits < 0 || bits > 62) throw std::invalid_argument("Rat::quantize bits");
  double scale = std::ldexp(1.0, bits);
  double scaled = v * scale;
  if (!(scaled == scaled) || scaled > 9.0e18 || scaled < -9.0e18)
    throw std::overflow_error("Rat::quantize: value out of range");
  double g = up ? std::ceil(scaled) : std::floor(scaled);
  return Rat(static_cast<long long>(g), static_cast<long long>(scale));
}

inline Rat rat_min(const Rat& a, const Rat& b) { return a < b ? a : b; }
inline Rat rat_max(const Rat& a, const Rat& b) { return a < b ? b : a; }
inline Rat rat_abs(const Rat& a) { return a.sign() < 0 ? -a : a; }

}  // namespace resched
