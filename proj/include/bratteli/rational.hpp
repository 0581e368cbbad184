#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <charconv>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bratteli {

// Exact arithmetic used throughout the library. Path counts (dim) grow
// superexponentially and cotransition probabilities are ratios of them,
// so everything structural is kept in arbitrary precision.
using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline double to_double(const Rat& r) { return r.template convert_to<double>(); }

// Number of bits of the denominator in lowest terms (>= 1 for any value).
inline std::size_t denominator_bits(const Rat& r) {
  const Int& d = denominator(r);
  return d == 1 ? 1 : static_cast<std::size_t>(msb(d)) + 1;
}

// Canonical fraction string: "p/q", or just "p" when q == 1.
inline std::string format_fraction(const Rat& r) {
  if (denominator(r) == 1) return numerator(r).str();
  return numerator(r).str() + "/" + denominator(r).str();
}

// Accepts "p", "p/q" and plain decimals like "0.25" (mapped to 25/100).
inline Rat parse_fraction(std::string_view s) {
  auto fail = [&] { throw std::invalid_argument("cannot parse rational: '" + std::string(s) + "'"); };
  if (s.empty()) fail();
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    std::string num(s.substr(0, slash)), den(s.substr(slash + 1));
    if (num.empty() || den.empty()) fail();
    Int q(den);
    if (q == 0) fail();
    return Rat(Int(num), q);
  }
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    std::string head(s.substr(0, dot)), tail(s.substr(dot + 1));
    if (tail.empty()) fail();
    for (char c : tail)
      if (c < '0' || c > '9') fail();
    bool neg = !head.empty() && head[0] == '-';
    if (neg) head.erase(0, 1);
    Int ipart = head.empty() ? Int(0) : Int(head);
    Int scale = 1;
    for (std::size_t i = 0; i < tail.size(); ++i) scale *= 10;
    Rat v = Rat(ipart) + Rat(Int(tail), scale);
    return neg ? -v : v;
  }
  return Rat(Int(std::string(s)));
}

// Shortest round-trip representation; keeps float-mode reports reproducible.
inline std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc{}) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

}  // namespace bratteli
