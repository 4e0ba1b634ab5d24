#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ptune {

// Exact rational. mpq_class keeps values canonical (gcd 1, positive
// denominator) as long as every construction path goes through
// make_rational() or arithmetic on canonical operands.
using Rational = mpq_class;
using Vec = std::vector<Rational>;

Rational make_rational(std::int64_t num, std::int64_t den = 1);

// Accepts "p/q", "p", and plain decimals such as "-5.625" or "1e-3".
Rational parse_rational(std::string_view text);

// Always "p/q", including "3/1" and "0/1".
std::string to_pq_string(const Rational& r);

double to_double(const Rational& r);

// Snap a double to the nearest rational with the given denominator.
Rational snap(double value, std::int64_t denominator);

Rational dot(const Vec& a, const Vec& b);
Vec add(const Vec& a, const Vec& b);
Vec sub(const Vec& a, const Vec& b);
Vec scale(const Vec& a, const Rational& s);
Vec zeros(std::size_t d);
bool is_zero(const Vec& a);

int sign(const Rational& r);

} // namespace ptune
