#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace structid {

/// Exact rational scalar used throughout the toolkit.
using Rational = mpq_class;

inline Rational rat(long num, long den = 1) {
    if (den == 0) throw std::domain_error("rational with zero denominator");
    Rational q(num, den);
    q.canonicalize();
    return q;
}

/// Exact decimal-to-rational conversion: "0.2482" -> 1241/5000, "-3.5" -> -7/2.
/// Also accepts plain integers and "p/q" forms.
Rational rational_from_string(const std::string& text);

/// Decimal string for display; exact "p/q" form when the value is not integral.
std::string rational_to_string(const Rational& q);

/// sqrt if the value is a perfect square of a rational, nullopt otherwise.
std::optional<Rational> exact_sqrt(const Rational& q);

/// k such that q == 10^k (k may be negative), nullopt otherwise.
std::optional<long> exact_log10(const Rational& q);

/// q^e for machine-size integer exponents. Throws std::domain_error on 0^negative.
Rational rational_pow(const Rational& q, long e);

uint64_t rational_hash(const Rational& q);

double to_double(const Rational& q);

} // namespace structid
