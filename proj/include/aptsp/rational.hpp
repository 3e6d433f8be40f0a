#pragma once

#include <gmpxx.h>

#include <string>

namespace aptsp {

using Rational = mpq_class;

/// Parses "p/q", integers and decimal literals ("0.663", "-1.5e-3") exactly.
/// Throws InvalidInput on malformed text or a zero denominator.
Rational parse_rational(const std::string& text);

/// Exact value of a finite double.
Rational exact_rational(double value);

/// "p/q" in lowest terms ("p" when the denominator is 1).
std::string to_string(const Rational& q);

/// Closed enclosure [lo, hi] of an irrational real, endpoints exact rationals.
struct Interval {
    Rational lo;
    Rational hi;
};

/// Enclosure of e^q with relative width about 2^-250, computed with directed rounding.
Interval exp_enclosure(const Rational& q);

/// Nearest double at or above / at or below q.
double round_up(const Rational& q);
double round_down(const Rational& q);

}  // namespace aptsp
