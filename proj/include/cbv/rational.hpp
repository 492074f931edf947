#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>

namespace cbv {

// Exact rational arithmetic.  mpq_class keeps values in canonical reduced
// form (positive denominator, gcd 1) as long as construction goes through
// rat()/parse_rat(); raw num/den constructors must canonicalize.
using Rat = mpq_class;
using Int = mpz_class;

Rat rat(long num, long den = 1);

// 2^k as an exact rational, k may be negative.
Rat pow2(long k);

// Smallest e with |x| <= 2^e.  Requires x != 0.
long ceil_log2_abs(const Rat& x);

// Accepts "p/q", integers, and plain decimals ("0.25", "-3.5e-2" is not
// supported; exponents never show up in our inputs).
std::optional<Rat> parse_rat(const std::string& s);

// Canonical form: "p/q", or just "p" for integers.
std::string rat_string(const Rat& x);

// Exact decimal expansion when the denominator is of the form 2^a*5^b,
// otherwise falls back to "p/q".  Used for human-facing output only.
std::string decimal_string(const Rat& x);

}  // namespace cbv
