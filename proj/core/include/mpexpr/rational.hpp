#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

namespace mpexpr {

using Rat = mpq_class;
using Vec = std::vector<Rat>;

/// Parses "p/q", integers ("-3"), and decimal literals ("1.25") exactly.
/// Throws InputError on anything else; never goes through floating point.
Rat parse_rational(const std::string& text);

/// Canonical text form: "p" for integers, "p/q" otherwise.
std::string format_rational(const Rat& value);

std::string format_vec(const Vec& v);

Rat dot(const Vec& a, const Vec& b);
Vec add(const Vec& a, const Vec& b);
Vec sub(const Vec& a, const Vec& b);
Vec scale(const Rat& s, const Vec& v);

Rat linf_dist(const Vec& a, const Vec& b);
Rat l1_dist(const Vec& a, const Vec& b);

Rat rat_abs(const Rat& x);
Rat rat_min(const Rat& a, const Rat& b);
Rat rat_max(const Rat& a, const Rat& b);

}  // namespace mpexpr
