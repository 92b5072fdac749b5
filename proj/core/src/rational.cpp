#include "mpexpr/rational.hpp"

#include <cctype>
#include <sstream>

#include "mpexpr/errors.hpp"

namespace mpexpr {

namespace {

bool all_digits(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

}  // namespace

Rat parse_rational(const std::string& text) {
    std::string s = text;
    // strip surrounding whitespace
    size_t b = s.find_first_not_of(" \t");
    size_t e = s.find_last_not_of(" \t");
    if (b == std::string::npos) throw InputError("empty rational literal");
    s = s.substr(b, e - b + 1);

    bool negative = false;
    if (s[0] == '+' || s[0] == '-') {
        negative = (s[0] == '-');
        s = s.substr(1);
    }
    if (s.empty()) throw InputError("bare sign is not a rational: '" + text + "'");

    auto slash = s.find('/');
    auto point = s.find('.');
    Rat value;
    if (slash != std::string::npos) {
        std::string num = s.substr(0, slash);
        std::string den = s.substr(slash + 1);
        if (!all_digits(num) || !all_digits(den)) {
            throw InputError("malformed rational: '" + text + "'");
        }
        mpz_class d(den);
        if (d == 0) throw InputError("zero denominator: '" + text + "'");
        value = Rat(mpz_class(num), d);
    } else if (point != std::string::npos) {
        std::string whole = s.substr(0, point);
        std::string frac = s.substr(point + 1);
        if (whole.empty()) whole = "0";
        if (!all_digits(whole) || (!frac.empty() && !all_digits(frac))) {
            throw InputError("malformed decimal: '" + text + "'");
        }
        mpz_class scaled(whole + frac);
        mpz_class den = 1;
        for (size_t i = 0; i < frac.size(); ++i) den *= 10;
        value = Rat(scaled, den);
    } else {
        if (!all_digits(s)) throw InputError("malformed rational: '" + text + "'");
        value = Rat(mpz_class(s));
    }
    value.canonicalize();
    if (negative) value = -value;
    return value;
}

std::string format_rational(const Rat& value) {
    Rat v = value;
    v.canonicalize();
    if (v.get_den() == 1) return v.get_num().get_str();
    return v.get_num().get_str() + "/" + v.get_den().get_str();
}

std::string format_vec(const Vec& v) {
    std::ostringstream out;
    out << "(";
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) out << ", ";
        out << format_rational(v[i]);
    }
    out << ")";
    return out.str();
}

Rat dot(const Vec& a, const Vec& b) {
    Rat r = 0;
    for (size_t i = 0; i < a.size(); ++i) r += a[i] * b[i];
    return r;
}

Vec add(const Vec& a, const Vec& b) {
    Vec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

Vec sub(const Vec& a, const Vec& b) {
    Vec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

Vec scale(const Rat& s, const Vec& v) {
    Vec r(v.size());
    for (size_t i = 0; i < v.size(); ++i) r[i] = s * v[i];
    return r;
}

Rat rat_abs(const Rat& x) { return x < 0 ? Rat(-x) : x; }
Rat rat_min(const Rat& a, const Rat& b) { return a < b ? a : b; }
Rat rat_max(const Rat& a, const Rat& b) { return a > b ? a : b; }

Rat linf_dist(const Vec& a, const Vec& b) {
    Rat r = 0;
    for (size_t i = 0; i < a.size(); ++i) r = rat_max(r, rat_abs(a[i] - b[i]));
    return r;
}

Rat l1_dist(const Vec& a, const Vec& b) {
    Rat r = 0;
    for (size_t i = 0; i < a.size(); ++i) r += rat_abs(a[i] - b[i]);
    return r;
}

}  // namespace mpexpr
