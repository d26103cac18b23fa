#include "nilflux/rational.hpp"
#include "nilflux/errors.hpp"

namespace nilflux {

Rational make_rational(const Integer& p, const Integer& q) {
    if (q == 0) throw ParseError("zero denominator");
    return Rational(p) / Rational(q);
}

namespace {

Integer parse_integer(const std::string& text) {
    if (text.empty()) throw ParseError("empty integer");
    std::size_t start = (text[0] == '-' || text[0] == '+') ? 1 : 0;
    if (start == text.size()) throw ParseError("bare sign in '" + text + "'");
    for (std::size_t i = start; i < text.size(); ++i)
        if (text[i] < '0' || text[i] > '9')
            throw ParseError("non-integer character in '" + text + "'");
    return Integer(text);
}

} // namespace

Rational parse_rational(const std::string& text) {
    auto slash = text.find('/');
    if (slash == std::string::npos) return Rational(parse_integer(text));
    Integer p = parse_integer(text.substr(0, slash));
    Integer q = parse_integer(text.substr(slash + 1));
    if (q == 0) throw ParseError("zero denominator in '" + text + "'");
    return make_rational(p, q);
}

std::string rational_to_string(const Rational& r) {
    if (denominator(r) == 1) return numerator(r).str();
    return numerator(r).str() + "/" + denominator(r).str();
}

bool is_integer(const Rational& r) { return denominator(r) == 1; }

Integer floor_int(const Rational& r) {
    Integer n = numerator(r), d = denominator(r);
    Integer q = n / d; // truncates toward zero
    if (n < 0 && q * d != n) q -= 1;
    return q;
}

Integer ceil_int(const Rational& r) {
    Integer n = numerator(r), d = denominator(r);
    Integer q = n / d;
    if (n > 0 && q * d != n) q += 1;
    return q;
}

int compare_vectors(const std::vector<Rational>& a, const std::vector<Rational>& b) {
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] < b[i]) return -1;
        if (a[i] > b[i]) return 1;
    }
    return 0;
}

} // namespace nilflux
