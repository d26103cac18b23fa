#include "nilflux/poly.hpp"
#include "nilflux/errors.hpp"

#include <algorithm>
#include <sstream>

namespace nilflux {

PolyScalar::PolyScalar(const Rational& c) {
    if (c != 0) terms_[Monomial{}] = c;
}

PolyScalar PolyScalar::variable(const std::string& name) {
    PolyScalar p;
    p.terms_[Monomial{{name, 1}}] = 1;
    return p;
}

PolyScalar PolyScalar::monomial(const Monomial& m, const Rational& c) {
    PolyScalar p;
    if (c != 0) {
        for (const auto& [var, e] : m)
            if (e < 0) throw ParseError("negative exponent for " + var);
        Monomial clean;
        for (const auto& [var, e] : m)
            if (e > 0) clean[var] = e;
        p.terms_[clean] = c;
    }
    return p;
}

bool PolyScalar::is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
}

bool PolyScalar::is_constant_in(const std::vector<std::string>& vars) const {
    for (const auto& [m, c] : terms_)
        for (const auto& var : vars)
            if (m.count(var)) return false;
    return true;
}

bool PolyScalar::depends_on(const std::string& var) const {
    for (const auto& [m, c] : terms_)
        if (m.count(var)) return true;
    return false;
}

Rational PolyScalar::constant_value() const {
    if (terms_.empty()) return Rational(0);
    if (!is_constant()) throw NotHomogeneous("polynomial is not constant: " + str());
    return terms_.begin()->second;
}

Rational PolyScalar::coefficient(const Monomial& m) const {
    Monomial clean;
    for (const auto& [var, e] : m)
        if (e > 0) clean[var] = e;
    auto it = terms_.find(clean);
    return it == terms_.end() ? Rational(0) : it->second;
}

int PolyScalar::degree_in(const std::string& var) const {
    int d = 0;
    for (const auto& [m, c] : terms_) {
        auto it = m.find(var);
        if (it != m.end()) d = std::max(d, it->second);
    }
    return d;
}

int PolyScalar::total_degree_in(const std::vector<std::string>& vars) const {
    int d = 0;
    for (const auto& [m, c] : terms_) {
        int td = 0;
        for (const auto& var : vars) {
            auto it = m.find(var);
            if (it != m.end()) td += it->second;
        }
        d = std::max(d, td);
    }
    return d;
}

PolyScalar PolyScalar::operator-() const {
    PolyScalar p;
    for (const auto& [m, c] : terms_) p.terms_[m] = -c;
    return p;
}

PolyScalar& PolyScalar::operator+=(const PolyScalar& rhs) {
    for (const auto& [m, c] : rhs.terms_) {
        auto [it, inserted] = terms_.try_emplace(m, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }
    return *this;
}

PolyScalar& PolyScalar::operator-=(const PolyScalar& rhs) { return *this += -rhs; }

PolyScalar operator*(const PolyScalar& a, const PolyScalar& b) {
    PolyScalar p;
    for (const auto& [ma, ca] : a.terms_)
        for (const auto& [mb, cb] : b.terms_) {
            Monomial m = ma;
            for (const auto& [var, e] : mb) m[var] += e;
            auto [it, inserted] = p.terms_.try_emplace(m, ca * cb);
            if (!inserted) it->second += ca * cb;
        }
    p.prune();
    return p;
}

PolyScalar PolyScalar::operator*(const Rational& c) const {
    PolyScalar p;
    if (c == 0) return p;
    for (const auto& [m, coeff] : terms_) p.terms_[m] = coeff * c;
    return p;
}

PolyScalar PolyScalar::pow(int exponent) const {
    if (exponent < 0) throw ParseError("negative power of a polynomial");
    PolyScalar result(Rational(1));
    for (int i = 0; i < exponent; ++i) result = result * *this;
    return result;
}

PolyScalar PolyScalar::substitute(const std::map<std::string, PolyScalar>& assignment) const {
    PolyScalar result;
    for (const auto& [m, c] : terms_) {
        PolyScalar term(c);
        for (const auto& [var, e] : m) {
            auto it = assignment.find(var);
            if (it == assignment.end())
                term = term * PolyScalar::variable(var).pow(e);
            else
                term = term * it->second.pow(e);
        }
        result += term;
    }
    return result;
}

PolyScalar PolyScalar::derivative(const std::string& var) const {
    PolyScalar result;
    for (const auto& [m, c] : terms_) {
        auto it = m.find(var);
        if (it == m.end()) continue;
        Monomial dm = m;
        int e = it->second;
        if (e == 1) dm.erase(var); else dm[var] = e - 1;
        result += PolyScalar::monomial(dm, c * e);
    }
    return result;
}

PolyScalar PolyScalar::integrate_unit(const std::string& var) const {
    // int_0^1 c * var^e dvar = c / (e + 1); other factors pass through.
    PolyScalar result;
    for (const auto& [m, c] : terms_) {
        Monomial im = m;
        int e = 0;
        auto it = im.find(var);
        if (it != im.end()) { e = it->second; im.erase(it); }
        result += PolyScalar::monomial(im, c / Rational(e + 1));
    }
    return result;
}

bool PolyScalar::affine_decompose(const std::vector<std::string>& vars,
                                  Rational& constant_out,
                                  std::vector<Rational>& coeffs_out) const {
    constant_out = 0;
    coeffs_out.assign(vars.size(), Rational(0));
    for (const auto& [m, c] : terms_) {
        if (m.empty()) { constant_out = c; continue; }
        if (m.size() != 1 || m.begin()->second != 1) return false;
        auto pos = std::find(vars.begin(), vars.end(), m.begin()->first);
        if (pos == vars.end()) return false;
        coeffs_out[static_cast<std::size_t>(pos - vars.begin())] = c;
    }
    return true;
}

void PolyScalar::prune() {
    for (auto it = terms_.begin(); it != terms_.end();)
        it = (it->second == 0) ? terms_.erase(it) : std::next(it);
}

std::string PolyScalar::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream out;
    bool first = true;
    for (const auto& [m, c] : terms_) {
        Rational a = c;
        if (first) {
            if (a < 0) { out << "-"; a = -a; }
        } else {
            out << (a < 0 ? " - " : " + ");
            if (a < 0) a = -a;
        }
        first = false;
        bool coeff_printed = false;
        if (a != 1 || m.empty()) { out << rational_to_string(a); coeff_printed = true; }
        bool first_var = true;
        for (const auto& [var, e] : m) {
            if (coeff_printed || !first_var) out << "*";
            out << var;
            if (e > 1) out << "^" << e;
            first_var = false;
            coeff_printed = true;
        }
    }
    return out.str();
}

} // namespace nilflux
