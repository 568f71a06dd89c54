#include "structid/rational.hpp"

#include <cctype>

namespace structid {

Rational rational_from_string(const std::string& text) {
    std::string s;
    s.reserve(text.size());
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
    if (s.empty()) throw std::invalid_argument("empty rational literal");

    auto dot = s.find('.');
    if (dot != std::string::npos) {
        bool neg = false;
        std::string t = s;
        if (t[0] == '+' || t[0] == '-') {
            neg = t[0] == '-';
            t = t.substr(1);
            dot -= 1;
        }
        std::string intpart = t.substr(0, dot);
        std::string fracpart = t.substr(dot + 1);
        if (intpart.empty()) intpart = "0";
        if (fracpart.empty()) throw std::invalid_argument("malformed decimal: " + text);
        for (char ch : intpart + fracpart)
            if (!std::isdigit(static_cast<unsigned char>(ch)))
                throw std::invalid_argument("malformed decimal: " + text);
        mpz_class num(intpart + fracpart, 10);
        mpz_class den;
        mpz_ui_pow_ui(den.get_mpz_t(), 10, fracpart.size());
        Rational q(num, den);
        q.canonicalize();
        return neg ? Rational(-q) : q;
    }

    Rational q;
    if (q.set_str(s, 10) != 0) throw std::invalid_argument("malformed rational: " + text);
    q.canonicalize();
    return q;
}

std::string rational_to_string(const Rational& q) { return q.get_str(); }

std::optional<Rational> exact_sqrt(const Rational& q) {
    if (sgn(q) < 0) return std::nullopt;
    const mpz_class& num = q.get_num();
    const mpz_class& den = q.get_den();
    if (!mpz_perfect_square_p(num.get_mpz_t()) || !mpz_perfect_square_p(den.get_mpz_t()))
        return std::nullopt;
    mpz_class rn, rd;
    mpz_sqrt(rn.get_mpz_t(), num.get_mpz_t());
    mpz_sqrt(rd.get_mpz_t(), den.get_mpz_t());
    return Rational(rn, rd);
}

std::optional<long> exact_log10(const Rational& q) {
    if (sgn(q) <= 0) return std::nullopt;
    const mpz_class& num = q.get_num();
    const mpz_class& den = q.get_den();
    auto power_of_ten = [](const mpz_class& z) -> std::optional<long> {
        if (z == 1) return 0;
        mpz_class t = z;
        long k = 0;
        while (mpz_divisible_ui_p(t.get_mpz_t(), 10)) {
            mpz_divexact_ui(t.get_mpz_t(), t.get_mpz_t(), 10);
            ++k;
        }
        if (t == 1) return k;
        return std::nullopt;
    };
    if (den == 1) {
        if (auto k = power_of_ten(num)) return *k;
        return std::nullopt;
    }
    if (num == 1) {
        if (auto k = power_of_ten(den)) return -*k;
        return std::nullopt;
    }
    return std::nullopt;
}

Rational rational_pow(const Rational& q, long e) {
    if (e == 0) return Rational(1);
    bool invert = e < 0;
    unsigned long mag = invert ? static_cast<unsigned long>(-(e + 1)) + 1UL : static_cast<unsigned long>(e);
    if (invert && sgn(q) == 0) throw std::domain_error("0 raised to a negative power");
    Rational r;
    mpz_pow_ui(r.get_num_mpz_t(), q.get_num_mpz_t(), mag);
    mpz_pow_ui(r.get_den_mpz_t(), q.get_den_mpz_t(), mag);
    r.canonicalize();
    if (invert) return Rational(1) / r;
    return r;
}

uint64_t rational_hash(const Rational& q) {
    auto mix = [](uint64_t h, uint64_t v) {
        h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        return h;
    };
    uint64_t h = 0x243f6a8885a308d3ULL;
    const mpz_class& num = q.get_num();
    const mpz_class& den = q.get_den();
    h = mix(h, static_cast<uint64_t>(mpz_sgn(num.get_mpz_t()) + 2));
    for (size_t i = 0; i < mpz_size(num.get_mpz_t()); ++i)
        h = mix(h, static_cast<uint64_t>(mpz_getlimbn(num.get_mpz_t(), i)));
    for (size_t i = 0; i < mpz_size(den.get_mpz_t()); ++i)
        h = mix(h, static_cast<uint64_t>(mpz_getlimbn(den.get_mpz_t(), i)));
    return h;
}

double to_double(const Rational& q) { return q.get_d(); }

} // namespace structid
