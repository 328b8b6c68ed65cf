#include "toricflow/scalar.hpp"

#include <cctype>

namespace toricflow {

namespace {

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

Integer parse_integer(std::string_view s, std::string_view whole) {
    bool negative = false;
    if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    if (!all_digits(s)) throw ParseError("not an exact rational: '" + std::string(whole) + "'");
    Integer z{std::string(s)};
    return negative ? Integer(-z) : z;
}

Integer pow10(long e) {
    Integer p(1);
    for (long i = 0; i < e; ++i) p *= 10;
    return p;
}

}  // namespace

Rational parse_rational(std::string_view text) {
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
    const std::string_view whole = text;
    if (text.empty()) throw ParseError("empty rational literal");

    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        Integer num = parse_integer(text.substr(0, slash), whole);
        std::string_view den_text = text.substr(slash + 1);
        if (!all_digits(den_text)) throw ParseError("not an exact rational: '" + std::string(whole) + "'");
        Integer den(std::string{den_text});
        if (den == 0) throw ParseError("zero denominator in '" + std::string(whole) + "'");
        return Rational(num, den);
    }

    // decimal with optional exponent
    long exponent = 0;
    if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
        std::string_view exp_text = text.substr(e + 1);
        bool neg = false;
        if (!exp_text.empty() && (exp_text.front() == '+' || exp_text.front() == '-')) {
            neg = exp_text.front() == '-';
            exp_text.remove_prefix(1);
        }
        if (!all_digits(exp_text) || exp_text.size() > 6)
            throw ParseError("not an exact rational: '" + std::string(whole) + "'");
        exponent = std::stol(std::string(exp_text));
        if (neg) exponent = -exponent;
        text = text.substr(0, e);
    }
    bool negative = false;
    if (!text.empty() && (text.front() == '+' || text.front() == '-')) {
        negative = text.front() == '-';
        text.remove_prefix(1);
    }
    std::string digits;
    long frac_digits = 0;
    if (auto dot = text.find('.'); dot != std::string_view::npos) {
        std::string_view ip = text.substr(0, dot), fp = text.substr(dot + 1);
        if ((!ip.empty() && !all_digits(ip)) || (!fp.empty() && !all_digits(fp)) || (ip.empty() && fp.empty()))
            throw ParseError("not an exact rational: '" + std::string(whole) + "'");
        digits = std::string(ip) + std::string(fp);
        frac_digits = static_cast<long>(fp.size());
    } else {
        if (!all_digits(text)) throw ParseError("not an exact rational: '" + std::string(whole) + "'");
        digits = std::string(text);
    }
    Rational q{Integer(digits)};
    const long shift = exponent - frac_digits;
    if (shift >= 0) q *= Rational(pow10(shift));
    else q /= Rational(pow10(-shift));
    return negative ? Rational(-q) : q;
}

std::string to_string(const Integer& z) { return z.str(); }

std::string to_string(const Rational& q) {
    const Integer den = boost::multiprecision::denominator(q);
    if (den == 1) return boost::multiprecision::numerator(q).str();
    return boost::multiprecision::numerator(q).str() + "/" + den.str();
}

std::string tau_to_t_string(const Rational& tau) {
    const Rational half = tau / 2;
    if (half == 0) return "0";
    const Integer num = boost::multiprecision::numerator(half);
    const Integer den = boost::multiprecision::denominator(half);
    if (den == 1) return num.str() + "/pi";
    return num.str() + "/(" + den.str() + "*pi)";
}

double to_double(const Rational& q) { return q.convert_to<double>(); }

}  // namespace toricflow
