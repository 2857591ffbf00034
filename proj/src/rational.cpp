#include "ddec/rational.hpp"

#include <cctype>

namespace ddec {

namespace mp = boost::multiprecision;
using Int = mp::cpp_int;

Rational::Rational(long long num, long long den)
{
    if (den == 0) throw std::domain_error("rational with zero denominator");
    value_ = Value(Int(num), Int(den));
}

Rational operator/(const Rational& a, const Rational& b)
{
    if (b.is_zero()) throw std::domain_error("division by zero");
    return Rational(Rational::Value(a.value_ / b.value_));
}

namespace {

Int parse_digits(std::string_view digits, std::string_view whole)
{
    if (digits.empty()) throw RationalParseError("malformed number '" + std::string(whole) + "'");
    Int out = 0;
    for (char c : digits) {
        if (!std::isdigit(static_cast<unsigned char>(c)))
            throw RationalParseError("malformed number '" + std::string(whole) + "'");
        out = out * 10 + (c - '0');
    }
    return out;
}

}  // namespace

Rational Rational::parse(std::string_view text)
{
    std::string_view s = text;
    bool negative = false;
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    Value v;
    if (auto slash = s.find('/'); slash != std::string_view::npos) {
        Int num = parse_digits(s.substr(0, slash), text);
        Int den = parse_digits(s.substr(slash + 1), text);
        if (den == 0) throw RationalParseError("zero denominator in '" + std::string(text) + "'");
        v = Value(num, den);
    } else if (auto dot = s.find('.'); dot != std::string_view::npos) {
        Int whole = parse_digits(s.substr(0, dot), text);
        std::string_view frac = s.substr(dot + 1);
        Int fnum = parse_digits(frac, text);
        Int scale = 1;
        for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
        v = Value(whole * scale + fnum, scale);
    } else {
        v = Value(parse_digits(s, text));
    }
    if (negative) v = -v;
    return Rational(std::move(v));
}

std::string Rational::to_string() const
{
    Int num = mp::numerator(value_);
    Int den = mp::denominator(value_);
    if (den == 1) return num.str();

    Int d = den;
    unsigned twos = 0, fives = 0;
    while (d % 2 == 0) { d /= 2; ++twos; }
    while (d % 5 == 0) { d /= 5; ++fives; }
    if (d != 1) return num.str() + "/" + den.str();

    unsigned places = std::max(twos, fives);
    Int scale = 1;
    for (unsigned i = 0; i < places; ++i) scale *= 10;
    Int scaled = num * (scale / den);
    bool negative = scaled < 0;
    if (negative) scaled = -scaled;
    std::string digits = scaled.str();
    if (digits.size() <= places) digits.insert(0, places - digits.size() + 1, '0');
    digits.insert(digits.size() - places, ".");
    return negative ? "-" + digits : digits;
}

}  // namespace ddec
