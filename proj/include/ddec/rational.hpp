#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ddec {

// Exact rational quantity (utils, contributions, probabilities).
//
// Text form: integers ("-60"), terminating decimals ("0.4", "3.4") and
// fractions ("1/3"). Rendering picks the decimal form whenever the reduced
// denominator has no prime factors other than 2 and 5, and "p/q" otherwise,
// so a value always renders the same way regardless of how it was written.
class Rational {
public:
    using Value = boost::multiprecision::cpp_rational;

    Rational() = default;
    Rational(long long n) : value_(n) {}  // NOLINT(google-explicit-constructor)
    Rational(long long num, long long den);
    explicit Rational(Value v) : value_(std::move(v)) {}

    static Rational parse(std::string_view text);

    std::string to_string() const;

    const Value& value() const { return value_; }
    bool is_zero() const { return value_ == 0; }
    int sign() const { return value_.sign(); }

    Rational operator-() const { return Rational(Value(-value_)); }
    friend Rational operator+(const Rational& a, const Rational& b) { return Rational(Value(a.value_ + b.value_)); }
    friend Rational operator-(const Rational& a, const Rational& b) { return Rational(Value(a.value_ - b.value_)); }
    friend Rational operator*(const Rational& a, const Rational& b) { return Rational(Value(a.value_ * b.value_)); }
    friend Rational operator/(const Rational& a, const Rational& b);

    friend bool operator==(const Rational& a, const Rational& b) { return a.value_ == b.value_; }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b)
    {
        // Denominators are positive, so cross-multiplying keeps the order.
        using boost::multiprecision::denominator;
        using boost::multiprecision::numerator;
        const auto& da = denominator(a.value_);
        const auto& db = denominator(b.value_);
        int c = da == db ? numerator(a.value_).compare(numerator(b.value_))
                         : boost::multiprecision::cpp_int(numerator(a.value_) * db).compare(numerator(b.value_) * da);
        return c < 0 ? std::strong_ordering::less : c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
    }

private:
    Value value_{0};
};

class RationalParseError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace ddec
