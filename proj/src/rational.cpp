#include "genfilt/rational.hpp"

#include <charconv>
#include <limits>
#include <numeric>
#include <ostream>

#include "genfilt/error.hpp"

namespace genfilt {

namespace {

int128_t abs128(int128_t v) { return v < 0 ? -v : v; }

int128_t gcd128(int128_t a, int128_t b) {
    a = abs128(a);
    b = abs128(b);
    while (b != 0) {
        int128_t t = a % b;
        a = b;
        b = t;
    }
    return a;
}

bool fits64(int128_t v) {
    return v >= std::numeric_limits<std::int64_t>::min() && v <= std::numeric_limits<std::int64_t>::max();
}

// Products of two 64-bit values always fit in 128 bits; sums of two such
// products may not, so check before adding.
int128_t add_checked(int128_t a, int128_t b) {
    int128_t out;
    if (__builtin_add_overflow(a, b, &out)) throw OverflowError("rational arithmetic overflow");
    return out;
}

}  // namespace

Rat::Rat(std::int64_t num, std::int64_t den) {
    if (den == 0) throw ParameterError("rational with zero denominator");
    *this = from_wide(num, den);
}

Rat Rat::from_wide(int128_t num, int128_t den) {
    if (den == 0) throw ParameterError("rational with zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    int128_t g = gcd128(num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
    if (!fits64(num) || !fits64(den)) throw OverflowError("rational value exceeds 64-bit range");
    Rat r;
    r.num_ = static_cast<std::int64_t>(num);
    r.den_ = static_cast<std::int64_t>(den);
    return r;
}

Rat Rat::operator-() const { return from_wide(-static_cast<int128_t>(num_), den_); }

Rat& Rat::operator+=(const Rat& o) {
    int128_t n = add_checked(static_cast<int128_t>(num_) * o.den_, static_cast<int128_t>(o.num_) * den_);
    int128_t d = static_cast<int128_t>(den_) * o.den_;
    return *this = from_wide(n, d);
}

Rat& Rat::operator-=(const Rat& o) { return *this += -o; }

Rat& Rat::operator*=(const Rat& o) {
    return *this = from_wide(static_cast<int128_t>(num_) * o.num_, static_cast<int128_t>(den_) * o.den_);
}

Rat& Rat::operator/=(const Rat& o) {
    if (o.num_ == 0) throw ParameterError("rational division by zero");
    return *this = from_wide(static_cast<int128_t>(num_) * o.den_, static_cast<int128_t>(den_) * o.num_);
}

std::strong_ordering operator<=>(const Rat& a, const Rat& b) {
    int128_t lhs = static_cast<int128_t>(a.num_) * b.den_;
    int128_t rhs = static_cast<int128_t>(b.num_) * a.den_;
    return lhs <=> rhs;
}

std::int64_t Rat::floor() const {
    std::int64_t q = num_ / den_;
    if (num_ % den_ != 0 && num_ < 0) --q;
    return q;
}

Rat Rat::mod1() const { return *this - Rat(floor()); }

std::string Rat::str() const { return std::to_string(num_) + "/" + std::to_string(den_); }

Rat Rat::parse(std::string_view text) {
    auto parse_int = [&](std::string_view s) {
        if (!s.empty() && s.front() == '+') s.remove_prefix(1);
        std::int64_t v = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
            throw ParseError("malformed rational '" + std::string(text) + "'");
        return v;
    };
    auto slash = text.find('/');
    if (slash == std::string_view::npos) return Rat(parse_int(text));
    std::int64_t den = parse_int(text.substr(slash + 1));
    if (den == 0) throw ParseError("rational '" + std::string(text) + "' has zero denominator");
    return Rat(parse_int(text.substr(0, slash)), den);
}

std::ostream& operator<<(std::ostream& os, const Rat& r) { return os << r.str(); }

std::int64_t lcm_checked(std::int64_t a, std::int64_t b) {
    if (a == 0 || b == 0) return 0;
    int128_t l = static_cast<int128_t>(a / std::gcd(a, b)) * b;
    l = abs128(l);
    if (!fits64(l)) throw OverflowError("lcm exceeds 64-bit range");
    return static_cast<std::int64_t>(l);
}

}  // namespace genfilt
