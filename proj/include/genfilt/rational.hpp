#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

namespace genfilt {

__extension__ typedef __int128 int128_t;

/// Exact rational number p/q, always reduced with q > 0.
///
/// Storage is 64-bit; every intermediate is computed in 128 bits and the
/// result is checked, so an operation either is exact or throws
/// OverflowError. Grid denominators are of the form L*N^K and stay far below
/// the limit at the resolutions this library targets.
class Rat {
public:
    constexpr Rat() = default;
    Rat(std::int64_t num) : num_(num), den_(1) {}  // NOLINT(google-explicit-constructor)
    Rat(std::int64_t num, std::int64_t den);

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    Rat operator-() const;
    Rat& operator+=(const Rat& o);
    Rat& operator-=(const Rat& o);
    Rat& operator*=(const Rat& o);
    Rat& operator/=(const Rat& o);

    friend Rat operator+(Rat a, const Rat& b) { return a += b; }
    friend Rat operator-(Rat a, const Rat& b) { return a -= b; }
    friend Rat operator*(Rat a, const Rat& b) { return a *= b; }
    friend Rat operator/(Rat a, const Rat& b) { return a /= b; }

    friend bool operator==(const Rat& a, const Rat& b) = default;
    friend std::strong_ordering operator<=>(const Rat& a, const Rat& b);

    /// Largest integer <= value.
    std::int64_t floor() const;
    /// Representative in [0, 1).
    Rat mod1() const;
    bool is_integer() const { return den_ == 1; }

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    /// "p/q" with q > 0; integers still carry "/1".
    std::string str() const;
    /// Accepts "p/q" or "p" (optionally signed).
    static Rat parse(std::string_view text);

private:
    static Rat from_wide(int128_t num, int128_t den);

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

std::ostream& operator<<(std::ostream& os, const Rat& r);

std::int64_t lcm_checked(std::int64_t a, std::int64_t b);

}  // namespace genfilt
