#pragma once

#include <string>
#include <utility>
#include <vector>

#include "genfilt/rational.hpp"

namespace genfilt {

/// Half-open arc [lo, hi) with 0 <= lo < hi <= 1.
struct Interval {
    Rat lo;
    Rat hi;

    friend bool operator==(const Interval&, const Interval&) = default;
};

/// Finite union of half-open arcs of the circle R/Z, held in canonical form:
/// pieces lie in [0, 1), are sorted, pairwise disjoint and never touch (touching
/// pieces are merged). Two sets are equal iff their representations are equal.
class IntervalSet {
public:
    IntervalSet() = default;

    static IntervalSet empty() { return {}; }
    static IntervalSet full();

    /// Builds a set from arbitrary real-line intervals [a, b) with a <= b.
    /// Each interval is reduced mod 1 (wrapping at 0 when needed); an interval
    /// of length >= 1 covers the whole circle.
    static IntervalSet from_intervals(const std::vector<std::pair<Rat, Rat>>& pieces);
    static IntervalSet interval(const Rat& a, const Rat& b) { return from_intervals({{a, b}}); }

    const std::vector<Interval>& pieces() const { return pieces_; }
    bool is_empty() const { return pieces_.empty(); }
    bool is_full() const;

    /// Membership of x mod 1.
    bool contains(const Rat& x) const;
    Rat measure() const;

    IntervalSet unite(const IntervalSet& o) const;
    IntervalSet intersect(const IntervalSet& o) const;
    IntervalSet complement() const;
    IntervalSet minus(const IntervalSet& o) const { return intersect(o.complement()); }
    bool subset_of(const IntervalSet& o) const { return minus(o).is_empty(); }

    /// Re-normalizes; a no-op on any constructed set.
    IntervalSet normalized() const { return canonical(pieces_); }

    std::string str() const;

    friend bool operator==(const IntervalSet&, const IntervalSet&) = default;

private:
    static IntervalSet canonical(std::vector<Interval> raw);

    std::vector<Interval> pieces_;
};

}  // namespace genfilt
