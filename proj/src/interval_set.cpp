#include "genfilt/interval_set.hpp"

#include <algorithm>
#include <sstream>

#include "genfilt/error.hpp"

namespace genfilt {

IntervalSet IntervalSet::full() {
    IntervalSet s;
    s.pieces_.push_back({Rat(0), Rat(1)});
    return s;
}

IntervalSet IntervalSet::from_intervals(const std::vector<std::pair<Rat, Rat>>& pieces) {
    std::vector<Interval> raw;
    for (const auto& [a, b] : pieces) {
        if (b < a) throw ParameterError("interval [" + a.str() + ", " + b.str() + ") has hi < lo");
        if (a == b) continue;
        if (b - a >= Rat(1)) return full();
        Rat lo = a.mod1();
        Rat hi = lo + (b - a);
        if (hi <= Rat(1)) {
            raw.push_back({lo, hi});
        } else {
            raw.push_back({lo, Rat(1)});
            raw.push_back({Rat(0), hi - Rat(1)});
        }
    }
    return canonical(std::move(raw));
}

IntervalSet IntervalSet::canonical(std::vector<Interval> raw) {
    std::erase_if(raw, [](const Interval& iv) { return !(iv.lo < iv.hi); });
    std::sort(raw.begin(), raw.end(), [](const Interval& x, const Interval& y) {
        if (x.lo != y.lo) return x.lo < y.lo;
        return x.hi < y.hi;
    });
    IntervalSet out;
    for (const auto& iv : raw) {
        if (!out.pieces_.empty() && iv.lo <= out.pieces_.back().hi) {
            if (iv.hi > out.pieces_.back().hi) out.pieces_.back().hi = iv.hi;
        } else {
            out.pieces_.push_back(iv);
        }
    }
    return out;
}

bool IntervalSet::is_full() const {
    return pieces_.size() == 1 && pieces_[0].lo == Rat(0) && pieces_[0].hi == Rat(1);
}

bool IntervalSet::contains(const Rat& x) const {
    Rat y = x.mod1();
    for (const auto& iv : pieces_) {
        if (y < iv.lo) return false;
        if (y < iv.hi) return true;
    }
    return false;
}

Rat IntervalSet::measure() const {
    Rat total(0);
    for (const auto& iv : pieces_) total += iv.hi - iv.lo;
    return total;
}

IntervalSet IntervalSet::unite(const IntervalSet& o) const {
    std::vector<Interval> raw = pieces_;
    raw.insert(raw.end(), o.pieces_.begin(), o.pieces_.end());
    return canonical(std::move(raw));
}

IntervalSet IntervalSet::intersect(const IntervalSet& o) const {
    std::vector<Interval> raw;
    std::size_t i = 0, j = 0;
    while (i < pieces_.size() && j < o.pieces_.size()) {
        const auto& a = pieces_[i];
        const auto& b = o.pieces_[j];
        Rat lo = std::max(a.lo, b.lo);
        Rat hi = std::min(a.hi, b.hi);
        if (lo < hi) raw.push_back({lo, hi});
        if (a.hi < b.hi) ++i; else ++j;
    }
    return canonical(std::move(raw));
}

IntervalSet IntervalSet::complement() const {
    std::vector<Interval> raw;
    Rat cursor(0);
    for (const auto& iv : pieces_) {
        if (cursor < iv.lo) raw.push_back({cursor, iv.lo});
        cursor = iv.hi;
    }
    if (cursor < Rat(1)) raw.push_back({cursor, Rat(1)});
    return canonical(std::move(raw));
}

std::string IntervalSet::str() const {
    if (pieces_.empty()) return "{}";
    std::ostringstream os;
    for (std::size_t k = 0; k < pieces_.size(); ++k) {
        if (k) os << " u ";
        os << '[' << pieces_[k].lo << ", " << pieces_[k].hi << ')';
    }
    return os.str();
}

}  // namespace genfilt
