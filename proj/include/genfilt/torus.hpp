#pragma once

#include <cstdint>
#include <vector>

#include "genfilt/interval_set.hpp"
#include "genfilt/rational.hpp"

namespace genfilt {

/// A point of the circle, represented by its coordinate in [0, 1).
class TorusRat {
public:
    TorusRat() = default;
    TorusRat(const Rat& x) : value_(x.mod1()) {}  // NOLINT(google-explicit-constructor)

    const Rat& value() const { return value_; }

    friend bool operator==(const TorusRat&, const TorusRat&) = default;
    friend auto operator<=>(const TorusRat& a, const TorusRat& b) { return a.value_ <=> b.value_; }

private:
    Rat value_;
};

/// Uniform grid of M = L * N^K cells [t/M, (t+1)/M) on the circle.
///
/// Going one level coarser divides M by N; the dual endomorphism x -> N x
/// maps each cell of this grid onto exactly one cell of the coarser grid.
struct GridSpec {
    int scale_N = 2;
    std::int64_t base_L = 1;
    int depth_K = 0;

    GridSpec() = default;
    GridSpec(int n, std::int64_t l, int k);

    std::int64_t cell_count() const;
    GridSpec coarser() const;
    GridSpec finer() const { return GridSpec(scale_N, base_L, depth_K + 1); }
    GridSpec at_depth(int k) const { return GridSpec(scale_N, base_L, k); }

    /// Index of the cell containing x.
    std::int64_t cell_of(const TorusRat& x) const;
    Rat left_endpoint(std::int64_t t) const { return Rat(t, cell_count()); }

    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// x -> N x mod 1.
TorusRat alpha_star(const TorusRat& x, int N);

/// The N^n points k / N^n, 0 <= k < N^n, in increasing order.
std::vector<TorusRat> kernel_points(int N, int n);

/// {N x mod 1 : x in S}.
IntervalSet image_under_alpha_star(const IntervalSet& S, int N);

/// {x : N x mod 1 in S}: N shrunken translated copies of S.
IntervalSet preimage_under_alpha_star(const IntervalSet& S, int N);

inline Rat measure(const IntervalSet& S) { return S.measure(); }

/// True iff every endpoint of S is a multiple of 1/M.
bool aligns_with_grid(const IntervalSet& S, const GridSpec& G);
bool aligns_with_grid(const IntervalSet& S, std::int64_t cell_count);

/// Nested sets sigma_1 >= sigma_2 >= ... >= sigma_c encoding the
/// multiplicity function m(x) = #{i : x in sigma_i}.
class SigmaChain {
public:
    SigmaChain() = default;
    /// Throws ParameterError unless c >= 1, sigma_1 is nonempty and the chain is nested.
    explicit SigmaChain(std::vector<IntervalSet> sigmas);

    static SigmaChain constant(int c);

    int size() const { return static_cast<int>(sigmas_.size()); }
    const IntervalSet& operator[](int i) const { return sigmas_[static_cast<std::size_t>(i)]; }
    const std::vector<IntervalSet>& sets() const { return sigmas_; }

    int multiplicity(const Rat& x) const;
    bool aligns_with_grid(std::int64_t cell_count) const;

    friend bool operator==(const SigmaChain&, const SigmaChain&) = default;

private:
    std::vector<IntervalSet> sigmas_;
};

}  // namespace genfilt
