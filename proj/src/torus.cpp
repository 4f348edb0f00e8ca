#include "genfilt/torus.hpp"

#include <limits>
#include <string>

#include "genfilt/error.hpp"

namespace genfilt {

namespace {

std::int64_t checked_pow(std::int64_t base, int exp) {
    std::int64_t out = 1;
    for (int k = 0; k < exp; ++k) {
        if (__builtin_mul_overflow(out, base, &out)) throw OverflowError("N^K overflows 64 bits");
    }
    return out;
}

}  // namespace

GridSpec::GridSpec(int n, std::int64_t l, int k) : scale_N(n), base_L(l), depth_K(k) {
    if (n < 2) throw ParameterError("scale N must be >= 2, got " + std::to_string(n));
    if (l < 1) throw ParameterError("base L must be positive, got " + std::to_string(l));
    if (k < 0) throw ParameterError("depth K must be nonnegative, got " + std::to_string(k));
    (void)cell_count();
}

std::int64_t GridSpec::cell_count() const {
    std::int64_t m;
    if (__builtin_mul_overflow(base_L, checked_pow(scale_N, depth_K), &m))
        throw OverflowError("cell count overflows 64 bits");
    return m;
}

GridSpec GridSpec::coarser() const {
    if (depth_K < 1) throw ResolutionError("grid at depth 0 has no coarser level");
    return GridSpec(scale_N, base_L, depth_K - 1);
}

std::int64_t GridSpec::cell_of(const TorusRat& x) const {
    return (x.value() * Rat(cell_count())).floor();
}

TorusRat alpha_star(const TorusRat& x, int N) {
    if (N < 2) throw ParameterError("alpha_star needs N >= 2");
    return TorusRat(x.value() * Rat(N));
}

std::vector<TorusRat> kernel_points(int N, int n) {
    if (N < 2 || n < 1) throw ParameterError("kernel_points needs N >= 2 and n >= 1");
    std::int64_t count = checked_pow(N, n);
    std::vector<TorusRat> out;
    out.reserve(static_cast<std::size_t>(count));
    for (std::int64_t k = 0; k < count; ++k) out.emplace_back(Rat(k, count));
    return out;
}

IntervalSet image_under_alpha_star(const IntervalSet& S, int N) {
    std::vector<std::pair<Rat, Rat>> pieces;
    for (const auto& iv : S.pieces()) pieces.emplace_back(iv.lo * Rat(N), iv.hi * Rat(N));
    return IntervalSet::from_intervals(pieces);
}

IntervalSet preimage_under_alpha_star(const IntervalSet& S, int N) {
    std::vector<std::pair<Rat, Rat>> pieces;
    for (int k = 0; k < N; ++k) {
        for (const auto& iv : S.pieces()) pieces.emplace_back((iv.lo + Rat(k)) / Rat(N), (iv.hi + Rat(k)) / Rat(N));
    }
    return IntervalSet::from_intervals(pieces);
}

bool aligns_with_grid(const IntervalSet& S, std::int64_t cell_count) {
    for (const auto& iv : S.pieces()) {
        if (!(iv.lo * Rat(cell_count)).is_integer() || !(iv.hi * Rat(cell_count)).is_integer()) return false;
    }
    return true;
}

bool aligns_with_grid(const IntervalSet& S, const GridSpec& G) { return aligns_with_grid(S, G.cell_count()); }

SigmaChain::SigmaChain(std::vector<IntervalSet> sigmas) : sigmas_(std::move(sigmas)) {
    if (sigmas_.empty()) throw ParameterError("multiplicity chain must have at least one set");
    if (sigmas_.front().is_empty()) throw ParameterError("sigma_1 is empty");
    for (std::size_t i = 1; i < sigmas_.size(); ++i) {
        if (!sigmas_[i].subset_of(sigmas_[i - 1]))
            throw ParameterError("sigma_" + std::to_string(i + 1) + " is not contained in sigma_" + std::to_string(i));
    }
}

SigmaChain SigmaChain::constant(int c) {
    return SigmaChain(std::vector<IntervalSet>(static_cast<std::size_t>(c), IntervalSet::full()));
}

int SigmaChain::multiplicity(const Rat& x) const {
    int m = 0;
    for (const auto& s : sigmas_) m += s.contains(x) ? 1 : 0;
    return m;
}

bool SigmaChain::aligns_with_grid(std::int64_t cell_count) const {
    for (const auto& s : sigmas_) {
        if (!genfilt::aligns_with_grid(s, cell_count)) return false;
    }
    return true;
}

}  // namespace genfilt
