#include "genfilt/filter.hpp"

#include <string>

#include "genfilt/error.hpp"
#include "genfilt/parallel.hpp"

namespace genfilt {

namespace {

unsigned g_threads = 1;

}  // namespace

unsigned thread_count() { return g_threads; }
void set_thread_count(unsigned n) { g_threads = n == 0 ? 1 : n; }

StepFn::StepFn(GridSpec grid, Complex fill)
    : grid_(grid), samples_(static_cast<std::size_t>(grid.cell_count()), fill) {}

StepFn::StepFn(GridSpec grid, std::vector<Complex> samples) : grid_(grid), samples_(std::move(samples)) {
    if (static_cast<std::int64_t>(samples_.size()) != grid_.cell_count())
        throw GridMismatch("step function has " + std::to_string(samples_.size()) + " samples, grid needs " +
                           std::to_string(grid_.cell_count()));
}

IntervalSet StepFn::support() const {
    std::vector<std::pair<Rat, Rat>> cells;
    const std::int64_t m = size();
    for (std::int64_t t = 0; t < m; ++t) {
        if ((*this)[t] != Complex(0.0)) cells.emplace_back(Rat(t, m), Rat(t + 1, m));
    }
    return IntervalSet::from_intervals(cells);
}

StepFn StepFn::refine() const {
    const int n = grid_.scale_N;
    std::vector<Complex> out;
    out.reserve(samples_.size() * static_cast<std::size_t>(n));
    for (const auto& v : samples_) out.insert(out.end(), static_cast<std::size_t>(n), v);
    return StepFn(grid_.finer(), std::move(out));
}

bool StepFn::constant_on_coarse_cells() const {
    if (grid_.depth_K < 1) return false;
    const int n = grid_.scale_N;
    for (std::int64_t t = 0; t < size(); ++t) {
        if ((*this)[t] != (*this)[t - t % n]) return false;
    }
    return true;
}

std::vector<char> cell_mask(const IntervalSet& S, const GridSpec& grid) {
    if (!aligns_with_grid(S, grid))
        throw AlignmentError("set " + S.str() + " is not aligned with a grid of " + std::to_string(grid.cell_count()) +
                             " cells");
    const std::int64_t m = grid.cell_count();
    std::vector<char> mask(static_cast<std::size_t>(m), 0);
    for (const auto& iv : S.pieces()) {
        const std::int64_t lo = (iv.lo * Rat(m)).floor();
        const std::int64_t hi = (iv.hi * Rat(m)).floor();
        for (std::int64_t t = lo; t < hi; ++t) mask[static_cast<std::size_t>(t)] = 1;
    }
    return mask;
}

FilterMatrix::FilterMatrix(SigmaChain chain, GridSpec grid, std::vector<StepFn> entries)
    : chain_(std::move(chain)), grid_(grid), entries_(std::move(entries)) {
    const int c = chain_.size();
    if (grid_.depth_K < 1) throw ResolutionError("filter grid needs depth K >= 1");
    if (entries_.size() != static_cast<std::size_t>(c) * static_cast<std::size_t>(c))
        throw ParameterError("filter needs " + std::to_string(c * c) + " entries, got " +
                             std::to_string(entries_.size()));
    for (const auto& e : entries_) {
        if (!(e.grid() == grid_)) throw GridMismatch("filter entries must share one grid");
    }
    const GridSpec coarse = grid_.coarser();
    for (int i = 0; i < c; ++i) {
        if (!aligns_with_grid(chain_[i], coarse))
            throw AlignmentError("sigma_" + std::to_string(i + 1) + " = " + chain_[i].str() +
                                 " is not aligned with the coarse grid of " + std::to_string(coarse.cell_count()) +
                                 " cells");
        fine_masks_.push_back(cell_mask(chain_[i], grid_));
        coarse_masks_.push_back(cell_mask(chain_[i], coarse));
    }
    const std::int64_t m = grid_.cell_count();
    for (int i = 0; i < c; ++i) {
        for (int j = 0; j < c; ++j) {
            const auto& mask = fine_masks_[static_cast<std::size_t>(j)];
            for (std::int64_t t = 0; t < m; ++t) {
                if (!mask[static_cast<std::size_t>(t)] && (*this)(i, j, t) != Complex(0.0))
                    throw ParameterError("h_" + std::to_string(i + 1) + std::to_string(j + 1) +
                                         " is nonzero at cell " + std::to_string(t) + " outside sigma_" +
                                         std::to_string(j + 1));
            }
        }
    }
}

Eigen::MatrixXcd FilterMatrix::matrix_at(std::int64_t t) const {
    const int c = size();
    Eigen::MatrixXcd out(c, c);
    for (int i = 0; i < c; ++i)
        for (int j = 0; j < c; ++j) out(i, j) = (*this)(i, j, t);
    return out;
}

FilterMatrix FilterMatrix::with_sample(int i, int j, std::int64_t t, Complex value) const {
    std::vector<StepFn> entries = entries_;
    entries[index(i, j)][t] = value;
    return FilterMatrix(chain_, grid_, std::move(entries));
}

FilterMatrix refine(const FilterMatrix& H) {
    const int c = H.size();
    std::vector<StepFn> entries;
    for (int i = 0; i < c; ++i)
        for (int j = 0; j < c; ++j) entries.push_back(H.entry(i, j).refine());
    return FilterMatrix(H.chain(), H.grid().finer(), std::move(entries));
}

FilterMatrix refine_to(const FilterMatrix& H, int depth) {
    if (depth < H.grid().depth_K) throw ResolutionError("refine_to cannot lower the depth");
    FilterMatrix out = H;
    while (out.grid().depth_K < depth) out = refine(out);
    return out;
}

bool coarsen_check(const FilterMatrix& H) {
    if (H.grid().depth_K < 2) return false;
    const GridSpec coarser2 = H.grid().at_depth(H.grid().depth_K - 2);
    if (!H.chain().aligns_with_grid(coarser2.cell_count())) return false;
    for (int i = 0; i < H.size(); ++i)
        for (int j = 0; j < H.size(); ++j)
            if (!H.entry(i, j).constant_on_coarse_cells()) return false;
    return true;
}

std::optional<FilterMatrix> coarsen(const FilterMatrix& H) {
    if (!coarsen_check(H)) return std::nullopt;
    const int n = H.N();
    const GridSpec g = H.grid().coarser();
    std::vector<StepFn> entries;
    for (int i = 0; i < H.size(); ++i) {
        for (int j = 0; j < H.size(); ++j) {
            std::vector<Complex> s(static_cast<std::size_t>(g.cell_count()));
            for (std::int64_t t = 0; t < g.cell_count(); ++t) s[static_cast<std::size_t>(t)] = H(i, j, t * n);
            entries.emplace_back(g, std::move(s));
        }
    }
    return FilterMatrix(H.chain(), g, std::move(entries));
}

std::vector<SupportViolation> support_law_violations(const FilterMatrix& H) {
    std::vector<SupportViolation> out;
    const std::int64_t m = H.cells();
    const std::int64_t mc = H.coarse_grid().cell_count();
    for (int i = 0; i < H.size(); ++i) {
        const auto& target = H.coarse_mask(i);
        for (int j = 0; j < H.size(); ++j) {
            for (std::int64_t t = 0; t < m; ++t) {
                if (H(i, j, t) != Complex(0.0) && !target[static_cast<std::size_t>(t % mc)]) out.push_back({i, j, t});
            }
        }
    }
    return out;
}

}  // namespace genfilt
