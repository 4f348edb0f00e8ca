#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "genfilt/torus.hpp"

namespace genfilt {

using Complex = std::complex<double>;

/// Complex step function: samples[t] is the value on [t/M, (t+1)/M).
class StepFn {
public:
    StepFn() = default;
    explicit StepFn(GridSpec grid, Complex fill = 0.0);
    StepFn(GridSpec grid, std::vector<Complex> samples);

    const GridSpec& grid() const { return grid_; }
    std::int64_t size() const { return static_cast<std::int64_t>(samples_.size()); }
    std::span<const Complex> samples() const { return samples_; }

    Complex operator[](std::int64_t t) const { return samples_[static_cast<std::size_t>(t)]; }
    Complex& operator[](std::int64_t t) { return samples_[static_cast<std::size_t>(t)]; }

    /// Value at a point, using the cell that contains it.
    Complex at(const TorusRat& x) const { return (*this)[grid_.cell_of(x)]; }

    /// Union of the cells with a nonzero sample.
    IntervalSet support() const;

    StepFn refine() const;
    /// True iff depth >= 1 and samples are constant on every block of N cells.
    bool constant_on_coarse_cells() const;

    friend bool operator==(const StepFn&, const StepFn&) = default;

private:
    GridSpec grid_;
    std::vector<Complex> samples_;
};

/// Cell t of `grid` lies in S. S must be aligned with `grid`.
std::vector<char> cell_mask(const IntervalSet& S, const GridSpec& grid);

/// c x c matrix H = [h_ij] of step functions relative to a multiplicity chain
/// and dilation by N.
///
/// Construction enforces the structural part of the filter definition: depth
/// K >= 1, every sigma_i aligned with the depth K-1 grid, and h_ij vanishing
/// outside sigma_j. Whether the filter equation holds is a separate question
/// answered by filter_equation_residual().
///
/// Indices are 0-based; entry (i, j) is h_{i+1, j+1} in 1-based matrix notation.
class FilterMatrix {
public:
    FilterMatrix(SigmaChain chain, GridSpec grid, std::vector<StepFn> entries);

    int N() const { return grid_.scale_N; }
    int size() const { return chain_.size(); }
    const GridSpec& grid() const { return grid_; }
    GridSpec coarse_grid() const { return grid_.coarser(); }
    std::int64_t cells() const { return grid_.cell_count(); }
    const SigmaChain& chain() const { return chain_; }

    const StepFn& entry(int i, int j) const { return entries_[index(i, j)]; }
    Complex operator()(int i, int j, std::int64_t t) const { return entries_[index(i, j)][t]; }

    /// H(cell t) as a c x c matrix (row i, column j = h_ij).
    Eigen::MatrixXcd matrix_at(std::int64_t t) const;

    /// Mask of sigma_i on the fine grid and on the coarse (depth K-1) grid.
    const std::vector<char>& fine_mask(int i) const { return fine_masks_[static_cast<std::size_t>(i)]; }
    const std::vector<char>& coarse_mask(int i) const { return coarse_masks_[static_cast<std::size_t>(i)]; }

    /// Copy with one sample replaced; re-validated like any construction.
    FilterMatrix with_sample(int i, int j, std::int64_t t, Complex value) const;

    friend bool operator==(const FilterMatrix& a, const FilterMatrix& b) {
        return a.grid_ == b.grid_ && a.chain_ == b.chain_ && a.entries_ == b.entries_;
    }

private:
    std::size_t index(int i, int j) const { return static_cast<std::size_t>(i * size() + j); }

    SigmaChain chain_;
    GridSpec grid_;
    std::vector<StepFn> entries_;
    std::vector<std::vector<char>> fine_masks_;
    std::vector<std::vector<char>> coarse_masks_;
};

/// Splits every cell into N equal cells carrying the same value.
FilterMatrix refine(const FilterMatrix& H);
/// Refines until the grid has depth k (k >= current depth).
FilterMatrix refine_to(const FilterMatrix& H, int depth);

/// True iff H is also representable one level coarser: depth >= 2, samples
/// constant on N-cell blocks, and every sigma aligned with the depth K-2 grid.
bool coarsen_check(const FilterMatrix& H);
std::optional<FilterMatrix> coarsen(const FilterMatrix& H);

/// Cells where the support law fails: h_ij(t) != 0 but N * cell t is not in
/// sigma_i. A filter satisfying the filter equation has none.
struct SupportViolation {
    int i;
    int j;
    std::int64_t cell;
};
std::vector<SupportViolation> support_law_violations(const FilterMatrix& H);

}  // namespace genfilt
