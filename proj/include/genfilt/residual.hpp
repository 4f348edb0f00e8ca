#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "genfilt/filter.hpp"

namespace genfilt {

/// Worst deviation of a filter identity over all cells and index pairs.
///
/// Ties resolve to the lowest cell, then the lowest (row, col) pair, so the
/// report does not depend on evaluation order.
struct ResidualReport {
    double max_abs_residual = 0.0;
    std::int64_t argmax_cell = 0;
    int argmax_row = 0;  ///< i (or j for the n-step identity), 0-based
    int argmax_col = 0;  ///< i' (or j')
    /// per_pair(a, b): worst residual for that index pair.
    Eigen::MatrixXd per_pair;
    /// Cells of the grid the identity was evaluated on.
    std::int64_t grid_cells = 0;
};

/// Checks, on every cell x and every (i, i'),
///   sum_{N zeta = 0} sum_j h_ij(x + zeta) conj(h_i'j(x + zeta)) = N delta_ii' chi_{sigma_i}(N x).
/// The cell reported is the lowest fine cell of the worst coset.
ResidualReport filter_equation_residual(const FilterMatrix& H);

/// Ordered product H^t(x) H^t(N x) ... H^t(N^{n-1} x); H is read at the cell
/// containing each point.
Eigen::MatrixXcd cocycle_product(const FilterMatrix& H, const TorusRat& x, int n);

/// n-step identity
///   N^{-n} sum_{N^n zeta = 0} sum_i [P(x+zeta)]_ij conj([P(x+zeta)]_ij') = delta_jj' chi_{sigma_j}(N^n x)
/// with P the cocycle product of length n. The products are constant on the
/// cells of the depth K+n-1 grid, so the identity is checked on every cell of
/// that grid (hence almost everywhere, not just at sample points).
/// Throws ResolutionError for n > K and ParameterError for n < 1.
ResidualReport generalized_filter_residual(const FilterMatrix& H, int n);

}  // namespace genfilt
