#include "genfilt/residual.hpp"

#include <cmath>
#include <string>

#include "genfilt/error.hpp"
#include "genfilt/parallel.hpp"

namespace genfilt {

namespace {

std::int64_t int_pow(std::int64_t base, int exp) {
    std::int64_t out = 1;
    for (int k = 0; k < exp; ++k) out *= base;
    return out;
}

// Reduces per-orbit residual tables in index order. `cell_of_orbit` maps an
// orbit representative to the cell that gets reported.
template <typename CellOf>
ResidualReport reduce(const std::vector<Eigen::MatrixXd>& tables, int c, CellOf cell_of_orbit) {
    ResidualReport rep;
    rep.per_pair = Eigen::MatrixXd::Zero(c, c);
    bool first = true;
    for (std::size_t w = 0; w < tables.size(); ++w) {
        const auto& tab = tables[w];
        for (int a = 0; a < c; ++a) {
            for (int b = 0; b < c; ++b) {
                const double v = tab(a, b);
                rep.per_pair(a, b) = std::max(rep.per_pair(a, b), v);
                if (first || v > rep.max_abs_residual) {
                    rep.max_abs_residual = v;
                    rep.argmax_cell = cell_of_orbit(static_cast<std::int64_t>(w));
                    rep.argmax_row = a;
                    rep.argmax_col = b;
                    first = false;
                }
            }
        }
    }
    return rep;
}

}  // namespace

ResidualReport filter_equation_residual(const FilterMatrix& H) {
    const int c = H.size();
    const int n = H.N();
    const std::int64_t coarse = H.coarse_grid().cell_count();
    std::vector<Eigen::MatrixXd> tables(static_cast<std::size_t>(coarse));

    parallel_for(coarse, [&](std::int64_t s) {
        Eigen::MatrixXcd gram = Eigen::MatrixXcd::Zero(c, c);
        for (int k = 0; k < n; ++k) {
            const Eigen::MatrixXcd w = H.matrix_at(s + k * coarse);
            gram += w * w.adjoint();
        }
        Eigen::MatrixXd tab(c, c);
        for (int i = 0; i < c; ++i) {
            for (int ip = 0; ip < c; ++ip) {
                const double rhs = (i == ip && H.coarse_mask(i)[static_cast<std::size_t>(s)]) ? n : 0.0;
                tab(i, ip) = std::abs(gram(i, ip) - rhs);
            }
        }
        tables[static_cast<std::size_t>(s)] = std::move(tab);
    });

    ResidualReport rep = reduce(tables, c, [](std::int64_t s) { return s; });
    rep.grid_cells = H.cells();
    return rep;
}

Eigen::MatrixXcd cocycle_product(const FilterMatrix& H, const TorusRat& x, int n) {
    if (n < 1) throw ParameterError("cocycle product needs n >= 1");
    Eigen::MatrixXcd out = H.matrix_at(H.grid().cell_of(x)).transpose();
    TorusRat y = x;
    for (int k = 1; k < n; ++k) {
        y = alpha_star(y, H.N());
        out = out * H.matrix_at(H.grid().cell_of(y)).transpose();
    }
    return out;
}

ResidualReport generalized_filter_residual(const FilterMatrix& H, int n) {
    if (n < 1) throw ParameterError("n-step identity needs n >= 1");
    if (n > H.grid().depth_K)
        throw ResolutionError("n = " + std::to_string(n) + " exceeds the filter depth K = " +
                              std::to_string(H.grid().depth_K));
    const int c = H.size();
    const std::int64_t N = H.N();
    const std::int64_t fine = H.cells();
    const std::int64_t coarse = H.coarse_grid().cell_count();
    const std::int64_t sub = int_pow(N, n - 1);  // refined cells per fine cell
    const std::int64_t refined = fine * sub;
    const std::int64_t orbit = int_pow(N, n);
    const double scale = 1.0 / static_cast<double>(orbit);

    // Filter matrices transposed once; the products only ever need H^t.
    std::vector<Eigen::MatrixXcd> ht(static_cast<std::size_t>(fine));
    for (std::int64_t t = 0; t < fine; ++t) ht[static_cast<std::size_t>(t)] = H.matrix_at(t).transpose();

    std::vector<Eigen::MatrixXd> tables(static_cast<std::size_t>(coarse));
    parallel_for(coarse, [&](std::int64_t w) {
        Eigen::MatrixXcd gram = Eigen::MatrixXcd::Zero(c, c);
        for (std::int64_t k = 0; k < orbit; ++k) {
            const std::int64_t u = w + k * coarse;
            std::int64_t point = u;  // N^k u mod refined, as an index on the refined grid
            Eigen::MatrixXcd prod = ht[static_cast<std::size_t>(point / sub)];
            for (int step = 1; step < n; ++step) {
                point = (point * N) % refined;
                prod = prod * ht[static_cast<std::size_t>(point / sub)];
            }
            gram += prod.adjoint() * prod;
        }
        gram *= scale;
        Eigen::MatrixXd tab(c, c);
        for (int j = 0; j < c; ++j) {
            for (int jp = 0; jp < c; ++jp) {
                const double rhs = (j == jp && H.coarse_mask(j)[static_cast<std::size_t>(w)]) ? 1.0 : 0.0;
                tab(j, jp) = std::abs(gram(jp, j) - rhs);
            }
        }
        tables[static_cast<std::size_t>(w)] = std::move(tab);
    });

    ResidualReport rep = reduce(tables, c, [](std::int64_t w) { return w; });
    rep.grid_cells = refined;
    return rep;
}

}  // namespace genfilt
