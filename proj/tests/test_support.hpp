#pragma once

// Independent oracles for the tests. Everything here evaluates at explicit
// rational points through StepFn::at and kernel_points, never through the
// coset index arithmetic the library uses, so agreement is a real check.

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/QR>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "genfilt/filter.hpp"
#include "genfilt/random.hpp"
#include "genfilt/ruelle.hpp"

namespace oracle {

using genfilt::Complex;
using genfilt::FilterMatrix;
using genfilt::GridSpec;
using genfilt::Rat;
using genfilt::TorusRat;
using genfilt::VecField;

inline Eigen::MatrixXcd H_at(const FilterMatrix& H, const TorusRat& x) {
    const int c = H.size();
    Eigen::MatrixXcd m(c, c);
    for (int i = 0; i < c; ++i)
        for (int j = 0; j < c; ++j) m(i, j) = H.entry(i, j).at(x);
    return m;
}

/// max over left endpoints x and (i, i') of
/// | sum_{N z = 0} sum_j h_ij(x+z) conj(h_i'j(x+z)) - N delta chi_{sigma_i}(N x) |.
inline double filter_equation(const FilterMatrix& H) {
    const int c = H.size();
    const int N = H.N();
    const auto zetas = genfilt::kernel_points(N, 1);
    double worst = 0.0;
    for (std::int64_t t = 0; t < H.cells(); ++t) {
        const Rat x = H.grid().left_endpoint(t);
        Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(c, c);
        for (const auto& z : zetas) {
            const Eigen::MatrixXcd m = H_at(H, TorusRat(x + z.value()));
            acc += m * m.adjoint();
        }
        const Rat nx = genfilt::alpha_star(TorusRat(x), N).value();
        for (int i = 0; i < c; ++i)
            for (int ip = 0; ip < c; ++ip) {
                const double rhs = (i == ip && H.chain()[i].contains(nx)) ? N : 0.0;
                worst = std::max(worst, std::abs(acc(i, ip) - rhs));
            }
    }
    return worst;
}

/// Ordered product H^t(x) H^t(N x) ... H^t(N^{n-1} x) by direct evaluation.
inline Eigen::MatrixXcd product(const FilterMatrix& H, TorusRat x, int n) {
    Eigen::MatrixXcd out = H_at(H, x).transpose();
    for (int k = 1; k < n; ++k) {
        x = genfilt::alpha_star(x, H.N());
        out = out * H_at(H, x).transpose();
    }
    return out;
}

/// n-step identity at every left endpoint of the depth K+n-1 grid.
inline double generalized_equation(const FilterMatrix& H, int n) {
    const int c = H.size();
    const GridSpec g = H.grid().at_depth(H.grid().depth_K + n - 1);
    const auto zetas = genfilt::kernel_points(H.N(), n);
    const double scale = 1.0 / static_cast<double>(zetas.size());
    double worst = 0.0;
    for (std::int64_t t = 0; t < g.cell_count(); ++t) {
        const Rat x = g.left_endpoint(t);
        Eigen::MatrixXcd gram = Eigen::MatrixXcd::Zero(c, c);
        for (const auto& z : zetas) {
            const Eigen::MatrixXcd p = product(H, TorusRat(x + z.value()), n);
            gram += p.adjoint() * p;  // gram(j', j) = sum_i conj(P_ij') P_ij
        }
        gram *= scale;
        TorusRat y(x);
        for (int k = 0; k < n; ++k) y = genfilt::alpha_star(y, H.N());
        for (int j = 0; j < c; ++j)
            for (int jp = 0; jp < c; ++jp) {
                const double rhs = (j == jp && H.chain()[j].contains(y.value())) ? 1.0 : 0.0;
                worst = std::max(worst, std::abs(gram(jp, j) - rhs));
            }
    }
    return worst;
}

/// S f evaluated pointwise: (S f)_j(x) = sum_i h_ij(x) f_i(N x).
inline VecField ruelle(const FilterMatrix& H, const VecField& f) {
    VecField out(H.chain(), H.grid());
    for (std::int64_t t = 0; t < H.cells(); ++t) {
        const TorusRat x(H.grid().left_endpoint(t));
        const TorusRat nx = genfilt::alpha_star(x, H.N());
        for (int j = 0; j < H.size(); ++j) {
            Complex acc = 0.0;
            for (int i = 0; i < H.size(); ++i) acc += H.entry(i, j).at(x) * f.component(i).at(nx);
            out.set(j, t, acc);
        }
    }
    return out;
}

inline double norm2(const VecField& f) {
    double acc = 0.0;
    for (int i = 0; i < f.size(); ++i)
        for (Complex z : f.component(i).samples()) acc += std::norm(z);
    return acc / static_cast<double>(f.grid().cell_count());
}

inline Complex inner(const VecField& f, const VecField& g) {
    Complex acc = 0.0;
    for (int i = 0; i < f.size(); ++i)
        for (std::int64_t t = 0; t < f.grid().cell_count(); ++t) acc += f(i, t) * std::conj(g(i, t));
    return acc / static_cast<double>(f.grid().cell_count());
}

/// X_n at the left endpoint of cell t, by direct summation over kernel points.
inline Complex martingale_at(const VecField& f, const VecField& g, int N, int n, std::int64_t t) {
    const Rat x = f.grid().left_endpoint(t);
    const auto zetas = n == 0 ? std::vector<TorusRat>{TorusRat(Rat(0))} : genfilt::kernel_points(N, n);
    Complex acc = 0.0;
    for (const auto& z : zetas) {
        const TorusRat p(x + z.value());
        for (int i = 0; i < f.size(); ++i) acc += f.component(i).at(p) * std::conj(g.component(i).at(p));
    }
    return acc / static_cast<double>(zetas.size());
}

/// Lower bound search for a unit-circle eigenvalue of S.
///
/// S f = lambda f means (S - lambda J) f = 0 with J the inclusion of the coarse
/// step space. s(lambda) = sigma_min(S - lambda J) is Lipschitz in lambda with
/// constant |J| = sqrt(N) (unweighted coordinates), so sampling `steps` points
/// of the circle and subtracting sqrt(N) * 2 pi / steps gives a rigorous lower
/// bound on min over the whole circle. Returns that lower bound (may be < 0).
inline double unit_circle_gap(const FilterMatrix& H, int steps) {
    const GridSpec fine = H.grid();
    const GridSpec coarse = H.coarse_grid();
    const int c = H.size();
    const std::int64_t mf = fine.cell_count(), mc = coarse.cell_count();
    Eigen::MatrixXcd S = Eigen::MatrixXcd::Zero(c * mf, c * mc);
    Eigen::MatrixXcd J = Eigen::MatrixXcd::Zero(c * mf, c * mc);
    for (std::int64_t t = 0; t < mf; ++t) {
        const TorusRat x(fine.left_endpoint(t));
        const std::int64_t s = coarse.cell_of(genfilt::alpha_star(x, H.N()));
        const std::int64_t below = coarse.cell_of(x);
        for (int j = 0; j < c; ++j) {
            for (int i = 0; i < c; ++i) S(j * mf + t, i * mc + s) = H.entry(i, j).at(x);
            J(j * mf + t, j * mc + below) = 1.0;
        }
    }
    // Restrict to the coordinates that can be nonzero.
    std::vector<Eigen::Index> cols;
    for (int i = 0; i < c; ++i)
        for (std::int64_t s = 0; s < mc; ++s)
            if (H.chain()[i].contains(coarse.left_endpoint(s))) cols.push_back(i * mc + s);
    Eigen::MatrixXcd Sr(S.rows(), static_cast<Eigen::Index>(cols.size())), Jr(J.rows(), Sr.cols());
    for (std::size_t k = 0; k < cols.size(); ++k) {
        Sr.col(static_cast<Eigen::Index>(k)) = S.col(cols[k]);
        Jr.col(static_cast<Eigen::Index>(k)) = J.col(cols[k]);
    }
    double lo = std::numeric_limits<double>::infinity();
    for (int k = 0; k < steps; ++k) {
        const Complex lambda = std::polar(1.0, 2.0 * std::numbers::pi * k / steps);
        // sigma_min^2 is the smallest eigenvalue of the Gram matrix; its rounding
        // error is far below the gaps this is used on.
        const Eigen::MatrixXcd A = Sr - lambda * Jr;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(A.adjoint() * A, Eigen::EigenvaluesOnly);
        lo = std::min(lo, std::sqrt(std::max(0.0, es.eigenvalues()(0))));
    }
    return lo - std::sqrt(static_cast<double>(H.N())) * 2.0 * std::numbers::pi / steps;
}

/// Random c x c filter satisfying the filter equation, on grid (N, L, K).
///
/// sigma_1 is the whole circle; for c >= 2 the later sigmas are random nested
/// unions of coarse cells. On each coarse cell s the c x (N c) block
/// [H(s) H(s + M') ... ] has its active rows (s in sigma_i) equal to sqrt(N)
/// times orthonormal rows supported on the admissible columns.
inline FilterMatrix random_filter(int c, int N, std::int64_t L, int K, genfilt::ProbeRng& rng) {
    const GridSpec g(N, L, K);
    const GridSpec coarse = g.coarser();
    const std::int64_t mc = coarse.cell_count();
    // Draw nested chains until every coarse cell has at least as many admissible
    // columns as active rows; otherwise no filter exists on that chain.
    auto draw_chain = [&] {
        std::vector<genfilt::IntervalSet> sigmas{genfilt::IntervalSet::full()};
        std::vector<char> prev(static_cast<std::size_t>(mc), 1);
        for (int i = 1; i < c; ++i) {
            std::vector<char> cur(static_cast<std::size_t>(mc), 0);
            genfilt::IntervalSet s;
            for (std::int64_t t = 0; t < mc; ++t) {
                if (prev[static_cast<std::size_t>(t)] && rng.uniform01() < 0.6) {
                    cur[static_cast<std::size_t>(t)] = 1;
                    s = s.unite(genfilt::IntervalSet::interval(Rat(t, mc), Rat(t + 1, mc)));
                }
            }
            if (s.is_empty()) {  // keep every sigma nonempty to exercise c > 1
                std::int64_t t = 0;
                while (!prev[static_cast<std::size_t>(t)]) ++t;
                cur[static_cast<std::size_t>(t)] = 1;
                s = genfilt::IntervalSet::interval(Rat(t, mc), Rat(t + 1, mc));
            }
            sigmas.push_back(s);
            prev = cur;
        }
        return genfilt::SigmaChain(sigmas);
    };
    auto rows_of = [&](const std::vector<std::vector<char>>& coarse_mask, std::int64_t s) {
        std::vector<int> rows;
        for (int i = 0; i < c; ++i)
            if (coarse_mask[static_cast<std::size_t>(i)][static_cast<std::size_t>(s)]) rows.push_back(i);
        return rows;
    };
    auto cols_of = [&](const std::vector<std::vector<char>>& fine_mask, std::int64_t s) {
        std::vector<std::pair<int, int>> cols;  // (k, j) with fine cell s + k M' inside sigma_j
        for (int k = 0; k < N; ++k)
            for (int j = 0; j < c; ++j)
                if (fine_mask[static_cast<std::size_t>(j)][static_cast<std::size_t>(s + k * mc)]) cols.emplace_back(k, j);
        return cols;
    };

    genfilt::SigmaChain chain;
    std::vector<std::vector<char>> fine_mask, coarse_mask;
    for (bool feasible = false; !feasible;) {
        chain = draw_chain();
        fine_mask.clear();
        coarse_mask.clear();
        for (int i = 0; i < c; ++i) {
            fine_mask.push_back(genfilt::cell_mask(chain[i], g));
            coarse_mask.push_back(genfilt::cell_mask(chain[i], coarse));
        }
        feasible = true;
        for (std::int64_t s = 0; s < mc && feasible; ++s)
            feasible = rows_of(coarse_mask, s).size() <= cols_of(fine_mask, s).size();
    }

    std::vector<genfilt::StepFn> entries(static_cast<std::size_t>(c * c), genfilt::StepFn(g));
    for (std::int64_t s = 0; s < mc; ++s) {
        const auto cols = cols_of(fine_mask, s);
        const auto rows = rows_of(coarse_mask, s);
        const auto a = static_cast<Eigen::Index>(cols.size());
        Eigen::MatrixXcd z(a, a);
        for (Eigen::Index p = 0; p < a; ++p)
            for (Eigen::Index q = 0; q < a; ++q) z(p, q) = rng.unit_disk();
        const Eigen::MatrixXcd u = Eigen::HouseholderQR<Eigen::MatrixXcd>(z).householderQ();
        for (std::size_t r = 0; r < rows.size(); ++r)
            for (Eigen::Index q = 0; q < a; ++q) {
                const auto [k, j] = cols[static_cast<std::size_t>(q)];
                entries[static_cast<std::size_t>(rows[r] * c + j)][s + k * mc] =
                    std::sqrt(static_cast<double>(N)) * u(static_cast<Eigen::Index>(r), q);
            }
    }
    return FilterMatrix(chain, g, std::move(entries));
}

/// Random 1x1 filter for N = 2: on each coarse cell s the pair
/// (h(s), h(s + 1/2)) is sqrt2 (cos phi, sin phi) with random phases, and phi is
/// chosen so that |h| is large next to 0 and a low-pass certificate usually exists.
inline FilterMatrix random_lowpass(genfilt::ProbeRng& rng, std::int64_t L, int K) {
    const GridSpec g(2, L, K);
    const std::int64_t mc = g.coarser().cell_count();
    genfilt::StepFn h(g);
    for (std::int64_t s = 0; s < mc; ++s) {
        // cell s + M' sits just below 1 when s is just below M', so both ends need large |h|
        const double u = rng.uniform01();
        const double phi = s < mc / 8 ? 0.3 * u : s >= mc - mc / 8 ? std::numbers::pi / 2.0 - 0.3 * u : 1.5 * u;
        h[s] = std::numbers::sqrt2 * std::cos(phi) * std::polar(1.0, 2.0 * std::numbers::pi * rng.uniform01());
        h[s + mc] = std::numbers::sqrt2 * std::sin(phi) * std::polar(1.0, 2.0 * std::numbers::pi * rng.uniform01());
    }
    return FilterMatrix(genfilt::SigmaChain::constant(1), g, {h});
}

}  // namespace oracle
