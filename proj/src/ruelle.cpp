#include "genfilt/ruelle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "genfilt/error.hpp"
#include "genfilt/parallel.hpp"
#include "genfilt/residual.hpp"

namespace genfilt {

namespace {

// Eigenvalues of the transfer matrix closer than this are tested together,
// so a degenerate unit-circle eigenspace is searched as a whole.
constexpr double kClusterRadius = 1e-6;
// The transfer matrix of an isometry is a contraction; more than this above 1
// means the input is not what it claims to be.
constexpr double kContainmentSlack = 1e-10;
// Eigenvector samples are snapped to this lattice when that does not hurt
// the residual, which turns exact eigenvectors (f = 1) into exact output.
constexpr double kSnapScale = 0x1.0p40;

std::vector<std::vector<char>> masks_for(const SigmaChain& chain, const GridSpec& grid) {
    std::vector<std::vector<char>> out;
    out.reserve(static_cast<std::size_t>(chain.size()));
    for (int i = 0; i < chain.size(); ++i) out.push_back(cell_mask(chain[i], grid));
    return out;
}

std::int64_t checked_pow(std::int64_t base, int exp) {
    std::int64_t out = 1;
    for (int k = 0; k < exp; ++k) {
        if (out > std::numeric_limits<std::int64_t>::max() / base) throw OverflowError("power N^n overflows");
        out *= base;
    }
    return out;
}

void require_same_space(const VecField& a, const VecField& b) {
    if (!(a.grid() == b.grid()) || !(a.chain() == b.chain()))
        throw GridMismatch("vector fields live on different grids or chains");
}

// Coordinates relative to a (component, cell) basis.
using Basis = std::vector<std::pair<int, std::int64_t>>;

Basis basis_of(const SigmaChain& chain, const GridSpec& grid) {
    Basis out;
    const auto masks = masks_for(chain, grid);
    for (int i = 0; i < chain.size(); ++i)
        for (std::int64_t t = 0; t < grid.cell_count(); ++t)
            if (masks[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)]) out.emplace_back(i, t);
    return out;
}

Eigen::VectorXcd coords(const VecField& f, const Basis& basis) {
    Eigen::VectorXcd v(static_cast<Eigen::Index>(basis.size()));
    for (std::size_t k = 0; k < basis.size(); ++k) v(static_cast<Eigen::Index>(k)) = f(basis[k].first, basis[k].second);
    return v;
}

VecField from_coords(const Eigen::VectorXcd& v, const Basis& basis, const SigmaChain& chain, const GridSpec& grid) {
    VecField f(chain, grid);
    for (std::size_t k = 0; k < basis.size(); ++k) f.set(basis[k].first, basis[k].second, v(static_cast<Eigen::Index>(k)));
    return f;
}

double relative_eigen_residual(const FilterMatrix& H, const VecField& f, Complex lambda) {
    const double n = f.norm();
    if (n == 0.0) return std::numeric_limits<double>::infinity();
    return (ruelle_apply(H, f) - lambda * f.include()).norm() / n;
}

// Adding 0.0 turns a rounded -0 into +0.
double snap(double x) { return std::round(x * kSnapScale) / kSnapScale + 0.0; }
Complex snap(Complex z) { return {snap(z.real()), snap(z.imag())}; }

// Unit norm, largest-modulus sample made real positive (lowest index on ties).
void canonicalize(VecField& f) {
    f *= Complex(1.0 / f.norm(), 0.0);
    Complex pivot = 0.0;
    for (int i = 0; i < f.size(); ++i)
        for (std::int64_t t = 0; t < f.grid().cell_count(); ++t)
            if (std::abs(f(i, t)) > std::abs(pivot)) pivot = f(i, t);
    if (pivot != Complex(0.0)) f *= std::conj(pivot) / std::abs(pivot);
}

struct Candidate {
    VecField f;
    Complex lambda;
    double residual;
};

Candidate tidy(const FilterMatrix& H, VecField f, Complex lambda) {
    canonicalize(f);
    Candidate best{f, lambda, relative_eigen_residual(H, f, lambda)};

    VecField s = f;
    for (int i = 0; i < s.size(); ++i)
        for (std::int64_t t = 0; t < s.grid().cell_count(); ++t) s.set(i, t, snap(s(i, t)));
    if (const double n = s.norm(); n != 1.0 && n > 0.0) s *= Complex(1.0 / n, 0.0);
    const Complex ls = snap(lambda);
    if (const double r = relative_eigen_residual(H, s, ls); r <= best.residual) best = Candidate{s, ls, r};
    return best;
}

int max_martingale_depth(std::int64_t cells, int N) {
    int n = 0;
    while (cells % N == 0) {
        cells /= N;
        ++n;
    }
    return n;
}

}  // namespace

// ---------------------------------------------------------------- VecField

VecField::VecField(SigmaChain chain, GridSpec grid) : chain_(std::move(chain)), grid_(grid) {
    if (!chain_.aligns_with_grid(grid_.cell_count()))
        throw AlignmentError("sigma sets are not unions of cells of a grid with " + std::to_string(grid_.cell_count()) +
                             " cells");
    components_.assign(static_cast<std::size_t>(chain_.size()), StepFn(grid_));
}

VecField::VecField(SigmaChain chain, GridSpec grid, std::vector<StepFn> components) : VecField(std::move(chain), grid) {
    if (static_cast<int>(components.size()) != chain_.size())
        throw ParameterError("expected " + std::to_string(chain_.size()) + " components, got " +
                             std::to_string(components.size()));
    const auto masks = masks_for(chain_, grid_);
    for (int i = 0; i < chain_.size(); ++i) {
        const StepFn& c = components[static_cast<std::size_t>(i)];
        if (!(c.grid() == grid_)) throw GridMismatch("component grid differs from the field grid");
        for (std::int64_t t = 0; t < c.size(); ++t)
            if (c[t] != Complex(0.0) && !masks[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)])
                throw ParameterError("component " + std::to_string(i + 1) + " is nonzero at cell " + std::to_string(t) +
                                     " outside its sigma set");
    }
    components_ = std::move(components);
}

VecField VecField::ones(const SigmaChain& chain, const GridSpec& grid) {
    VecField f(chain, grid);
    const auto masks = masks_for(chain, grid);
    for (int i = 0; i < chain.size(); ++i)
        for (std::int64_t t = 0; t < grid.cell_count(); ++t)
            if (masks[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)]) f.set(i, t, 1.0);
    return f;
}

VecField VecField::random(const SigmaChain& chain, const GridSpec& grid, ProbeRng& rng) {
    VecField f(chain, grid);
    const auto masks = masks_for(chain, grid);
    // Every cell draws, masked or not, so the stream position does not depend on the chain.
    for (int i = 0; i < chain.size(); ++i) {
        for (std::int64_t t = 0; t < grid.cell_count(); ++t) {
            const Complex z = rng.unit_disk();
            if (masks[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)]) f.set(i, t, z);
        }
    }
    return f;
}

double VecField::norm2() const {
    double acc = 0.0;
    for (const auto& c : components_)
        for (Complex z : c.samples()) acc += std::norm(z);
    return acc / static_cast<double>(grid_.cell_count());
}

double VecField::norm() const { return std::sqrt(norm2()); }

Complex VecField::inner(const VecField& g) const {
    require_same_space(*this, g);
    Complex acc = 0.0;
    for (int i = 0; i < size(); ++i)
        for (std::int64_t t = 0; t < grid_.cell_count(); ++t) acc += (*this)(i, t) * std::conj(g(i, t));
    return acc / static_cast<double>(grid_.cell_count());
}

double VecField::pointwise_norm(std::int64_t t) const {
    double acc = 0.0;
    for (const auto& c : components_) acc += std::norm(c[t]);
    return std::sqrt(acc);
}

VecField VecField::include() const {
    std::vector<StepFn> comps;
    comps.reserve(components_.size());
    for (const auto& c : components_) comps.push_back(c.refine());
    VecField out(chain_, grid_.finer());
    out.components_ = std::move(comps);
    return out;
}

VecField VecField::block_average() const {
    const GridSpec coarse = grid_.coarser();
    const int n = grid_.scale_N;
    VecField out(chain_, coarse);
    for (int i = 0; i < size(); ++i) {
        for (std::int64_t s = 0; s < coarse.cell_count(); ++s) {
            Complex acc = 0.0;
            for (int k = 0; k < n; ++k) acc += (*this)(i, s * n + k);
            out.set(i, s, acc / static_cast<double>(n));
        }
    }
    return out;
}

VecField& VecField::operator+=(const VecField& g) {
    require_same_space(*this, g);
    for (int i = 0; i < size(); ++i)
        for (std::int64_t t = 0; t < grid_.cell_count(); ++t) set(i, t, (*this)(i, t) + g(i, t));
    return *this;
}

VecField& VecField::operator-=(const VecField& g) {
    require_same_space(*this, g);
    for (int i = 0; i < size(); ++i)
        for (std::int64_t t = 0; t < grid_.cell_count(); ++t) set(i, t, (*this)(i, t) - g(i, t));
    return *this;
}

VecField& VecField::operator*=(Complex s) {
    for (int i = 0; i < size(); ++i)
        for (std::int64_t t = 0; t < grid_.cell_count(); ++t) set(i, t, (*this)(i, t) * s);
    return *this;
}

VecField operator*(Complex s, VecField f) { return f *= s; }
VecField operator-(VecField f, const VecField& g) { return f -= g; }

// ---------------------------------------------------------------- operators

VecField ruelle_apply(const FilterMatrix& H, const VecField& f) {
    if (!(f.grid() == H.coarse_grid()) || !(f.chain() == H.chain()))
        throw GridMismatch("ruelle_apply expects a field on the filter's coarse grid and chain");
    const int c = H.size();
    const std::int64_t coarse = H.coarse_grid().cell_count();
    VecField out(H.chain(), H.grid());
    parallel_for(H.cells(), [&](std::int64_t t) {
        const std::int64_t s = t % coarse;
        for (int j = 0; j < c; ++j) {
            Complex acc = 0.0;
            for (int i = 0; i < c; ++i) acc += H(i, j, t) * f(i, s);
            out.set(j, t, acc);
        }
    });
    return out;
}

VecField transfer_apply(const FilterMatrix& H, const VecField& g) {
    if (!(g.grid() == H.grid()) || !(g.chain() == H.chain()))
        throw GridMismatch("transfer_apply expects a field on the filter's grid and chain");
    const int c = H.size();
    const int n = H.N();
    const std::int64_t coarse = H.coarse_grid().cell_count();
    VecField out(H.chain(), H.coarse_grid());
    parallel_for(coarse, [&](std::int64_t s) {
        for (int i = 0; i < c; ++i) {
            if (!H.coarse_mask(i)[static_cast<std::size_t>(s)]) continue;
            Complex acc = 0.0;
            for (int k = 0; k < n; ++k) {
                const std::int64_t x = s + k * coarse;
                for (int j = 0; j < c; ++j) acc += std::conj(H(i, j, x)) * g(j, x);
            }
            out.set(i, s, acc / static_cast<double>(n));
        }
    });
    return out;
}

double isometry_residual(const FilterMatrix& H, int trials, std::uint64_t seed) {
    if (trials < 1) throw ParameterError("isometry_residual needs trials >= 1");
    ProbeRng rng(seed);
    double worst = 0.0;
    for (int k = 0; k < trials; ++k) {
        const VecField f = VecField::random(H.chain(), H.coarse_grid(), rng);
        worst = std::max(worst, std::abs(ruelle_apply(H, f).norm2() - f.norm2()));
    }
    return worst;
}

std::int64_t dimension_cap() {
    if (const char* env = std::getenv("GENFILT_DIM_CAP"); env != nullptr && *env != '\0') {
        char* end = nullptr;
        const long long v = std::strtoll(env, &end, 10);
        if (end == env || *end != '\0' || v <= 0)
            throw ParameterError(std::string("GENFILT_DIM_CAP must be a positive integer, got '") + env + "'");
        return v;
    }
    return 4096;
}

TransferMatrix assemble_transfer_matrix(const FilterMatrix& H) {
    const std::int64_t full = static_cast<std::int64_t>(H.size()) * H.cells();
    if (const std::int64_t cap = dimension_cap(); full > cap)
        throw DimensionCapExceeded("transfer matrix dimension c*M = " + std::to_string(full) + " exceeds the cap " +
                                   std::to_string(cap) + " (set GENFILT_DIM_CAP to raise it)");
    TransferMatrix T;
    T.basis = basis_of(H.chain(), H.grid());
    const auto d = static_cast<Eigen::Index>(T.basis.size());
    const int n = H.N();
    const std::int64_t coarse = H.coarse_grid().cell_count();

    // Row position of (i, t) in the basis.
    std::vector<std::vector<Eigen::Index>> position(static_cast<std::size_t>(H.size()),
                                                    std::vector<Eigen::Index>(static_cast<std::size_t>(H.cells()), -1));
    for (Eigen::Index k = 0; k < d; ++k) {
        const auto& [i, t] = T.basis[static_cast<std::size_t>(k)];
        position[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)] = k;
    }

    T.entries = Eigen::MatrixXcd::Zero(d, d);
    parallel_for(d, [&](std::int64_t col) {
        const auto& [j, t] = T.basis[static_cast<std::size_t>(col)];
        const std::int64_t s = t % coarse;
        for (int i = 0; i < H.size(); ++i) {
            const Complex v = std::conj(H(i, j, t)) / static_cast<double>(n);
            if (v == Complex(0.0)) continue;
            for (int r = 0; r < n; ++r) {
                const Eigen::Index row = position[static_cast<std::size_t>(i)][static_cast<std::size_t>(s * n + r)];
                if (row >= 0) T.entries(row, static_cast<Eigen::Index>(col)) = v;
            }
        }
    });
    return T;
}

// ---------------------------------------------------------------- purity

std::string to_string(PurityStatus s) {
    switch (s) {
        case PurityStatus::Pure_certified: return "Pure_certified";
        case PurityStatus::Pure_at_resolution: return "Pure_at_resolution";
        case PurityStatus::NotPure_certified: return "NotPure_certified";
        case PurityStatus::Inconclusive: return "Inconclusive";
    }
    return "unknown";
}

PurityVerdict classify_purity(const FilterMatrix& H, const ClassifyOptions& opts) {
    PurityVerdict v;
    v.resolution = H.grid();
    v.tols = opts.tols;
    const int n = H.N();

    v.filter_residual = filter_equation_residual(H).max_abs_residual;
    if (!(v.filter_residual <= opts.tols.tol_res * n)) {
        v.status = PurityStatus::Inconclusive;
        v.notes.push_back("filter equation residual " + std::to_string(v.filter_residual) +
                          " exceeds tol_res * N; S is not an isometry, so purity is undefined");
        return v;
    }
    if (!H.chain()[0].is_full())
        v.notes.push_back("sigma_1 is not the whole circle, which already rules out an eigenvector; the eigen-analysis "
                          "below is a consistency check");

    const TransferMatrix T = assemble_transfer_matrix(H);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(T.entries, true);
    if (solver.info() != Eigen::Success) throw EigensolverFailure("complex eigensolver did not converge");
    const Eigen::VectorXcd nu = solver.eigenvalues();
    const Eigen::MatrixXcd vecs = solver.eigenvectors();
    const auto d = nu.size();

    std::vector<SpectrumEntry> spectrum(static_cast<std::size_t>(d));
    for (Eigen::Index k = 0; k < d; ++k) {
        auto& e = spectrum[static_cast<std::size_t>(k)];
        e.nu = nu(k);
        e.near_unit = std::abs(std::abs(nu(k)) - 1.0) <= opts.tols.tol_eig;
        v.max_abs_eigenvalue = std::max(v.max_abs_eigenvalue, std::abs(nu(k)));
    }

    bool contained = v.max_abs_eigenvalue <= 1.0 + kContainmentSlack;
    if (!contained) {
        v.status = PurityStatus::Inconclusive;
        v.notes.push_back("transfer matrix has an eigenvalue of modulus " + std::to_string(v.max_abs_eigenvalue) +
                          " > 1, so it is not the adjoint of an isometry at this resolution");
    }

    // Near-unit eigenvalues, grouped in index order.
    const SigmaChain& chain = H.chain();
    const GridSpec coarse = H.coarse_grid();
    const Basis fine_basis = T.basis;
    const Basis coarse_basis = basis_of(chain, coarse);
    std::vector<int> cluster_of(static_cast<std::size_t>(d), -1);
    int clusters = 0;
    for (Eigen::Index k = 0; contained && k < d; ++k) {
        if (!spectrum[static_cast<std::size_t>(k)].near_unit || cluster_of[static_cast<std::size_t>(k)] >= 0) continue;
        std::vector<Eigen::Index> members;
        for (Eigen::Index m = k; m < d; ++m) {
            if (spectrum[static_cast<std::size_t>(m)].near_unit && cluster_of[static_cast<std::size_t>(m)] < 0 &&
                std::abs(nu(m) - nu(k)) <= kClusterRadius) {
                cluster_of[static_cast<std::size_t>(m)] = clusters;
                members.push_back(m);
            }
        }
        ++clusters;

        // Eigenvectors with nonzero eigenvalue lie in the range of include, so the
        // block average loses nothing.
        Eigen::MatrixXcd phi0(static_cast<Eigen::Index>(coarse_basis.size()), static_cast<Eigen::Index>(members.size()));
        Complex mean = 0.0;
        for (std::size_t c = 0; c < members.size(); ++c) {
            const VecField g = from_coords(vecs.col(members[c]), fine_basis, chain, H.grid());
            phi0.col(static_cast<Eigen::Index>(c)) = coords(g.block_average(), coarse_basis);
            mean += nu(members[c]);
        }
        mean /= static_cast<double>(members.size());
        const Complex lambda = std::conj(mean);

        Eigen::JacobiSVD<Eigen::MatrixXcd> span(phi0, Eigen::ComputeThinU);
        Eigen::Index rank = 0;
        for (Eigen::Index r = 0; r < span.singularValues().size(); ++r)
            if (span.singularValues()(r) > 1e-8 * span.singularValues()(0)) ++rank;
        const Eigen::MatrixXcd phi = span.matrixU().leftCols(rank);

        Eigen::MatrixXcd A(static_cast<Eigen::Index>(fine_basis.size()), rank);
        for (Eigen::Index c = 0; c < rank; ++c) {
            const VecField f = from_coords(phi.col(c), coarse_basis, chain, coarse);
            A.col(c) = coords(ruelle_apply(H, f) - lambda * f.include(), fine_basis);
        }
        Eigen::JacobiSVD<Eigen::MatrixXcd> fit(A, Eigen::ComputeThinV);
        const double smin = fit.singularValues()(rank - 1);
        const double rel = smin / std::sqrt(static_cast<double>(n));
        const bool passes = rel <= opts.tols.tol_res;
        for (Eigen::Index m : members) {
            spectrum[static_cast<std::size_t>(m)].passes = passes;
            spectrum[static_cast<std::size_t>(m)].test_residual = rel;
        }
        if (!passes) continue;

        const Eigen::VectorXcd x = phi * fit.matrixV().col(rank - 1);
        Candidate cand = tidy(H, from_coords(x, coarse_basis, chain, coarse), lambda);
        Eigenpair ep{cand.lambda, cand.f, cand.residual, 0.0, true};
        const auto& sigma1 = H.coarse_mask(0);
        for (std::int64_t s = 0; s < coarse.cell_count(); ++s)
            if (sigma1[static_cast<std::size_t>(s)])
                ep.unit_norm_deviation = std::max(ep.unit_norm_deviation, std::abs(cand.f.pointwise_norm(s) - 1.0));
        ep.unit_norm_ok = ep.unit_norm_deviation <= opts.tols.tol_norm;
        if (!ep.unit_norm_ok)
            v.anomalies.push_back("eigenpair " + std::to_string(v.eigenpairs.size() + 1) +
                                  " passes the eigen test but |f(cell)| deviates from 1 by " +
                                  std::to_string(ep.unit_norm_deviation));
        v.eigenpairs.push_back(std::move(ep));
    }

    std::stable_sort(spectrum.begin(), spectrum.end(), [](const SpectrumEntry& a, const SpectrumEntry& b) {
        const double ma = std::abs(a.nu), mb = std::abs(b.nu);
        if (ma != mb) return ma > mb;
        if (a.nu.real() != b.nu.real()) return a.nu.real() < b.nu.real();
        return a.nu.imag() < b.nu.imag();
    });
    v.spectrum = std::move(spectrum);

    // Diagnostics.
    {
        v.decay_curves.push_back({"ones", decay_probe(H, VecField::ones(chain, H.grid()), opts.decay_steps)});
        ProbeRng rng(opts.seed);
        v.decay_curves.push_back(
            {"random(seed=" + std::to_string(opts.seed) + ")",
             decay_probe(H, VecField::random(chain, H.grid(), rng), opts.decay_steps)});
    }
    if (!v.eigenpairs.empty()) {
        const VecField& f = v.eigenpairs.front().f;
        const int depth = std::min(max_martingale_depth(coarse.cell_count(), n), 6);
        const auto xs = martingale_sequence(f, f, n, depth);
        const double f2 = f.norm2();
        for (int k = 0; k <= depth; ++k) {
            double dev = 0.0;
            for (Complex z : xs[static_cast<std::size_t>(k)].samples()) dev = std::max(dev, std::abs(z - f2));
            v.martingale_table.push_back({k, dev});
        }
    }

    if (!contained) return v;
    v.status = v.eigenpairs.empty() ? PurityStatus::Pure_at_resolution : PurityStatus::NotPure_certified;
    if (opts.search_certificate) v.certificate = search_certificate(H);
    if (v.certificate) {
        if (v.status == PurityStatus::NotPure_certified) {
            v.soundness_violation = true;
            v.anomalies.push_back("a block certificate exists although an eigenvector passed the eigen test");
        } else {
            v.status = PurityStatus::Pure_certified;
        }
    } else if (v.status == PurityStatus::Pure_at_resolution) {
        v.notes.push_back("no eigenvector at this resolution and no block certificate; this does not decide purity of "
                          "the continuous operator, whose eigenvectors need not be step functions");
    }
    return v;
}

std::vector<StepFn> martingale_sequence(const VecField& f, const VecField& g, int N, int n_max) {
    require_same_space(f, g);
    if (n_max < 0) throw ParameterError("n_max must be >= 0");
    if (N < 2) throw ParameterError("N must be >= 2");
    const std::int64_t m = f.grid().cell_count();
    const std::int64_t top = checked_pow(N, n_max);
    if (m % top != 0)
        throw ResolutionError("N^" + std::to_string(n_max) + " = " + std::to_string(top) + " does not divide the " +
                              std::to_string(m) + " cells, so the kernel points are off the grid");

    std::vector<Complex> pointwise(static_cast<std::size_t>(m));
    for (std::int64_t t = 0; t < m; ++t) {
        Complex acc = 0.0;
        for (int i = 0; i < f.size(); ++i) acc += f(i, t) * std::conj(g(i, t));
        pointwise[static_cast<std::size_t>(t)] = acc;
    }

    std::vector<StepFn> out;
    for (int n = 0; n <= n_max; ++n) {
        const std::int64_t count = checked_pow(N, n);
        const std::int64_t stride = m / count;
        std::vector<Complex> x(static_cast<std::size_t>(m));
        for (std::int64_t t = 0; t < m; ++t) {
            Complex acc = 0.0;
            for (std::int64_t k = 0; k < count; ++k) acc += pointwise[static_cast<std::size_t>((t + k * stride) % m)];
            x[static_cast<std::size_t>(t)] = acc / static_cast<double>(count);
        }
        out.emplace_back(f.grid(), std::move(x));
    }
    return out;
}

std::vector<double> decay_probe(const FilterMatrix& H, const VecField& f, int n_max) {
    if (n_max < 0) throw ParameterError("n_max must be >= 0");
    std::vector<double> out{f.norm()};
    VecField g = f;
    for (int k = 0; k < n_max; ++k) {
        g = transfer_apply(H, g).include();
        out.push_back(g.norm());
    }
    return out;
}

}  // namespace genfilt
