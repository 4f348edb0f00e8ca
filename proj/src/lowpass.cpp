#include "genfilt/lowpass.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "genfilt/error.hpp"
#include "genfilt/parallel.hpp"

namespace genfilt {

namespace {

struct BlockNorms {
    double min_singular_a = 0.0;
    double max_offblock = 0.0;
};

double spectral_norm(const Eigen::MatrixXcd& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    return svd.singularValues()(0);
}

BlockNorms block_norms(const Eigen::MatrixXcd& h, int a) {
    const int c = static_cast<int>(h.rows());
    const int b = c - a;
    BlockNorms out;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(h.topLeftCorner(a, a));
    out.min_singular_a = svd.singularValues()(a - 1);
    out.max_offblock = std::max({spectral_norm(h.topRightCorner(a, b)), spectral_norm(h.bottomLeftCorner(b, a)),
                                 spectral_norm(h.bottomRightCorner(b, b))});
    return out;
}

std::vector<BlockNorms> all_block_norms(const FilterMatrix& H, int a) {
    std::vector<BlockNorms> out(static_cast<std::size_t>(H.cells()));
    parallel_for(H.cells(), [&](std::int64_t t) { out[static_cast<std::size_t>(t)] = block_norms(H.matrix_at(t), a); });
    return out;
}

IntervalSet symmetric_cells(std::int64_t w, std::int64_t m) { return IntervalSet::interval(Rat(-w, m), Rat(w, m)); }

}  // namespace

std::string to_string(CertificateCondition c) {
    switch (c) {
        case CertificateCondition::expansive_block: return "expansive_block";
        case CertificateCondition::small_offblocks: return "small_offblocks";
        case CertificateCondition::overlap_measure: return "overlap_measure";
    }
    return "unknown";
}

CertificateCheck check_certificate(const FilterMatrix& H, int a, double delta, const IntervalSet& F) {
    const int c = H.size();
    if (a < 1 || a > c) throw ParameterError("block size a must lie in [1, " + std::to_string(c) + "]");
    if (!(delta > 0.0)) throw ParameterError("delta must be positive");
    if (F.is_empty()) throw ParameterError("certificate set F must have positive measure");
    const auto mask = cell_mask(F, H.grid());
    const double eps = certificate_eps(delta);

    CertificateCheck out;
    std::optional<CertificateFailure> expansive, offblock;
    double min_sing = std::numeric_limits<double>::infinity();
    double max_off = 0.0;
    for (std::int64_t t = 0; t < H.cells(); ++t) {
        if (!mask[static_cast<std::size_t>(t)]) continue;
        const BlockNorms bn = block_norms(H.matrix_at(t), a);
        min_sing = std::min(min_sing, bn.min_singular_a);
        max_off = std::max(max_off, bn.max_offblock);
        if (!expansive && !(bn.min_singular_a >= 1.0 + delta)) {
            expansive = CertificateFailure{CertificateCondition::expansive_block, t, bn.min_singular_a, 1.0 + delta,
                                           "sigma_min(A) = " + std::to_string(bn.min_singular_a) + " < 1 + delta"};
        }
        if (!offblock && !(bn.max_offblock < eps)) {
            offblock = CertificateFailure{CertificateCondition::small_offblocks, t, bn.max_offblock, eps,
                                          "max(|B|, |C|, |D|) = " + std::to_string(bn.max_offblock) +
                                              " >= min(1/8, delta/8)"};
        }
    }
    const Rat overlap = F.intersect(image_under_alpha_star(F, H.N())).measure();

    if (expansive) {
        out.failure = expansive;
    } else if (offblock) {
        out.failure = offblock;
    } else if (!(overlap > Rat(0))) {
        out.failure = CertificateFailure{CertificateCondition::overlap_measure, -1, overlap.to_double(), 0.0,
                                         "F and its image under x -> N x overlap in a null set"};
    } else {
        out.certificate = Certificate{a, delta, eps, F, min_sing, max_off, overlap};
    }
    return out;
}

std::optional<Certificate> search_certificate(const FilterMatrix& H) {
    const std::int64_t m = H.cells();
    struct Best {
        int a;
        std::int64_t w;
        double smin;
    };
    std::optional<Best> best;
    for (int a = 1; a <= H.size(); ++a) {
        const auto norms = all_block_norms(H, a);
        double smin = std::numeric_limits<double>::infinity();
        double off = 0.0;
        for (std::int64_t w = 1; 2 * w <= m; ++w) {
            for (std::int64_t t : {w - 1, m - w}) {
                smin = std::min(smin, norms[static_cast<std::size_t>(t)].min_singular_a);
                off = std::max(off, norms[static_cast<std::size_t>(t)].max_offblock);
            }
            const double delta = smin - 1.0;
            if (!(delta > 0.0) || !(off < certificate_eps(delta))) continue;
            // Larger delta, then larger F; a only grows in the outer loop, so
            // equal (delta, F) keeps the smaller a.
            if (!best || smin > best->smin || (smin == best->smin && w > best->w)) best = Best{a, w, smin};
        }
    }
    if (!best) return std::nullopt;

    double delta = best->smin - 1.0;
    while (1.0 + delta > best->smin) delta = std::nextafter(delta, 0.0);
    auto check = check_certificate(H, best->a, delta, symmetric_cells(best->w, m));
    return check.certificate;
}

JourneDerivation derive_journe(double delta, const GridSpec& grid, Transition transition, PhaseConvention phase,
                               Rat eps_smooth) {
    const double sqrt2 = std::numbers::sqrt2;
    if (!(delta > 0.0 && delta < sqrt2 - 1.0))
        throw ParameterError("delta = " + std::to_string(delta) + " violates 0 < delta < sqrt2 - 1");

    JourneDerivation d;
    d.delta = delta;
    const double r1_bound = std::min(1.0 / 16.0, delta / 16.0);
    d.r1 = r1_bound / 2.0;
    d.r2 = std::sqrt((sqrt2 - (1.0 + delta)) / (1.0 + delta));
    d.r = std::min(d.r1, d.r2);

    const double target = 1.0 / (1.0 + delta);
    const double eps = certificate_eps(delta);
    auto inverse_bound = [&](double r) {
        const double inner = 1.0 - 2.0 * r * r;
        return inner > 0.0 ? 1.0 / (sqrt2 * std::sqrt(inner)) : std::numeric_limits<double>::infinity();
    };
    auto add = [&](std::string name, double margin) {
        d.checks.push_back({std::move(name), margin > 0.0, margin});
    };
    add("r1 < min(1/16, delta/16)", r1_bound - d.r1);
    add("delta < sqrt2 - 1", (sqrt2 - 1.0) - delta);
    {
        const double m2 = target - inverse_bound(d.r2);
        d.checks.push_back({"1/(sqrt2 sqrt(1 - 2 r2^2)) <= 1/(1 + delta)", m2 >= 0.0, m2});
    }
    const double m_inv = target - inverse_bound(d.r);
    d.checks.push_back({"1/(sqrt2 sqrt(1 - 2 r^2)) <= 1/(1 + delta)", m_inv >= 0.0, m_inv});
    add("2 r < min(1/8, delta/8)", eps - 2.0 * d.r);
    if (!(m_inv >= 0.0))
        throw ParameterError("r = " + std::to_string(d.r) + " violates 1/(sqrt2 sqrt(1 - 2 r^2)) <= 1/(1 + delta)");
    if (!(2.0 * d.r < eps)) throw ParameterError("r = " + std::to_string(d.r) + " violates 2 r < min(1/8, delta/8)");

    d.params.r = d.r;
    d.params.transition = transition;
    d.params.phase = phase;
    d.params.grid = grid;
    d.params.eps_smooth = eps_smooth;
    const FilterMatrix H = make_journe_family(d.params);

    const double q_floor = sqrt2 * std::sqrt(1.0 - 2.0 * d.r * d.r);
    const std::int64_t m = grid.cell_count();
    for (std::int64_t n = 7; n <= m; ++n) {
        if (m % n != 0) continue;
        const std::int64_t w = m / n;
        double q_min = std::numeric_limits<double>::infinity();
        double h12_max = 0.0;
        for (std::int64_t k = 0; k < w; ++k) {
            for (std::int64_t t : {k, m - 1 - k}) {
                q_min = std::min(q_min, std::abs(H(0, 0, t)));
                h12_max = std::max(h12_max, std::abs(H(0, 1, t)));
            }
        }
        if (q_min > q_floor && h12_max < eps) {
            d.n = static_cast<int>(n);
            d.F = symmetric_cells(w, m);
            d.checks.push_back({"n >= 7", true, static_cast<double>(n - 7)});
            add("q > sqrt2 sqrt(1 - 2 r^2) on F", q_min - q_floor);
            add("|h12| < min(1/8, delta/8) on F", eps - h12_max);
            return d;
        }
    }
    throw ResolutionError("no n >= 7 with 1/n on the grid keeps q above sqrt2 sqrt(1 - 2 r^2) on [-1/n, 1/n); refine the grid");
}

}  // namespace genfilt
