#include "genfilt/gmra.hpp"

#include <cmath>

#include "genfilt/error.hpp"

namespace genfilt {

Tower build_tower(const FilterMatrix& H, int depth, int trials, std::uint64_t seed) {
    if (depth < 1) throw ParameterError("tower depth must be >= 1");
    if (trials < 1) throw ParameterError("tower probes need trials >= 1");
    const int K = H.grid().depth_K;
    const std::int64_t top = static_cast<std::int64_t>(H.size()) * H.grid().at_depth(K - 1 + depth).cell_count();
    if (const std::int64_t cap = dimension_cap(); top > cap)
        throw DimensionCapExceeded("tower top level has dimension " + std::to_string(top) + " > cap " +
                                   std::to_string(cap));

    Tower tower;
    tower.depth = depth;
    tower.trials = trials;
    tower.seed = seed;
    for (int k = 0; k <= depth; ++k) {
        const GridSpec g = H.grid().at_depth(K - 1 + k);
        tower.levels.push_back({g, static_cast<std::int64_t>(H.size()) * g.cell_count(), -1.0});
    }
    for (int k = 0; k < depth; ++k) tower.embeddings.push_back(refine_to(H, K + k));

    ProbeRng rng(seed);
    for (int k = 0; k < depth; ++k) {
        double worst = 0.0;
        for (int p = 0; p < trials; ++p) {
            const VecField f = VecField::random(H.chain(), tower.levels[static_cast<std::size_t>(k)].grid, rng);
            worst = std::max(worst, std::abs(ruelle_apply(tower.embeddings[static_cast<std::size_t>(k)], f).norm2() -
                                             f.norm2()));
        }
        tower.levels[static_cast<std::size_t>(k)].embedding_residual = worst;
    }
    for (int p = 0; p < trials; ++p) {
        const VecField f = VecField::random(H.chain(), tower.levels.front().grid, rng);
        tower.composed_residual =
            std::max(tower.composed_residual, std::abs(tower_apply(tower, f, depth).norm() - f.norm()));
    }
    return tower;
}

VecField tower_apply(const Tower& tower, const VecField& f, int k) {
    if (k < 0 || k > tower.depth) throw ParameterError("embedding count out of range");
    VecField g = f;
    for (int s = 0; s < k; ++s) g = ruelle_apply(tower.embeddings[static_cast<std::size_t>(s)], g);
    return g;
}

std::string to_string(IntersectionStatus s) {
    switch (s) {
        case IntersectionStatus::nontrivial: return "nontrivial";
        case IntersectionStatus::trivial: return "trivial";
        case IntersectionStatus::inconclusive: return "inconclusive";
    }
    return "unknown";
}

bool is_constant_filter(const FilterMatrix& H) {
    if (H.size() != 1) return false;
    for (Complex z : H.entry(0, 0).samples())
        if (z != Complex(1.0, 0.0)) return false;
    return true;
}

IntersectionReport intersection_report(const FilterMatrix& H, PurityVerdict verdict) {
    IntersectionReport rep;
    rep.purity = std::move(verdict);
    const PurityVerdict& v = rep.purity;

    switch (v.status) {
        case PurityStatus::NotPure_certified:
            rep.intersection = IntersectionStatus::nontrivial;
            rep.witness = v.eigenpairs.front();
            rep.statement =
                "the intersection of the V_j is nonzero in the continuous model; S has the eigenvector f below, and "
                "an eigenvector of S is exactly what a nonzero vector in every V_j looks like through the filter";
            break;
        case PurityStatus::Pure_certified:
            rep.intersection = IntersectionStatus::trivial;
            rep.statement =
                "the intersection of the V_j is {0}: the block certificate makes S a pure isometry, so S has no "
                "eigenvector";
            break;
        case PurityStatus::Pure_at_resolution:
            rep.intersection = IntersectionStatus::inconclusive;
            rep.statement =
                "no step eigenvector at this resolution and no block certificate, so the continuous model is "
                "undecided";
            break;
        case PurityStatus::Inconclusive:
            rep.intersection = IntersectionStatus::inconclusive;
            rep.statement = "the purity analysis was inconclusive, so the intersection is undecided";
            break;
    }

    const bool full_sigma1 = H.chain()[0].is_full();
    rep.equivalence_table.push_back(
        {"m is finite on a set of positive measure", "m takes values in 0.." + std::to_string(H.size()), true});
    rep.equivalence_table.push_back(
        {"S has a unit-circle eigenvector",
         v.status == PurityStatus::NotPure_certified
             ? "yes, lambda = " + std::to_string(v.eigenpairs.front().lambda.real()) + " + " +
                   std::to_string(v.eigenpairs.front().lambda.imag()) + "i"
             : (v.status == PurityStatus::Pure_certified ? "no (certified)" : "not decided"),
         v.status == PurityStatus::NotPure_certified});
    rep.equivalence_table.push_back({"the intersection of the V_j is nonzero", to_string(rep.intersection),
                                     rep.intersection == IntersectionStatus::nontrivial});
    rep.equivalence_table.push_back(
        {"sigma_1 is the whole circle (needed for an eigenvector)", full_sigma1 ? "yes" : "no", full_sigma1});

    if (is_constant_filter(H)) {
        rep.dyadic_example =
            "h = 1 is the filter of the GMRA in l^2 of the dyadic rationals with core subspace l^2(Z). After the "
            "Fourier transform the dilation acts as f(z) -> f(z^2), which is S for h = 1. The point mass at 0 is "
            "fixed by the dilation and lies in every V_j, so the intersection is nonzero; its shadow here is the "
            "eigenvector f = 1 with lambda = 1.";
    }
    rep.caveats.push_back(
        "when the intersection is nonzero it is infinite-dimensional; one eigenvector is exhibited, not a basis");
    rep.caveats.push_back("density of the union of the V_j has no finite-depth analogue and is not checked");
    return rep;
}

IntersectionReport intersection_report(const FilterMatrix& H, const ClassifyOptions& opts) {
    return intersection_report(H, classify_purity(H, opts));
}

}  // namespace genfilt
