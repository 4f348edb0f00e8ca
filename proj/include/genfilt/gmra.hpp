#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "genfilt/filter.hpp"
#include "genfilt/ruelle.hpp"

namespace genfilt {

/// Finite-depth resolution tower V_0 -> V_1 -> ... -> V_depth.
///
/// Level k is the step space on the grid of depth K-1+k, so V_0 is the domain
/// of S for the filter as given. Each embedding V_k -> V_{k+1} is S for the
/// filter refined to depth K+k.
struct TowerLevel {
    GridSpec grid;
    std::int64_t dimension = 0;  ///< c * cells
    /// max over probes of | |S f|^2 - |f|^2 | for the embedding out of this
    /// level; -1 on the top level, which has no outgoing embedding.
    double embedding_residual = -1.0;
};

struct Tower {
    int depth = 0;
    std::vector<TowerLevel> levels;
    std::vector<FilterMatrix> embeddings;  ///< embeddings[k] maps level k to k+1
    int trials = 0;
    std::uint64_t seed = 0;
    /// max over probes on V_0 of | |S^depth f| - |f| |.
    double composed_residual = 0.0;
};

/// Throws ParameterError for depth < 1 and DimensionCapExceeded when the top
/// level exceeds dimension_cap().
Tower build_tower(const FilterMatrix& H, int depth, int trials = 20, std::uint64_t seed = 1);

/// Applies the first k embeddings to f, a field on level 0.
VecField tower_apply(const Tower& tower, const VecField& f, int k);

enum class IntersectionStatus { nontrivial, trivial, inconclusive };
std::string to_string(IntersectionStatus s);

/// One row relating the nested-subspace side to the eigenvector side.
struct EquivalenceCheck {
    std::string condition;
    std::string finding;
    bool holds = false;
};

struct IntersectionReport {
    PurityVerdict purity;
    IntersectionStatus intersection = IntersectionStatus::inconclusive;
    std::string statement;
    std::optional<Eigenpair> witness;
    std::vector<EquivalenceCheck> equivalence_table;
    /// How h = 1 realizes the dyadic-rational GMRA; empty for other filters.
    std::string dyadic_example;
    std::vector<std::string> caveats;
};

/// True iff H is the 1 x 1 filter h = 1.
bool is_constant_filter(const FilterMatrix& H);

/// Reads the intersection of the V_j off an existing purity verdict. The
/// status is a function of verdict.status alone.
IntersectionReport intersection_report(const FilterMatrix& H, PurityVerdict verdict);
IntersectionReport intersection_report(const FilterMatrix& H, const ClassifyOptions& opts = {});

}  // namespace genfilt
