#pragma once

#include <optional>
#include <string>
#include <vector>

#include "genfilt/filter.hpp"
#include "genfilt/generators.hpp"

namespace genfilt {

/// Block-condition purity certificate.
///
/// On every cell of F the filter matrix splits as [[A, B], [C, D]] with A of
/// size a x a, sigma_min(A) >= 1 + delta, and the operator norms of B, C, D
/// below eps = min(1/8, delta/8); F and its image under x -> N x overlap in
/// positive measure. Any such filter has a pure Ruelle operator.
struct Certificate {
    int block_size_a = 1;
    double delta = 0.0;
    double eps = 0.0;
    IntervalSet F;
    double min_singular_on_F = 0.0;
    double max_offblock_norm_on_F = 0.0;
    Rat measure_F_cap_alphaF;
};

enum class CertificateCondition { expansive_block, small_offblocks, overlap_measure };
std::string to_string(CertificateCondition c);

struct CertificateFailure {
    CertificateCondition condition;
    std::int64_t witness_cell = -1;  ///< -1 for the measure condition
    double observed = 0.0;
    double required = 0.0;
    std::string detail;
};

/// Either a certificate or the first violated condition.
struct CertificateCheck {
    std::optional<Certificate> certificate;
    std::optional<CertificateFailure> failure;

    explicit operator bool() const { return certificate.has_value(); }
};

inline double certificate_eps(double delta) { return std::min(1.0 / 8.0, delta / 8.0); }

/// Checks the block condition with block size a on F. F must be aligned with
/// H's grid; a must lie in [1, c]; delta must be positive.
CertificateCheck check_certificate(const FilterMatrix& H, int a, double delta, const IntervalSet& F);

/// Scans a = 1..c and the symmetric intervals F = [-w/M, w/M), keeping the
/// largest delta (then the larger F, then the smaller a).
std::optional<Certificate> search_certificate(const FilterMatrix& H);

/// Parameter choices for the smooth Journé family at a given delta.
struct InequalityCheck {
    std::string name;
    bool holds = false;
    double margin = 0.0;  ///< positive iff the inequality holds with room
};

struct JourneDerivation {
    double delta = 0.0;
    int n = 0;  ///< F = [-1/n, 1/n)
    double r1 = 0.0;
    double r2 = 0.0;
    double r = 0.0;
    JourneParams params;
    IntervalSet F;
    std::vector<InequalityCheck> checks;
};

/// r1 = min(1/16, delta/16) / 2, r2 = sqrt((sqrt2 - (1 + delta)) / (1 + delta)),
/// r = min(r1, r2), then the smallest n >= 7 with 1/n on the grid such that the
/// sampled profile exceeds sqrt2 sqrt(1 - 2 r^2) and |h12| < min(1/8, delta/8)
/// on F = [-1/n, 1/n).
///
/// Throws ParameterError when delta is outside (0, sqrt2 - 1) or when r fails
/// one of the two inequalities the block condition needs, and ResolutionError
/// when no admissible n exists on the grid.
JourneDerivation derive_journe(double delta, const GridSpec& grid = GridSpec(2, 56, 2),
                               Transition transition = Transition::exp_bump,
                               PhaseConvention phase = PhaseConvention::literal,
                               Rat eps_smooth = Rat(1, 56));

}  // namespace genfilt
