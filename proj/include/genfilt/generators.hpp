#pragma once

#include <string>

#include "genfilt/filter.hpp"

namespace genfilt {

/// Grid knobs shared by the built-in generators.
struct GridOptions {
    std::int64_t base_L;
    int depth_K;
};

/// Sign applied on the set E in the Journé-type entries sqrt2 * e^{2 pi i chi_E}.
/// `literal` evaluates e^{2 pi i} = 1; `half_turn` uses e^{pi i} = -1.
/// In both cases chi_E also restricts the entry's support to E.
enum class PhaseConvention { literal, half_turn };

enum class Transition { exp_bump, polynomial_c2 };

std::string to_string(PhaseConvention p);
std::string to_string(Transition t);
PhaseConvention phase_from_string(const std::string& s);
Transition transition_from_string(const std::string& s);

/// Parameters of the smooth-profile Journé family H^q.
struct JourneParams {
    double r = 0.003125;
    Rat eps_smooth = Rat(1, 56);
    Transition transition = Transition::exp_bump;
    PhaseConvention phase = PhaseConvention::literal;
    GridSpec grid = GridSpec(2, 56, 2);
};

/// Classical 1x1 quadrature mirror filter h(x) = (1 + e^{2 pi i x}) / sqrt2, N = 2.
/// Cells in [0, 1/2) are sampled at their left endpoint z; the partner cell
/// half a turn away gets (1 - z) / sqrt2, so every pair sums to 2 in modulus squared.
FilterMatrix make_haar(GridOptions grid = {1, 4});

/// h = 1, m = 1: the dilation-invariant filter whose Ruelle operator fixes
/// the constants.
FilterMatrix make_constant(GridOptions grid = {1, 4}, int N = 2);

/// h = sqrt2 on [0, 1/4) u [3/4, 1), zero elsewhere; N = 2, m = 1.
FilterMatrix make_shannon(GridOptions grid = {4, 4});

/// The 2x2 Journé filter with entries sqrt2 * chi_E1 and sqrt2 * chi_E2.
/// L must be a multiple of 28.
FilterMatrix make_bcm_journe(GridOptions grid = {28, 2}, PhaseConvention phase = PhaseConvention::literal);

/// The one-parameter Journé family H^q built from the profile q.
FilterMatrix make_journe_family(const JourneParams& params);

/// Journé multiplicity sets in [0, 1) coordinates.
IntervalSet journe_sigma1();
IntervalSet journe_sigma2();

/// Profile q on the left endpoints of `grid`, complement rule included.
std::vector<double> journe_profile(const JourneParams& params);

}  // namespace genfilt
