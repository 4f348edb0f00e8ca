#include "genfilt/generators.hpp"

#include <cmath>
#include <numbers>

#include "genfilt/error.hpp"

namespace genfilt {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
// Exactly half of kSqrt2, so 2 * kHalfSqrt2 == kSqrt2 bit for bit.
constexpr double kHalfSqrt2 = std::numbers::sqrt2 / 2.0;

IntervalSet centered(std::initializer_list<std::pair<Rat, Rat>> pieces) {
    return IntervalSet::from_intervals(std::vector<std::pair<Rat, Rat>>(pieces));
}

IntervalSet journe_e1() {
    return centered({{Rat(-2, 7), Rat(-1, 4)}, {Rat(-1, 7), Rat(1, 7)}, {Rat(1, 4), Rat(2, 7)}});
}

IntervalSet journe_e2() { return centered({{Rat(-1, 2), Rat(-3, 7)}, {Rat(3, 7), Rat(1, 2)}}); }

std::vector<StepFn> zero_entries(int c, const GridSpec& g) {
    return std::vector<StepFn>(static_cast<std::size_t>(c * c), StepFn(g));
}

// Smooth monotone step from 0 at u = 0 to 1 at u = 1.
double transition_value(Transition kind, double u) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    switch (kind) {
        case Transition::exp_bump: {
            const double a = std::exp(-1.0 / u);
            const double b = std::exp(-1.0 / (1.0 - u));
            return a / (a + b);
        }
        case Transition::polynomial_c2:
            return u * u * u * (u * (6.0 * u - 15.0) + 10.0);
    }
    return 0.0;
}

double fraction(const Rat& x, const Rat& lo, const Rat& hi) { return ((x - lo) / (hi - lo)).to_double(); }

void require_aligned(const Rat& point, std::int64_t cells, const char* what) {
    if (!(point * Rat(cells)).is_integer())
        throw AlignmentError(std::string("breakpoint ") + what + " = " + point.str() + " is not aligned with a grid of " +
                             std::to_string(cells) + " cells");
}

// Writes sign * amplitude on the cells of E; amplitude is per cell when given, else constant.
void fill_on(StepFn& entry, const IntervalSet& E, double sign, const std::vector<double>* amplitude, double constant) {
    const auto mask = cell_mask(E, entry.grid());
    for (std::int64_t t = 0; t < entry.size(); ++t) {
        if (!mask[static_cast<std::size_t>(t)]) continue;
        const double a = amplitude ? (*amplitude)[static_cast<std::size_t>(t)] : constant;
        if (a == 0.0) continue;
        entry[t] = Complex(sign * a, 0.0);
    }
}

}  // namespace

std::string to_string(PhaseConvention p) { return p == PhaseConvention::literal ? "literal" : "half_turn"; }
std::string to_string(Transition t) { return t == Transition::exp_bump ? "exp_bump" : "polynomial_c2"; }

PhaseConvention phase_from_string(const std::string& s) {
    if (s == "literal") return PhaseConvention::literal;
    if (s == "half_turn" || s == "half-turn") return PhaseConvention::half_turn;
    throw ParameterError("unknown phase convention '" + s + "' (expected literal or half_turn)");
}

Transition transition_from_string(const std::string& s) {
    if (s == "exp_bump" || s == "exp-bump") return Transition::exp_bump;
    if (s == "polynomial_c2" || s == "polynomial-c2") return Transition::polynomial_c2;
    throw ParameterError("unknown transition '" + s + "' (expected exp_bump or polynomial_c2)");
}

FilterMatrix make_haar(GridOptions opts) {
    const GridSpec g(2, opts.base_L, opts.depth_K);
    if (g.depth_K < 1) throw ResolutionError("haar filter needs depth K >= 1");
    const std::int64_t m = g.cell_count();
    const std::int64_t half = m / 2;
    StepFn h(g);
    for (std::int64_t t = 0; t < half; ++t) {
        const double angle = 2.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(m);
        const Complex z = t == 0 ? Complex(1.0, 0.0) : std::polar(1.0, angle);
        h[t] = (1.0 + z) * kHalfSqrt2;
        h[t + half] = (1.0 - z) * kHalfSqrt2;
    }
    return FilterMatrix(SigmaChain::constant(1), g, {h});
}

FilterMatrix make_constant(GridOptions opts, int N) {
    const GridSpec g(N, opts.base_L, opts.depth_K);
    return FilterMatrix(SigmaChain::constant(1), g, {StepFn(g, Complex(1.0, 0.0))});
}

FilterMatrix make_shannon(GridOptions opts) {
    const GridSpec g(2, opts.base_L, opts.depth_K);
    const IntervalSet pass = IntervalSet::interval(Rat(-1, 4), Rat(1, 4));
    StepFn h(g);
    fill_on(h, pass, 1.0, nullptr, kSqrt2);
    return FilterMatrix(SigmaChain::constant(1), g, {h});
}

IntervalSet journe_sigma1() {
    return centered({{Rat(-1, 2), Rat(-3, 7)}, {Rat(-2, 7), Rat(2, 7)}, {Rat(3, 7), Rat(1, 2)}});
}

IntervalSet journe_sigma2() { return IntervalSet::interval(Rat(-1, 7), Rat(1, 7)); }

FilterMatrix make_bcm_journe(GridOptions opts, PhaseConvention phase) {
    if (opts.base_L % 28 != 0) throw AlignmentError("bcm_journe needs L divisible by 28");
    const GridSpec g(2, opts.base_L, opts.depth_K);
    const double sign = phase == PhaseConvention::literal ? 1.0 : -1.0;
    auto entries = zero_entries(2, g);
    fill_on(entries[0], journe_e1(), sign, nullptr, kSqrt2);  // h11
    fill_on(entries[2], journe_e2(), sign, nullptr, kSqrt2);  // h21
    return FilterMatrix(SigmaChain({journe_sigma1(), journe_sigma2()}), g, std::move(entries));
}

std::vector<double> journe_profile(const JourneParams& p) {
    if (!(p.r > 0.0 && p.r < 1.0)) throw ParameterError("Journé parameter r must lie in (0, 1)");
    const Rat eps = p.eps_smooth;
    if (!(eps > Rat(0))) throw ParameterError("smoothing width eps must be positive");
    if (!(eps < Rat(1, 28))) throw ParameterError("smoothing width eps must satisfy eps < 1/28");
    const GridSpec& g = p.grid;
    if (g.scale_N != 2) throw ParameterError("the Journé family uses dilation N = 2");
    const std::int64_t m = g.cell_count();

    const Rat b1 = Rat(1, 7) - eps, b2 = Rat(3, 14) + eps, b3 = Rat(2, 7) - eps;
    const Rat b4 = Rat(5, 14) + eps, b5 = Rat(3, 7) - eps, b6 = Rat(3, 7) + eps;
    const Rat half(1, 2);
    require_aligned(b1, m, "1/7 - eps");
    require_aligned(b2, m, "3/14 + eps");
    require_aligned(b3, m, "2/7 - eps");
    require_aligned(b4, m, "5/14 + eps");
    require_aligned(b5, m, "3/7 - eps");
    require_aligned(b6, m, "3/7 + eps");
    require_aligned(Rat(1, 4), m, "1/4");
    require_aligned(Rat(1, 7), g.coarser().cell_count(), "1/7");

    const double q0 = kSqrt2 * std::sqrt(1.0 - p.r * p.r);
    const double q_half = kSqrt2 * p.r;
    auto theta = [&](double u) { return transition_value(p.transition, u); };

    std::vector<double> q(static_cast<std::size_t>(m), 0.0);
    const std::int64_t half_cells = m / 2;
    for (std::int64_t t = 0; t < half_cells; ++t) {
        const Rat x(t, m);
        double v = 0.0;
        if (x < b1) {
            v = q0 * (1.0 - theta(fraction(x, Rat(0), b1)));
        } else if (x <= b2) {
            v = 0.0;
        } else if (x < b3) {
            v = kSqrt2 * theta(fraction(x, b2, b3));
        } else if (x <= b4) {
            v = kSqrt2;
        } else if (x < b5) {
            // Not pinned down by the profile's definition; any monotone descent
            // from sqrt2 to 0 keeps the filter equation.
            v = kSqrt2 * (1.0 - theta(fraction(x, b4, b5)));
        } else if (x <= b6) {
            v = 0.0;
        } else {
            v = q_half * theta(fraction(x, b6, half));
        }
        q[static_cast<std::size_t>(t)] = v;
    }
    for (std::int64_t t = half_cells; t < m; ++t) {
        const double partner = q[static_cast<std::size_t>(t - half_cells)];
        q[static_cast<std::size_t>(t)] = std::sqrt(std::max(0.0, 2.0 - partner * partner));
    }
    return q;
}

FilterMatrix make_journe_family(const JourneParams& p) {
    const std::vector<double> q = journe_profile(p);
    const GridSpec& g = p.grid;
    const std::int64_t m = g.cell_count();
    std::vector<double> q_shift(static_cast<std::size_t>(m));
    for (std::int64_t t = 0; t < m; ++t) q_shift[static_cast<std::size_t>(t)] = q[static_cast<std::size_t>((t + m / 2) % m)];

    const double sign = p.phase == PhaseConvention::literal ? 1.0 : -1.0;
    auto entries = zero_entries(2, g);
    fill_on(entries[0], IntervalSet::interval(Rat(-2, 7), Rat(2, 7)), sign, &q, 0.0);  // h11
    fill_on(entries[1], journe_sigma2(), sign, &q_shift, 0.0);                          // h12
    fill_on(entries[2], journe_e2(), sign, nullptr, kSqrt2);                            // h21
    return FilterMatrix(SigmaChain({journe_sigma1(), journe_sigma2()}), g, std::move(entries));
}

}  // namespace genfilt
