#include <doctest.h>

#include <cmath>
#include <numbers>

#include "genfilt/error.hpp"
#include "genfilt/generators.hpp"
#include "genfilt/lowpass.hpp"
#include "genfilt/ruelle.hpp"
#include "test_support.hpp"

using namespace genfilt;

namespace {

const double kSqrt2 = std::numbers::sqrt2;

IntervalSet sym(Rat w) { return IntervalSet::from_intervals({{-w, w}}); }

}  // namespace

TEST_CASE("certificate epsilon") {
    for (double d : {1e-6, 0.1, 0.25, 0.4142, 0.999999, 1.0, 1.0 + 1e-12, 2.0, 17.0})
        CHECK(certificate_eps(d) == std::min(0.125, d / 8.0));
    CHECK(certificate_eps(0.1) == 0.0125);
    CHECK(certificate_eps(3.0) == 0.125);
}

TEST_CASE("check_certificate on known filters") {
    SUBCASE("constant filter fails the expansive block") {
        const auto chk = check_certificate(make_constant(), 1, 0.1, sym(Rat(1, 8)));
        CHECK_FALSE(chk);
        REQUIRE(chk.failure);
        CHECK(chk.failure->condition == CertificateCondition::expansive_block);
        CHECK(chk.failure->observed == 1.0);
        CHECK(chk.failure->required == doctest::Approx(1.1));
    }
    SUBCASE("haar with a = 1, delta = 0.3, F = [-1/8, 1/8)") {
        const auto chk = check_certificate(make_haar(), 1, 0.3, sym(Rat(1, 8)));
        REQUIRE(chk);
        CHECK(chk.certificate->min_singular_on_F >= 1.3);
        CHECK(chk.certificate->max_offblock_norm_on_F == 0.0);
        CHECK(chk.certificate->eps == certificate_eps(0.3));
        CHECK(chk.certificate->measure_F_cap_alphaF == Rat(1, 4));
        // too much expansion asked for
        const auto big = check_certificate(make_haar(), 1, 0.5, sym(Rat(1, 8)));
        REQUIRE(big.failure);
        CHECK(big.failure->condition == CertificateCondition::expansive_block);
        CHECK(big.failure->witness_cell >= 0);
    }
    SUBCASE("off-block failure is reported with its cell") {
        const FilterMatrix P = make_bcm_journe().with_sample(0, 1, 0, Complex(0.5, 0.0));
        const auto chk = check_certificate(P, 1, 0.1, sym(Rat(1, 112)));
        REQUIRE(chk.failure);
        CHECK(chk.failure->condition == CertificateCondition::small_offblocks);
        CHECK(chk.failure->witness_cell == 0);
        CHECK(chk.failure->observed == doctest::Approx(0.5));
    }
    SUBCASE("overlap failure") {
        const IntervalSet F = IntervalSet::interval(Rat(1, 8), Rat(3, 16));
        const auto chk = check_certificate(make_shannon(), 1, 0.1, F);
        REQUIRE(chk.failure);
        CHECK(chk.failure->condition == CertificateCondition::overlap_measure);
        CHECK(chk.failure->witness_cell == -1);
    }
    CHECK_THROWS_AS(check_certificate(make_haar(), 2, 0.1, sym(Rat(1, 8))), ParameterError);
    CHECK_THROWS_AS(check_certificate(make_haar(), 1, 0.0, sym(Rat(1, 8))), ParameterError);
    CHECK_THROWS_AS(check_certificate(make_haar(), 1, 0.1, IntervalSet::empty()), ParameterError);
}

TEST_CASE("certificate holds on every smaller symmetric F") {
    const auto top = check_certificate(make_haar({1, 6}), 1, 0.3, sym(Rat(1, 8)));
    REQUIRE(top);
    for (std::int64_t w = 1; w <= 8; ++w) CHECK(check_certificate(make_haar({1, 6}), 1, 0.3, sym(Rat(w, 64))));
}

TEST_CASE("search_certificate") {
    const auto h = search_certificate(make_haar());
    REQUIRE(h);
    CHECK(h->block_size_a == 1);
    CHECK(h->delta >= 0.3);
    CHECK(1.0 + h->delta <= h->min_singular_on_F);
    CHECK(h->eps == certificate_eps(h->delta));
    CHECK(check_certificate(make_haar(), h->block_size_a, h->delta, h->F));

    CHECK_FALSE(search_certificate(make_constant()));
    const auto b = search_certificate(make_bcm_journe());
    REQUIRE(b);
    CHECK(b->delta > 0.0);
    CHECK(b->measure_F_cap_alphaF > Rat(0));
    CHECK(search_certificate(make_shannon()));
}

TEST_CASE("derive_journe") {
    const JourneDerivation d = derive_journe(0.1);
    CHECK(d.r1 == 0.003125);
    CHECK(d.r2 == doctest::Approx(std::sqrt((kSqrt2 - 1.1) / 1.1)).epsilon(1e-15));
    CHECK(d.r == d.r1);
    CHECK(d.n == 112);
    CHECK(d.F == sym(Rat(1, 112)));
    CHECK(d.params.r == d.r);

    // independent re-check of the inequalities the block condition needs
    CHECK(1.0 / (kSqrt2 * std::sqrt(1.0 - 2.0 * d.r * d.r)) <= 1.0 / 1.1);
    CHECK(2.0 * d.r < std::min(0.125, 0.1 / 8.0));
    CHECK(d.r1 < std::min(1.0 / 16.0, 0.1 / 16.0));

    bool saw_informational = false;
    for (const auto& c : d.checks) {
        CHECK(c.holds == (c.margin > 0.0));
        if (c.name == "1/(sqrt2 sqrt(1 - 2 r2^2)) <= 1/(1 + delta)") {
            saw_informational = true;
            CHECK_FALSE(c.holds);  // r2 alone is too large at this delta
        } else {
            CHECK(c.holds);
        }
    }
    CHECK(saw_informational);

    const FilterMatrix H = make_journe_family(d.params);
    const auto chk = check_certificate(H, 1, d.delta, d.F);
    REQUIRE(chk);
    CHECK(chk.certificate->min_singular_on_F >= 1.0 + d.delta);

    CHECK_THROWS_AS(derive_journe(kSqrt2 - 1.0), ParameterError);
    CHECK_THROWS_AS(derive_journe(0.5), ParameterError);
    CHECK_THROWS_AS(derive_journe(0.0), ParameterError);

    for (double delta : {0.01, 0.05, 0.2, 0.4}) {
        const JourneDerivation e = derive_journe(delta);
        CHECK(e.n >= 7);
        CHECK(check_certificate(make_journe_family(e.params), 1, delta, e.F));
    }
}

TEST_CASE("soundness: a certificate never coexists with a unit-circle eigenvector") {
    ProbeRng rng(99);
    int certified = 0;
    for (int k = 0; k < 50; ++k) {
        const FilterMatrix H = k % 2 == 0 ? oracle::random_lowpass(rng, 4, 3) : oracle::random_filter(1 + k % 3, 2, 2, 3, rng);
        const auto cert = search_certificate(H);
        if (!cert) continue;
        ++certified;
        CHECK(check_certificate(H, cert->block_size_a, cert->delta, cert->F));
        const PurityVerdict v = classify_purity(H);
        CHECK(v.eigenpairs.empty());
        CHECK_FALSE(v.soundness_violation);
        CHECK(v.status == PurityStatus::Pure_certified);
        CHECK(oracle::unit_circle_gap(H, 256) > 0.0);
    }
    CHECK(certified >= 20);
}
