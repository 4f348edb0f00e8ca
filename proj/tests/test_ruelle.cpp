#include <doctest.h>

#include <cstdlib>
#include <numbers>

#include "genfilt/error.hpp"
#include "genfilt/generators.hpp"
#include "genfilt/parallel.hpp"
#include "genfilt/residual.hpp"
#include "genfilt/ruelle.hpp"
#include "test_support.hpp"

using namespace genfilt;

namespace {

const double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

double max_diff(const VecField& a, const VecField& b) {
    double worst = 0.0;
    for (int i = 0; i < a.size(); ++i)
        for (std::int64_t t = 0; t < a.grid().cell_count(); ++t) worst = std::max(worst, std::abs(a(i, t) - b(i, t)));
    return worst;
}

bool is_pure(PurityStatus s) { return s == PurityStatus::Pure_certified || s == PurityStatus::Pure_at_resolution; }

}  // namespace

TEST_CASE("ruelle_apply on known filters") {
    const FilterMatrix c = make_constant();
    const VecField one = VecField::ones(c.chain(), c.coarse_grid());
    CHECK(ruelle_apply(c, one) == VecField::ones(c.chain(), c.grid()));

    const FilterMatrix h = make_haar();
    const VecField sh = ruelle_apply(h, VecField::ones(h.chain(), h.coarse_grid()));
    for (std::int64_t t = 0; t < h.cells(); ++t) CHECK(sh(0, t) == h(0, 0, t));

    CHECK_THROWS_AS(ruelle_apply(h, VecField::ones(h.chain(), h.grid())), GridMismatch);
}

TEST_CASE("ruelle_apply against pointwise evaluation and the isometry property") {
    ProbeRng rng(21);
    for (int k = 0; k < 12; ++k) {
        const FilterMatrix H = oracle::random_filter(1 + k % 3, 2 + k % 3, 2, 2, rng);
        const VecField f = VecField::random(H.chain(), H.coarse_grid(), rng);
        const VecField sf = ruelle_apply(H, f);
        CHECK(max_diff(sf, oracle::ruelle(H, f)) <= 1e-14);
        CHECK(std::abs(oracle::norm2(sf) - oracle::norm2(f)) <= 1e-12);
        CHECK(isometry_residual(H, 20, 3) <= 1e-12);
    }
    for (const auto& H : {make_haar(), make_shannon(), make_bcm_journe(), make_journe_family(JourneParams{})})
        CHECK(isometry_residual(H, 100, 1) <= 1e-12);

    // a non-filter is not an isometry
    const GridSpec g(2, 1, 3);
    const FilterMatrix bad(SigmaChain::constant(1), g, {StepFn(g, Complex(std::numbers::sqrt2, 0.0))});
    CHECK(isometry_residual(bad, 10, 1) > 0.1);
}

TEST_CASE("transfer_apply is the adjoint of ruelle_apply") {
    ProbeRng rng(4);
    for (int k = 0; k < 20; ++k) {
        const FilterMatrix H = oracle::random_filter(1 + k % 3, 2 + k % 2, 3, 2, rng);
        const VecField f = VecField::random(H.chain(), H.coarse_grid(), rng);
        const VecField g = VecField::random(H.chain(), H.grid(), rng);
        const Complex lhs = oracle::inner(ruelle_apply(H, f), g);
        const Complex rhs = oracle::inner(f, transfer_apply(H, g));
        CHECK(std::abs(lhs - rhs) <= 1e-14);
        CHECK(std::abs(f.inner(g.block_average()) - oracle::inner(f, g.block_average())) <= 1e-15);
    }
}

TEST_CASE("transfer_apply on known filters") {
    const FilterMatrix c = make_constant();
    CHECK(max_diff(transfer_apply(c, VecField::ones(c.chain(), c.grid())), VecField::ones(c.chain(), c.coarse_grid())) <=
          1e-15);
    const FilterMatrix h = make_haar();
    const VecField sh = transfer_apply(h, VecField::ones(h.chain(), h.grid()));
    for (std::int64_t t = 0; t < h.coarse_grid().cell_count(); ++t) CHECK(std::abs(sh(0, t) - kInvSqrt2) <= 1e-15);
}

TEST_CASE("assembled transfer matrix matches transfer_apply column by column") {
    ProbeRng rng(8);
    for (int k = 0; k < 4; ++k) {
        const FilterMatrix H = oracle::random_filter(1 + k % 3, 2, 3, 2, rng);
        const TransferMatrix T = assemble_transfer_matrix(H);
        for (Eigen::Index col = 0; col < T.entries.cols(); ++col) {
            const auto [i, t] = T.basis[static_cast<std::size_t>(col)];
            VecField e(H.chain(), H.grid());
            e.set(i, t, 1.0);
            const VecField img = transfer_apply(H, e).include();
            for (Eigen::Index row = 0; row < T.entries.rows(); ++row) {
                const auto [j, s] = T.basis[static_cast<std::size_t>(row)];
                CHECK(std::abs(T.entries(row, col) - img(j, s)) <= 1e-15);
            }
        }
        // include o S* factors through the coarse space
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(T.entries);
        svd.setThreshold(1e-10);
        CHECK(svd.rank() * H.N() <= T.dimension());
    }
}

TEST_CASE("classify: the constant filter is not pure") {
    const PurityVerdict v = classify_purity(make_constant());
    CHECK(v.status == PurityStatus::NotPure_certified);
    REQUIRE(v.eigenpairs.size() == 1);
    const Eigenpair& e = v.eigenpairs[0];
    CHECK(e.lambda == Complex(1.0, 0.0));
    for (std::int64_t t = 0; t < e.f.grid().cell_count(); ++t) CHECK(e.f(0, t) == Complex(1.0, 0.0));
    CHECK(e.residual == 0.0);
    CHECK(e.unit_norm_ok);
    CHECK_FALSE(v.certificate.has_value());
    CHECK_FALSE(v.soundness_violation);
    for (const auto& row : v.martingale_table) CHECK(row.max_deviation == 0.0);
}

TEST_CASE("classify: haar and shannon are pure, with an independent spectral gap") {
    for (int K : {4, 5, 6}) {
        for (const auto& H : {make_haar({1, K}), make_shannon({4, K})}) {
            const PurityVerdict v = classify_purity(H);
            CHECK(is_pure(v.status));
            CHECK(v.eigenpairs.empty());
            CHECK(v.max_abs_eigenvalue <= 1.0 + 1e-10);
            // no unit-circle eigenvalue of S at this resolution, proven by a
            // sampled sigma_min with a Lipschitz margin
            CHECK(oracle::unit_circle_gap(H, 512) > 0.0);
        }
    }
    const PurityVerdict hv = classify_purity(make_haar());
    CHECK(hv.status == PurityStatus::Pure_certified);
    bool has = false;
    for (const auto& s : hv.spectrum) has = has || std::abs(std::abs(s.nu) - kInvSqrt2) <= 1e-9;
    CHECK(has);
}

TEST_CASE("classify: spectrum lies in the closed unit disk and is sorted") {
    ProbeRng rng(13);
    for (int k = 0; k < 10; ++k) {
        const FilterMatrix H = oracle::random_filter(1 + k % 3, 2, 2 + k % 2, 2, rng);
        ClassifyOptions opts;
        opts.search_certificate = false;
        const PurityVerdict v = classify_purity(H, opts);
        CHECK(v.status != PurityStatus::Inconclusive);
        for (std::size_t a = 0; a < v.spectrum.size(); ++a) {
            CHECK(std::abs(v.spectrum[a].nu) <= 1.0 + 1e-10);
            if (a > 0) CHECK(std::abs(v.spectrum[a].nu) <= std::abs(v.spectrum[a - 1].nu));
        }
        // every accepted eigenpair is a genuine eigenvector of S
        for (const auto& e : v.eigenpairs) {
            const VecField r = ruelle_apply(H, e.f) - e.lambda * e.f.include();
            CHECK(r.norm() <= 1e-9 * e.f.norm());
            CHECK(std::abs(std::abs(e.lambda) - 1.0) <= 1e-8);
        }
    }
}

TEST_CASE("classify: an invalid filter is inconclusive") {
    const GridSpec g(2, 1, 3);
    const FilterMatrix bad(SigmaChain::constant(1), g, {StepFn(g, Complex(std::numbers::sqrt2, 0.0))});
    CHECK(classify_purity(bad).status == PurityStatus::Inconclusive);
}

TEST_CASE("martingale sequence") {
    ProbeRng rng(2);
    const FilterMatrix H = oracle::random_filter(2, 2, 3, 3, rng);
    const VecField f = VecField::random(H.chain(), H.grid(), rng);
    const VecField g = VecField::random(H.chain(), H.grid(), rng);
    const auto xs = martingale_sequence(f, g, 2, 3);
    REQUIRE(xs.size() == 4);
    const Complex mean0 = oracle::inner(f, g);
    for (int n = 0; n <= 3; ++n) {
        Complex mean = 0.0;
        for (Complex z : xs[static_cast<std::size_t>(n)].samples()) mean += z;
        mean /= static_cast<double>(H.cells());
        CHECK(std::abs(mean - mean0) <= 1e-14);
        for (std::int64_t t = 0; t < H.cells(); ++t)
            CHECK(std::abs(xs[static_cast<std::size_t>(n)][t] - oracle::martingale_at(f, g, 2, n, t)) <= 1e-14);
    }
    CHECK_THROWS_AS(martingale_sequence(f, g, 2, 4), ResolutionError);
}

TEST_CASE("decay probe") {
    const FilterMatrix c = make_constant();
    for (double x : decay_probe(c, VecField::ones(c.chain(), c.grid()), 6)) CHECK(std::abs(x - 1.0) <= 1e-15);

    const FilterMatrix h = make_haar();
    const auto d = decay_probe(h, VecField::ones(h.chain(), h.grid()), 3);
    CHECK(d[0] == doctest::Approx(1.0));
    CHECK(d[1] == doctest::Approx(kInvSqrt2));
    CHECK(d[2] == doctest::Approx(0.5));

    ProbeRng rng(6);
    for (int k = 0; k < 6; ++k) {
        const FilterMatrix H = oracle::random_filter(1 + k % 3, 2, 2, 3, rng);
        const auto curve = decay_probe(H, VecField::random(H.chain(), H.grid(), rng), 8);
        for (std::size_t n = 1; n < curve.size(); ++n) CHECK(curve[n] <= curve[n - 1] * (1.0 + 1e-12));
    }
}

TEST_CASE("dimension cap") {
    const FilterMatrix h = make_haar({1, 4});  // c M = 16
    ::setenv("GENFILT_DIM_CAP", "8", 1);
    CHECK(dimension_cap() == 8);
    CHECK_THROWS_AS(assemble_transfer_matrix(h), DimensionCapExceeded);
    CHECK_THROWS_AS(classify_purity(h), DimensionCapExceeded);
    ::setenv("GENFILT_DIM_CAP", "16", 1);
    CHECK_NOTHROW(assemble_transfer_matrix(h));
    ::setenv("GENFILT_DIM_CAP", "lots", 1);
    CHECK_THROWS_AS(dimension_cap(), ParameterError);
    ::unsetenv("GENFILT_DIM_CAP");
    CHECK(dimension_cap() == 4096);
}

TEST_CASE("results do not depend on the thread count") {
    const FilterMatrix H = make_journe_family(JourneParams{});
    set_thread_count(1);
    const PurityVerdict a = classify_purity(H);
    const double ra = filter_equation_residual(H).max_abs_residual;
    set_thread_count(4);
    const PurityVerdict b = classify_purity(H);
    const double rb = filter_equation_residual(H).max_abs_residual;
    set_thread_count(1);
    CHECK(a.status == b.status);
    CHECK(ra == rb);
    REQUIRE(a.spectrum.size() == b.spectrum.size());
    for (std::size_t k = 0; k < a.spectrum.size(); ++k) CHECK(a.spectrum[k].nu == b.spectrum[k].nu);
    CHECK(a.decay_curves.size() == b.decay_curves.size());
    for (std::size_t k = 0; k < a.decay_curves.size(); ++k) CHECK(a.decay_curves[k].norms == b.decay_curves[k].norms);
}
