#include "genfilt/report.hpp"

#include <cmath>
#include <sstream>

#include "genfilt/bundle.hpp"

namespace genfilt {

namespace {

Json complex_json(Complex z) { return Json::array({decimal(z.real()), decimal(z.imag())}); }

}  // namespace

std::string cell_interval(const GridSpec& grid, std::int64_t t) {
    return "[" + grid.left_endpoint(t).str() + ", " + grid.left_endpoint(t + 1).str() + ")";
}

Json residual_json(const ResidualReport& r, const GridSpec& grid, double tolerance) {
    Json per_pair = Json::array();
    for (Eigen::Index a = 0; a < r.per_pair.rows(); ++a) {
        Json row = Json::array();
        for (Eigen::Index b = 0; b < r.per_pair.cols(); ++b) row.push_back(decimal(r.per_pair(a, b)));
        per_pair.push_back(std::move(row));
    }
    return Json{{"max_abs_residual", decimal(r.max_abs_residual)},
                {"tolerance", decimal(tolerance)},
                {"passes", r.max_abs_residual <= tolerance},
                {"witness",
                 {{"cell", r.argmax_cell},
                  {"interval", cell_interval(grid, r.argmax_cell)},
                  {"pair", Json::array({r.argmax_row + 1, r.argmax_col + 1})}}},
                {"grid_cells", r.grid_cells},
                {"per_pair", std::move(per_pair)}};
}

Json certificate_json(const Certificate& c) {
    return Json{{"block_size_a", c.block_size_a},
                {"delta", decimal(c.delta)},
                {"eps", decimal(c.eps)},
                {"F", c.F.str()},
                {"margins",
                 {{"min_singular_on_F", decimal(c.min_singular_on_F)},
                  {"required_min_singular", decimal(1.0 + c.delta)},
                  {"max_offblock_norm_on_F", decimal(c.max_offblock_norm_on_F)},
                  {"required_offblock_below", decimal(c.eps)},
                  {"measure_F_cap_alphaF", c.measure_F_cap_alphaF.str()}}}};
}

Json certificate_failure_json(const CertificateFailure& f, const GridSpec& grid) {
    Json out{{"condition", to_string(f.condition)},
             {"observed", decimal(f.observed)},
             {"required", decimal(f.required)},
             {"detail", f.detail}};
    if (f.witness_cell >= 0) out["witness"] = {{"cell", f.witness_cell}, {"interval", cell_interval(grid, f.witness_cell)}};
    return out;
}

Json vecfield_json(const VecField& f) {
    Json comps = Json::array();
    for (int i = 0; i < f.size(); ++i) {
        Json samples = Json::array();
        for (Complex z : f.component(i).samples()) samples.push_back(complex_json(z));
        comps.push_back(std::move(samples));
    }
    return Json{{"grid", {{"N", f.grid().scale_N}, {"L", f.grid().base_L}, {"K", f.grid().depth_K}}},
                {"components", std::move(comps)}};
}

Json purity_json(const PurityVerdict& v) {
    Json pairs = Json::array();
    for (const auto& e : v.eigenpairs) {
        pairs.push_back(Json{{"lambda", complex_json(e.lambda)},
                             {"residual", decimal(e.residual)},
                             {"unit_norm_deviation", decimal(e.unit_norm_deviation)},
                             {"unit_norm_ok", e.unit_norm_ok},
                             {"f", vecfield_json(e.f)}});
    }
    Json near = Json::array();
    std::size_t passing = 0;
    for (const auto& s : v.spectrum) {
        if (s.passes) ++passing;
        if (!s.near_unit) continue;
        near.push_back(Json{{"nu", complex_json(s.nu)},
                            {"abs", decimal(std::abs(s.nu))},
                            {"test_residual", decimal(s.test_residual)},
                            {"passes", s.passes}});
    }
    Json decay = Json::array();
    for (const auto& c : v.decay_curves) {
        Json norms = Json::array();
        for (double x : c.norms) norms.push_back(decimal(x));
        decay.push_back(Json{{"probe", c.probe}, {"norms", std::move(norms)}});
    }
    Json mart = Json::array();
    for (const auto& r : v.martingale_table) mart.push_back(Json{{"n", r.n}, {"max_deviation", decimal(r.max_deviation)}});

    Json out{{"status", to_string(v.status)},
             {"resolution", {{"N", v.resolution.scale_N}, {"L", v.resolution.base_L}, {"K", v.resolution.depth_K}}},
             {"tolerances",
              {{"tol_eig", decimal(v.tols.tol_eig)},
               {"tol_res", decimal(v.tols.tol_res)},
               {"tol_norm", decimal(v.tols.tol_norm)}}},
             {"filter_residual", decimal(v.filter_residual)},
             {"spectrum_size", v.spectrum.size()},
             {"max_abs_eigenvalue", decimal(v.max_abs_eigenvalue)},
             {"near_unit_eigenvalues", std::move(near)},
             {"passing_eigenvalues", passing},
             {"eigenpairs", std::move(pairs)},
             {"certificate", v.certificate ? certificate_json(*v.certificate) : Json(nullptr)},
             {"soundness_violation", v.soundness_violation},
             {"diagnostics", {{"decay_curves", std::move(decay)}, {"martingale_table", std::move(mart)}}},
             {"notes", v.notes},
             {"anomalies", v.anomalies}};
    return out;
}

Json intersection_json(const IntersectionReport& r) {
    Json table = Json::array();
    for (const auto& row : r.equivalence_table)
        table.push_back(Json{{"condition", row.condition}, {"finding", row.finding}, {"holds", row.holds}});
    Json witness = nullptr;
    if (r.witness) witness = Json{{"lambda", complex_json(r.witness->lambda)}, {"f", vecfield_json(r.witness->f)}};
    return Json{{"intersection", to_string(r.intersection)},
                {"statement", r.statement},
                {"purity_status", to_string(r.purity.status)},
                {"witness", std::move(witness)},
                {"equivalence_table", std::move(table)},
                {"dyadic_example", r.dyadic_example.empty() ? Json(nullptr) : Json(r.dyadic_example)},
                {"caveats", r.caveats}};
}

Json tower_json(const Tower& t) {
    Json levels = Json::array();
    for (std::size_t k = 0; k < t.levels.size(); ++k) {
        const auto& l = t.levels[k];
        levels.push_back(Json{{"level", k},
                              {"depth", l.grid.depth_K},
                              {"cells", l.grid.cell_count()},
                              {"dimension", l.dimension},
                              {"embedding_residual", l.embedding_residual < 0 ? Json(nullptr) : Json(decimal(l.embedding_residual))}});
    }
    return Json{{"depth", t.depth},
                {"trials", t.trials},
                {"seed", t.seed},
                {"levels", std::move(levels)},
                {"composed_residual", decimal(t.composed_residual)},
                {"not_modeled", "density of the union of the levels"}};
}

Json derivation_json(const JourneDerivation& d) {
    Json checks = Json::array();
    for (const auto& c : d.checks)
        checks.push_back(Json{{"inequality", c.name}, {"holds", c.holds}, {"margin", decimal(c.margin)}});
    return Json{{"delta", decimal(d.delta)},
                {"r1", decimal(d.r1)},
                {"r2", decimal(d.r2)},
                {"r", decimal(d.r)},
                {"n", d.n},
                {"F", d.F.str()},
                {"checks", std::move(checks)}};
}

std::string spectrum_csv(const PurityVerdict& v) {
    std::ostringstream out;
    out << "lambda_re,lambda_im,abs_lambda,passes_eigen_test\n";
    for (const auto& s : v.spectrum)
        out << decimal(s.nu.real()) << ',' << decimal(s.nu.imag()) << ',' << decimal(std::abs(s.nu)) << ','
            << (s.passes ? "true" : "false") << '\n';
    return out.str();
}

}  // namespace genfilt
