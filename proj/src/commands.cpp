#include "genfilt/commands.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "genfilt/error.hpp"
#include "genfilt/gmra.hpp"
#include "genfilt/parallel.hpp"
#include "genfilt/report.hpp"
#include "genfilt/residual.hpp"
#include "genfilt/ruelle.hpp"

namespace genfilt::cli {

namespace {

constexpr int kIsometryTrials = 100;

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    std::string ms() const {
        const auto d = std::chrono::steady_clock::now() - start_;
        return decimal(std::chrono::duration<double, std::milli>(d).count());
    }

private:
    std::chrono::steady_clock::time_point start_;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ParameterError("cannot write '" + path + "'");
    f << text;
}

std::string int_str(std::int64_t v) { return std::to_string(v); }

Json grid_json(const FilterMatrix& H) {
    return Json{{"N", H.N()}, {"L", H.grid().base_L}, {"K", H.grid().depth_K}, {"c", H.size()}, {"cells", H.cells()}};
}

Json provenance_json(const std::optional<Provenance>& p) {
    if (!p) return nullptr;
    Json params = Json::object();
    for (const auto& [k, v] : p->params) params[k] = v;
    return Json{{"generator", p->generator}, {"params", std::move(params)}};
}

struct LoadedBundle {
    FilterBundle bundle;
    FilterMatrix filter;
};

LoadedBundle load(const std::string& path) {
    FilterBundle b = parse_bundle(read_file(path));
    FilterMatrix H = bundle_to_filter(b);
    return {std::move(b), std::move(H)};
}

struct VerifyResult {
    Json sections;
    Json timings;
    bool passes = true;
};

VerifyResult run_verify(const FilterMatrix& H, int nmax, double tol, std::uint64_t seed) {
    VerifyResult v;
    v.sections = Json::object();
    v.timings = Json::object();
    {
        Stopwatch sw;
        const ResidualReport fe = filter_equation_residual(H);
        Json sec = residual_json(fe, H.grid(), tol);
        const auto violations = support_law_violations(H);
        sec["support_law_violations"] = violations.size();
        if (!violations.empty())
            sec["first_support_violation"] = {{"pair", Json::array({violations.front().i + 1, violations.front().j + 1})},
                                              {"cell", violations.front().cell},
                                              {"interval", cell_interval(H.grid(), violations.front().cell)}};
        v.passes = v.passes && fe.max_abs_residual <= tol;
        v.sections["filter_equation"] = std::move(sec);
        v.timings["filter_equation_ms"] = sw.ms();
    }
    {
        Stopwatch sw;
        Json rows = Json::array();
        for (int n = 1; n <= nmax; ++n) {
            const ResidualReport gr = generalized_filter_residual(H, n);
            Json row = residual_json(gr, H.grid().at_depth(H.grid().depth_K + n - 1), tol);
            row["n"] = n;
            v.passes = v.passes && gr.max_abs_residual <= tol;
            rows.push_back(std::move(row));
        }
        v.sections["generalized_equation"] = std::move(rows);
        v.timings["generalized_equation_ms"] = sw.ms();
    }
    {
        Stopwatch sw;
        const double iso = isometry_residual(H, kIsometryTrials, seed);
        v.passes = v.passes && iso <= tol;
        v.sections["isometry"] = Json{{"max_abs_residual", decimal(iso)},
                                      {"tolerance", decimal(tol)},
                                      {"passes", iso <= tol},
                                      {"trials", kIsometryTrials},
                                      {"seed", seed}};
        v.timings["isometry_ms"] = sw.ms();
    }
    return v;
}

Json base_report(const std::string& command, const std::string& path, const LoadedBundle& lb) {
    Json r;
    r["format_version"] = kReportFormat;
    r["command"] = command;
    r["input"] = Json{{"bundle", path}, {"filter", grid_json(lb.filter)}, {"provenance", provenance_json(lb.bundle.provenance)}};
    return r;
}

std::string summary_line(const std::string& command, int code, const std::string& detail) {
    return command + ": exit " + std::to_string(code) + " (" + detail + ")\n";
}

// ---------------------------------------------------------------- commands

struct CommonOptions {
    Tolerances tols;
    std::uint64_t seed = 1;
    std::string out;
};

int cmd_generate(const GenerateRequest& req, const std::string& out_path, std::ostream& out) {
    const Generated g = generate(req);
    write_output(out_path, emit_bundle(bundle_from_filter(g.filter, g.provenance)), out);
    return kOk;
}

int cmd_verify(const std::string& path, std::optional<int> nmax, const CommonOptions& opt, std::ostream& out) {
    const LoadedBundle lb = load(path);
    const int n = nmax.value_or(std::min(3, lb.filter.grid().depth_K));
    VerifyResult v = run_verify(lb.filter, n, opt.tols.tol_res, opt.seed);
    const int code = v.passes ? kOk : kVerificationFailed;
    Json r = base_report("verify", path, lb);
    r["tolerances"] = Json{{"tol_res", decimal(opt.tols.tol_res)}};
    r["seeds"] = Json{{"isometry", opt.seed}};
    r["sections"] = std::move(v.sections);
    r["outcome"] = Json{{"exit_code", code}, {"verified", v.passes}};
    r["timings"] = std::move(v.timings);
    write_output(opt.out, r.dump(2) + "\n", out);
    if (!opt.out.empty()) out << summary_line("verify", code, v.passes ? "filter verified" : "verification failed");
    return code;
}

int status_code(PurityStatus s) {
    switch (s) {
        case PurityStatus::Pure_certified: return kOk;
        case PurityStatus::NotPure_certified: return kNotPure;
        default: return kInconclusive;
    }
}

int cmd_classify(const std::string& path, std::optional<int> nmax, int tower_depth, const CommonOptions& opt,
                 std::ostream& out) {
    const LoadedBundle lb = load(path);
    const FilterMatrix& H = lb.filter;
    const int n = nmax.value_or(std::min(3, H.grid().depth_K));
    VerifyResult v = run_verify(H, n, opt.tols.tol_res, opt.seed);
    Json r = base_report("classify", path, lb);
    r["tolerances"] = Json{{"tol_eig", decimal(opt.tols.tol_eig)},
                           {"tol_res", decimal(opt.tols.tol_res)},
                           {"tol_norm", decimal(opt.tols.tol_norm)}};
    r["seeds"] = Json{{"isometry", opt.seed}, {"probes", opt.seed}};
    Json sections = std::move(v.sections);
    Json timings = std::move(v.timings);

    int code = kVerificationFailed;
    std::string detail = "verification failed";
    if (v.passes) {
        ClassifyOptions co;
        co.tols = opt.tols;
        co.seed = opt.seed;
        Stopwatch sw;
        PurityVerdict verdict = classify_purity(H, co);
        timings["purity_ms"] = sw.ms();
        code = status_code(verdict.status);
        detail = to_string(verdict.status);

        Json cert{{"found", verdict.certificate.has_value()},
                  {"search_space", "a = 1..c, F = [-w/M, w/M) for w = 1..M/2"},
                  {"certificate", verdict.certificate ? certificate_json(*verdict.certificate) : Json(nullptr)}};
        if (const auto& p = lb.bundle.provenance; p && p->find("delta") && p->find("n")) {
            const double delta = parse_decimal(*p->find("delta"));
            const std::int64_t nn = std::stoll(*p->find("n"));
            const IntervalSet F = IntervalSet::interval(Rat(-1, nn), Rat(1, nn));
            const CertificateCheck chk = check_certificate(H, 1, delta, F);
            cert["derivation_check"] = Json{{"a", 1},
                                            {"delta", decimal(delta)},
                                            {"F", F.str()},
                                            {"passes", static_cast<bool>(chk)},
                                            {"certificate", chk.certificate ? certificate_json(*chk.certificate) : Json(nullptr)},
                                            {"failure", chk.failure ? certificate_failure_json(*chk.failure, H.grid()) : Json(nullptr)}};
        }
        sections["purity"] = purity_json(verdict);
        sections["certificate"] = std::move(cert);

        if (const auto& p = lb.bundle.provenance; p && (p->generator == "journe" || p->generator == "bcm_journe")) {
            Stopwatch sw2;
            const auto* ph = p->find("phase");
            const PhaseConvention current = ph ? phase_from_string(*ph) : PhaseConvention::literal;
            const PhaseConvention other =
                current == PhaseConvention::literal ? PhaseConvention::half_turn : PhaseConvention::literal;
            const auto same = regenerate(*p, current);
            const auto alt = regenerate(*p, other);
            if (same && alt && *same == H) {
                PurityVerdict av = classify_purity(*alt, co);
                Json a = purity_json(av);
                a["phase"] = to_string(other);
                sections["purity_alternate_phase"] = std::move(a);
            } else {
                sections["purity_alternate_phase"] =
                    Json{{"skipped", "bundle samples do not match a regeneration from its provenance"}};
            }
            timings["purity_alternate_phase_ms"] = sw2.ms();
        }

        Stopwatch sw3;
        sections["intersection"] = intersection_json(intersection_report(H, verdict));
        timings["intersection_ms"] = sw3.ms();

        Stopwatch sw4;
        try {
            sections["gmra"] = tower_json(build_tower(H, tower_depth, 20, opt.seed));
        } catch (const DimensionCapExceeded& e) {
            sections["gmra"] = Json{{"skipped", e.what()}};
        }
        timings["gmra_ms"] = sw4.ms();
    }
    r["sections"] = std::move(sections);
    r["outcome"] = Json{{"exit_code", code}, {"status", detail}};
    r["timings"] = std::move(timings);
    write_output(opt.out, r.dump(2) + "\n", out);
    if (!opt.out.empty()) out << summary_line("classify", code, detail);
    return code;
}

int cmd_spectrum(const std::string& path, const CommonOptions& opt, std::ostream& out, std::ostream& err) {
    const LoadedBundle lb = load(path);
    const FilterMatrix& H = lb.filter;
    VerifyResult v = run_verify(H, std::min(3, H.grid().depth_K), opt.tols.tol_res, opt.seed);
    if (!v.passes) {
        err << "spectrum: bundle fails verification; run verify for details\n";
        return kVerificationFailed;
    }
    ClassifyOptions co;
    co.tols = opt.tols;
    co.seed = opt.seed;
    co.search_certificate = false;
    const PurityVerdict verdict = classify_purity(H, co);
    write_output(opt.out, spectrum_csv(verdict), out);
    return kOk;
}

}  // namespace

// ---------------------------------------------------------------- generators

Generated generate(const GenerateRequest& req) {
    Provenance prov;
    prov.generator = req.name;
    auto L = [&](std::int64_t def) { return req.base_L.value_or(def); };
    auto K = [&](int def) { return req.depth_K.value_or(def); };
    auto grid_params = [&](std::int64_t l, int k) {
        prov.params.emplace_back("L", int_str(l));
        prov.params.emplace_back("K", int_str(k));
    };
    auto reject = [&](bool given, const char* flag) {
        if (given) throw ParameterError(std::string(flag) + " does not apply to generator '" + req.name + "'");
    };
    const bool journe_flags = req.delta || req.r || req.eps;

    if (req.name == "haar" || req.name == "shannon") {
        reject(journe_flags, "--delta/--r/--eps");
        reject(req.N.has_value(), "--N");
        const bool haar = req.name == "haar";
        const std::int64_t l = L(haar ? 1 : 4);
        const int k = K(4);
        grid_params(l, k);
        return {haar ? make_haar({l, k}) : make_shannon({l, k}), prov, std::nullopt};
    }
    if (req.name == "constant") {
        reject(journe_flags, "--delta/--r/--eps");
        const std::int64_t l = L(1);
        const int k = K(4);
        const int n = req.N.value_or(2);
        grid_params(l, k);
        prov.params.emplace_back("N", int_str(n));
        return {make_constant({l, k}, n), prov, std::nullopt};
    }
    if (req.name == "bcm_journe") {
        reject(journe_flags, "--delta/--r/--eps");
        reject(req.N.has_value(), "--N");
        const std::int64_t l = L(28);
        const int k = K(2);
        grid_params(l, k);
        prov.params.emplace_back("phase", to_string(req.phase));
        return {make_bcm_journe({l, k}, req.phase), prov, std::nullopt};
    }
    if (req.name == "journe") {
        reject(req.N.has_value(), "--N");
        if (req.delta && req.r) throw ParameterError("give either --delta or --r, not both");
        const std::int64_t l = L(56);
        const int k = K(2);
        const Rat eps = req.eps.value_or(Rat(1, 56));
        const GridSpec grid(2, l, k);
        grid_params(l, k);
        if (req.r) {
            JourneParams p{*req.r, eps, req.transition, req.phase, grid};
            prov.params.emplace_back("r", decimal(*req.r));
            prov.params.emplace_back("eps", eps.str());
            prov.params.emplace_back("transition", to_string(req.transition));
            prov.params.emplace_back("phase", to_string(req.phase));
            return {make_journe_family(p), prov, std::nullopt};
        }
        JourneDerivation d = derive_journe(req.delta.value_or(0.1), grid, req.transition, req.phase, eps);
        prov.params.emplace_back("delta", decimal(d.delta));
        prov.params.emplace_back("r", decimal(d.r));
        prov.params.emplace_back("r1", decimal(d.r1));
        prov.params.emplace_back("r2", decimal(d.r2));
        prov.params.emplace_back("n", int_str(d.n));
        prov.params.emplace_back("eps", eps.str());
        prov.params.emplace_back("transition", to_string(req.transition));
        prov.params.emplace_back("phase", to_string(req.phase));
        FilterMatrix H = make_journe_family(d.params);
        return {std::move(H), prov, std::move(d)};
    }
    throw ParameterError("unknown generator '" + req.name + "' (expected haar, shannon, constant, bcm_journe or journe)");
}

std::optional<FilterMatrix> regenerate(const Provenance& prov, std::optional<PhaseConvention> phase) {
    try {
        GenerateRequest req;
        req.name = prov.generator;
        if (const auto* v = prov.find("L")) req.base_L = std::stoll(*v);
        if (const auto* v = prov.find("K")) req.depth_K = std::stoi(*v);
        if (const auto* v = prov.find("N")) req.N = std::stoi(*v);
        if (const auto* v = prov.find("r")) req.r = parse_decimal(*v);
        if (const auto* v = prov.find("eps")) req.eps = Rat::parse(*v);
        if (const auto* v = prov.find("transition")) req.transition = transition_from_string(*v);
        if (const auto* v = prov.find("phase")) req.phase = phase_from_string(*v);
        if (phase) req.phase = *phase;
        return generate(req).filter;
    } catch (const Error&) {
        return std::nullopt;
    } catch (const std::logic_error&) {  // stoll / stoi on junk
        return std::nullopt;
    }
}

// ---------------------------------------------------------------- entry point

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Generalized wavelet filters: generate, verify, classify purity, export spectra", "genfilt"};
    app.require_subcommand(1);
    unsigned threads = 1;
    app.add_option("--threads", threads, "worker threads for cell-parallel loops (results do not depend on it)")
        ->check(CLI::Range(1u, 1024u));

    CommonOptions common;
    auto add_common = [&](CLI::App* sub, bool tolerances) {
        sub->add_option("--out", common.out, "output path (default: stdout)");
        sub->add_option("--seed", common.seed, "seed for random probes");
        sub->add_option("--tol-res", common.tols.tol_res, "residual tolerance");
        if (tolerances) {
            sub->add_option("--tol-eig", common.tols.tol_eig, "unit-circle window for eigenvalues");
            sub->add_option("--tol-norm", common.tols.tol_norm, "tolerance for |f(cell)| = 1");
        }
    };

    GenerateRequest req;
    std::string transition = "exp_bump", phase = "literal", eps_text;
    std::int64_t base = 0;
    int depth = 0, scale = 0;
    double delta = 0.0, r = 0.0;
    auto* gen = app.add_subcommand("generate", "write a filter bundle for a built-in generator");
    gen->add_option("name", req.name, "haar | shannon | constant | bcm_journe | journe")->required();
    auto* o_base = gen->add_option("--base", base, "grid base L")->check(CLI::PositiveNumber);
    auto* o_depth = gen->add_option("--depth", depth, "grid depth K")->check(CLI::Range(1, 40));
    auto* o_scale = gen->add_option("--N", scale, "dilation N (constant filter only)")->check(CLI::Range(2, 64));
    auto* o_delta = gen->add_option("--delta", delta, "Journe: derive parameters from delta");
    auto* o_r = gen->add_option("--r", r, "Journe: profile parameter r in (0, 1)");
    auto* o_eps = gen->add_option("--eps", eps_text, "Journe: smoothing width as p/q");
    gen->add_option("--transition", transition, "exp_bump | polynomial_c2");
    gen->add_option("--phase", phase, "literal | half_turn");
    gen->add_option("--out", common.out, "output path (default: stdout)");

    std::string bundle_path;
    int nmax = 0, tower_depth = 2;
    auto* ver = app.add_subcommand("verify", "check the filter equations and the isometry property");
    ver->add_option("bundle", bundle_path, "filter bundle")->required();
    auto* o_nmax_v = ver->add_option("--nmax", nmax, "largest n for the n-step identity")->check(CLI::PositiveNumber);
    add_common(ver, false);

    auto* cls = app.add_subcommand("classify", "decide purity of the Ruelle operator");
    cls->add_option("bundle", bundle_path, "filter bundle")->required();
    auto* o_nmax_c = cls->add_option("--nmax", nmax, "largest n for the n-step identity")->check(CLI::PositiveNumber);
    cls->add_option("--tower-depth", tower_depth, "levels in the resolution tower")->check(CLI::Range(1, 20));
    add_common(cls, true);

    auto* spectrum_cmd = app.add_subcommand("spectrum", "write transfer-matrix eigenvalues as CSV");
    spectrum_cmd->add_option("bundle", bundle_path, "filter bundle")->required();
    add_common(spectrum_cmd, true);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }

    try {
        set_thread_count(threads);
        if (gen->parsed()) {
            if (o_base->count()) req.base_L = base;
            if (o_depth->count()) req.depth_K = depth;
            if (o_scale->count()) req.N = scale;
            if (o_delta->count()) req.delta = delta;
            if (o_r->count()) req.r = r;
            if (o_eps->count()) req.eps = Rat::parse(eps_text);
            req.transition = transition_from_string(transition);
            req.phase = phase_from_string(phase);
            return cmd_generate(req, common.out, out);
        }
        if (ver->parsed())
            return cmd_verify(bundle_path, o_nmax_v->count() ? std::optional<int>(nmax) : std::nullopt, common, out);
        if (cls->parsed())
            return cmd_classify(bundle_path, o_nmax_c->count() ? std::optional<int>(nmax) : std::nullopt, tower_depth,
                                common, out);
        if (spectrum_cmd->parsed()) return cmd_spectrum(bundle_path, common, out, err);
    } catch (const EigensolverFailure& e) {
        err << "error: " << e.what() << "\n";
        return kInconclusive;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}

}  // namespace genfilt::cli
