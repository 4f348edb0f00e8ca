#include "genfilt/bundle.hpp"

#include <charconv>
#include <cmath>
#include <set>

#include <json.hpp>

#include "genfilt/error.hpp"

namespace genfilt {

using json = nlohmann::ordered_json;

namespace {

const json& field(const json& obj, const char* key) {
    if (!obj.is_object() || !obj.contains(key)) throw ParseError(std::string("bundle is missing field '") + key + "'");
    return obj.at(key);
}

std::int64_t integer_field(const json& obj, const char* key) {
    const json& v = field(obj, key);
    if (!v.is_number_integer()) throw ParseError(std::string("field '") + key + "' must be an integer");
    return v.get<std::int64_t>();
}

const std::string& string_value(const json& v, const char* what) {
    if (!v.is_string()) throw ParseError(std::string(what) + " must be a string");
    return v.get_ref<const std::string&>();
}

Rat parse_rat(const json& v) {
    try {
        const std::string& text = string_value(v, "interval endpoint");
        Rat r = Rat::parse(text);
        if (r.str() != text) throw ParseError("interval endpoint '" + text + "' is not a reduced p/q");
        return r;
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        throw ParseError(std::string("bad interval endpoint: ") + e.what());
    }
}

}  // namespace

const std::string* Provenance::find(std::string_view key) const {
    for (const auto& [k, v] : params)
        if (k == key) return &v;
    return nullptr;
}

std::string decimal(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

double parse_decimal(std::string_view s) {
    double out = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty() || !std::isfinite(out))
        throw ParseError("not a finite decimal number: '" + std::string(s) + "'");
    return out;
}

std::string emit_bundle(const FilterBundle& b) {
    json doc;
    doc["format_version"] = b.format_version;
    doc["N"] = b.N;
    doc["L"] = b.L;
    doc["K"] = b.K;
    json sigmas = json::array();
    for (const auto& s : b.sigmas) {
        json pieces = json::array();
        for (const auto& p : s.pieces()) pieces.push_back(json::array({p.lo.str(), p.hi.str()}));
        sigmas.push_back(std::move(pieces));
    }
    doc["sigmas"] = std::move(sigmas);
    json entries = json::array();
    for (const auto& e : b.entries) {
        json samples = json::array();
        for (Complex z : e.samples) samples.push_back(json::array({decimal(z.real()), decimal(z.imag())}));
        entries.push_back(json{{"i", e.i}, {"j", e.j}, {"samples", std::move(samples)}});
    }
    doc["entries"] = std::move(entries);
    if (b.provenance) {
        json params = json::object();
        for (const auto& [k, v] : b.provenance->params) params[k] = v;
        doc["provenance"] = json{{"generator", b.provenance->generator}, {"params", std::move(params)}};
    }
    return doc.dump(2) + "\n";
}

FilterBundle parse_bundle(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("bundle is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("bundle must be a JSON object");

    FilterBundle b;
    b.format_version = string_value(field(doc, "format_version"), "format_version");
    if (b.format_version != kBundleFormat)
        throw ParseError("unsupported bundle format '" + b.format_version + "' (expected " + std::string(kBundleFormat) +
                         ")");
    const std::int64_t n = integer_field(doc, "N");
    const std::int64_t l = integer_field(doc, "L");
    const std::int64_t k = integer_field(doc, "K");
    if (n < 2 || n > 1'000'000) throw ParseError("N must be an integer >= 2");
    if (l < 1) throw ParseError("L must be >= 1");
    if (k < 1 || k > 62) throw ParseError("K must be in 1..62");
    b.N = static_cast<int>(n);
    b.L = l;
    b.K = static_cast<int>(k);
    std::int64_t cells = 0;
    try {
        cells = GridSpec(b.N, b.L, b.K).cell_count();
    } catch (const Error& e) {
        throw ParseError(std::string("grid is not representable: ") + e.what());
    }

    const json& sig = field(doc, "sigmas");
    if (!sig.is_array() || sig.empty()) throw ParseError("sigmas must be a nonempty array");
    for (const json& s : sig) {
        if (!s.is_array()) throw ParseError("each sigma must be an array of [lo, hi] pairs");
        std::vector<std::pair<Rat, Rat>> pieces;
        for (const json& p : s) {
            if (!p.is_array() || p.size() != 2) throw ParseError("interval must be a [lo, hi] pair");
            pieces.emplace_back(parse_rat(p[0]), parse_rat(p[1]));
        }
        IntervalSet set = IntervalSet::from_intervals(pieces);
        // Canonical form only, so emit(parse(x)) reproduces x.
        if (set.pieces().size() != pieces.size()) throw ParseError("sigma intervals are not in canonical form");
        for (std::size_t q = 0; q < pieces.size(); ++q)
            if (!(set.pieces()[q].lo == pieces[q].first && set.pieces()[q].hi == pieces[q].second))
                throw ParseError("sigma intervals are not in canonical form");
        b.sigmas.push_back(std::move(set));
    }
    const int c = static_cast<int>(b.sigmas.size());

    const json& ent = field(doc, "entries");
    if (!ent.is_array() || ent.size() != static_cast<std::size_t>(c) * static_cast<std::size_t>(c))
        throw ParseError("entries must list all " + std::to_string(c * c) + " matrix entries");
    std::set<std::pair<int, int>> seen;
    for (std::size_t q = 0; q < ent.size(); ++q) {
        const json& e = ent[q];
        FilterBundle::Entry out;
        const std::int64_t i = integer_field(e, "i");
        const std::int64_t j = integer_field(e, "j");
        if (i < 1 || i > c || j < 1 || j > c) throw ParseError("entry index out of range 1.." + std::to_string(c));
        out.i = static_cast<int>(i);
        out.j = static_cast<int>(j);
        if (out.i != static_cast<int>(q) / c + 1 || out.j != static_cast<int>(q) % c + 1 || !seen.emplace(out.i, out.j).second)
            throw ParseError("entries must appear once each in row-major order");
        const json& samples = field(e, "samples");
        if (!samples.is_array() || static_cast<std::int64_t>(samples.size()) != cells)
            throw ParseError("entry (" + std::to_string(i) + ", " + std::to_string(j) + ") must have " +
                             std::to_string(cells) + " samples");
        out.samples.reserve(samples.size());
        for (const json& z : samples) {
            if (!z.is_array() || z.size() != 2) throw ParseError("sample must be a [re, im] pair");
            out.samples.emplace_back(parse_decimal(string_value(z[0], "sample real part")),
                                     parse_decimal(string_value(z[1], "sample imaginary part")));
        }
        b.entries.push_back(std::move(out));
    }

    if (doc.contains("provenance")) {
        const json& p = doc.at("provenance");
        Provenance prov;
        prov.generator = string_value(field(p, "generator"), "provenance generator");
        const json& params = field(p, "params");
        if (!params.is_object()) throw ParseError("provenance params must be an object");
        for (const auto& [key, value] : params.items()) prov.params.emplace_back(key, string_value(value, "provenance value"));
        b.provenance = std::move(prov);
    }
    return b;
}

FilterBundle bundle_from_filter(const FilterMatrix& H, std::optional<Provenance> provenance) {
    FilterBundle b;
    b.N = H.N();
    b.L = H.grid().base_L;
    b.K = H.grid().depth_K;
    b.sigmas = H.chain().sets();
    for (int i = 0; i < H.size(); ++i) {
        for (int j = 0; j < H.size(); ++j) {
            const auto s = H.entry(i, j).samples();
            b.entries.push_back({i + 1, j + 1, std::vector<Complex>(s.begin(), s.end())});
        }
    }
    b.provenance = std::move(provenance);
    return b;
}

FilterMatrix bundle_to_filter(const FilterBundle& b) {
    const GridSpec g(b.N, b.L, b.K);
    std::vector<StepFn> entries;
    entries.reserve(b.entries.size());
    for (const auto& e : b.entries) entries.emplace_back(g, e.samples);
    return FilterMatrix(SigmaChain(b.sigmas), g, std::move(entries));
}

}  // namespace genfilt
