#pragma once

#include <string>

#include <json.hpp>

#include "genfilt/gmra.hpp"
#include "genfilt/lowpass.hpp"
#include "genfilt/residual.hpp"
#include "genfilt/ruelle.hpp"

namespace genfilt {

using Json = nlohmann::ordered_json;

inline constexpr const char* kReportFormat = "genfilt-report/1";

// Report sections. Reals are written as shortest round-trip decimal strings;
// indices i, j are 1-based; every pass/fail flag sits next to its tolerance.

Json residual_json(const ResidualReport& r, const GridSpec& grid, double tolerance);
Json certificate_json(const Certificate& c);
Json certificate_failure_json(const CertificateFailure& f, const GridSpec& grid);
Json vecfield_json(const VecField& f);
Json purity_json(const PurityVerdict& v);
Json intersection_json(const IntersectionReport& r);
Json tower_json(const Tower& t);
Json derivation_json(const JourneDerivation& d);

/// "[t/M, (t+1)/M)" with reduced fractions.
std::string cell_interval(const GridSpec& grid, std::int64_t t);

/// One row per eigenvalue: lambda_re, lambda_im, abs_lambda, passes_eigen_test.
std::string spectrum_csv(const PurityVerdict& v);

}  // namespace genfilt
