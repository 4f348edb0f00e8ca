#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "genfilt/bundle.hpp"
#include "genfilt/generators.hpp"
#include "genfilt/lowpass.hpp"

namespace genfilt::cli {

/// Exit codes of the command-line tool.
enum ExitCode : int {
    kOk = 0,
    kVerificationFailed = 1,
    kUsage = 2,
    kNotPure = 3,
    kInconclusive = 4,
};

/// Generator request. Unset fields take the generator's defaults.
struct GenerateRequest {
    std::string name;  ///< haar | shannon | constant | bcm_journe | journe
    std::optional<std::int64_t> base_L;
    std::optional<int> depth_K;
    std::optional<int> N;
    std::optional<double> delta;
    std::optional<double> r;
    std::optional<Rat> eps;
    Transition transition = Transition::exp_bump;
    PhaseConvention phase = PhaseConvention::literal;
};

struct Generated {
    FilterMatrix filter;
    Provenance provenance;
    std::optional<JourneDerivation> derivation;
};

/// Throws ParameterError for unknown names or invalid parameters.
Generated generate(const GenerateRequest& req);

/// Rebuilds a filter from bundle provenance, optionally with another phase.
/// Returns nullopt when the provenance is missing or not reproducible.
std::optional<FilterMatrix> regenerate(const Provenance& prov, std::optional<PhaseConvention> phase = std::nullopt);

/// Runs the tool on argv[1..]; returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace genfilt::cli
