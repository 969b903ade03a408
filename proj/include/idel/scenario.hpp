#pragma once

#include <optional>
#include <string>
#include <variant>

#include "idel/feedback.hpp"
#include "idel/functionals.hpp"
#include "idel/hyperbolic.hpp"
#include "idel/stability.hpp"

namespace idel {

/// Exit codes shared by the scenario runner, the C API and the CLI.
enum ExitCode : int {
    kExitOk = 0,
    kExitValidation = 2,
    kExitEscape = 3,
    kExitViolation = 4,
};

/// Parse the JSON vocabulary (throws validation_error listing every problem).
ScalarFn parse_scalar_fn(const std::string& json_text);
IssCertificate parse_certificate(const std::string& json_text, double r);

/// A system descriptor is either an IDE or a hyperbolic system (the latter
/// convertible with to_ide).
struct ParsedSystem {
    std::variant<IdeSystem, std::shared_ptr<HyperbolicSystem>> value;

    bool is_pde() const {
        return std::holds_alternative<std::shared_ptr<HyperbolicSystem>>(value);
    }
    IdeSystem as_ide() const;
    const HyperbolicSystem& pde() const {
        return *std::get<std::shared_ptr<HyperbolicSystem>>(value);
    }
};
ParsedSystem parse_system(const std::string& json_text);

/// Run one scenario described by a JSON document; artifacts land in out_dir.
/// Returns an ExitCode; never throws for config/runtime conditions those
/// codes cover.
int run_scenario_json(const std::string& scenario_json, const std::string& out_dir);

/// Equivalence audit at K and 2K: sup-norm discrepancy between the
/// IDE-reconstruction route and the upwind oracle, and the refinement ratio.
/// The coarse data (x0, w) are replicated cell-for-cell onto the fine grid so
/// both resolutions solve the same problem.
struct EquivalenceReport {
    double disc_coarse = 0.0;
    double disc_fine = 0.0;
    double ratio = 0.0;
    bool first_order() const { return ratio >= 1.5 && ratio <= 2.5; }
};
EquivalenceReport equivalence_audit(const HyperbolicSystem& sys, const SampledFn& x0_coarse,
                                    const SampledFn& w_coarse, double T,
                                    const std::vector<double>& sample_times);

/// Profile CSV: z_lo,z_hi,x rows at full precision.
void write_profile_csv(const SampledFn& profile, const std::string& path);

} // namespace idel
