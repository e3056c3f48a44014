// cli.hpp: Run configuration, presets and the rabispec command-line driver
//
// Configuration is layered: built-in defaults for the subcommand, then an
// optional preset, then the JSON file, then command-line flags.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "rabispec/niba.hpp"
#include "rabispec/params.hpp"
#include "rabispec/sweep.hpp"

namespace rabispec::cli {

inline constexpr const char* kVersion = "rabispec 1.0.0";

/// Exit codes of the driver.
enum ExitCode : int { kSuccess = 0, kNumericalFailure = 1, kConfigError = 2 };

struct Numerics {
    double quad_tol{1e-8};        // kernel truncation: e^{-Q'(tau_max)} below this
    double mats_tol{1e-10};       // Matsubara series relative tolerance
    double tau_cap{1e4};          // largest admissible kernel memory time
    int k_max{60};                // oscillator terms in the level-shift sums
    int p_max{30};                // Floquet terms in the driven level-shift sums
    double resonance_guard{1e-6};
    bool corrections{false};      // second-order level shifts in overlays
    int n_fock{10};
    unsigned workers{0};          // 0: RABISPEC_WORKERS or hardware concurrency
    niba::Mode susceptibility{niba::Mode::full};
};

struct RunConfig {
    std::string mode{"spectrum"};
    ModelParams model{};
    BathSpec baths{};
    sweep::Axis axis1{};
    sweep::Axis axis2{};
    Numerics numerics{};
    std::string output{};         // empty: stdout (or <preset>.csv for presets)
};

/// Subcommands understood by the driver.
const std::vector<std::string>& modes();

/// Defaults for a subcommand, including its default sweep axes.
RunConfig default_config(const std::string& mode);

/// Overlays the keys present in `j` onto `base`. Unknown keys, wrong types and
/// invalid values raise ConfigError naming the offending JSON path.
RunConfig apply_json(const nlohmann::json& j, RunConfig base);

/// Checks the mode-specific axis requirements and parameter domains.
void validate(const RunConfig& cfg);

/// The config as JSON. `runtime` adds the worker count and output path,
/// which do not influence results and are left out of CSV headers.
nlohmann::json to_json(const RunConfig& cfg, bool runtime = false);

/// One output file of a (possibly multi-panel) run.
struct Panel {
    std::string label; // empty for single-panel runs, e.g. "g0.5" otherwise
    RunConfig config;
};

/// Names of the built-in presets.
const std::vector<std::string>& preset_names();

/// Applies the preset's fixed parameters to `base`. Throws ConfigError for
/// an unknown preset or one that belongs to another subcommand.
RunConfig preset_base(const std::string& name, const RunConfig& base);

/// Expands a configured preset run into its panels (one per value of the
/// panel parameter); runs without a preset have a single unlabelled panel.
std::vector<Panel> preset_panels(const std::string& name, const RunConfig& cfg);

/// Output path of a panel: `<stem>_<label><ext>` when labelled.
std::string panel_path(const std::string& output, const std::string& label);

/// Runs one panel and writes its CSV to `out`. Throws on failure.
void run_panel(const RunConfig& cfg, unsigned workers, std::ostream& out, std::ostream& log);

/// Full driver; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace rabispec::cli
