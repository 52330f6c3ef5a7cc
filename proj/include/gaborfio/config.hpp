#pragma once

// JSON run configuration for the command-line front end.

#include "gaborfio/fio.hpp"
#include "gaborfio/phase_flow.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace gaborfio {

struct ConfigIssue {
    std::string field;
    std::string message;
};

/// A rejected configuration; carries every problem found, not just the first.
class ConfigError : public Error {
public:
    explicit ConfigError(std::vector<ConfigIssue> issues);

    const std::vector<ConfigIssue>& issues() const noexcept { return issues_; }
    nlohmann::json to_json() const;

private:
    std::vector<ConfigIssue> issues_;
};

struct WindowConfig {
    std::string kind = "gaussian";  // gaussian | box | bspline
    double width = 1.0;             // gaussian, bspline
    double half_support = 0.25;     // box
    int order = 4;                  // bspline
};

struct PhaseConfig {
    std::string kind = "linear";  // linear | dilation | chirp | perturbed
    double s = 2.0;
    double c = 1.0;
    double eps = 0.25;
};

struct SymbolConfig {
    std::string kind = "constant";  // constant | bandlimited | weighted
    int N = 2;
    double s = 4.0;
    double value = 1.0;
};

struct RunConfig {
    Grid grid{64, 1};
    WindowConfig window;
    /// Replace the window by its canonical tight version before use.
    bool tighten = true;
    /// Lattice generator in grid units (converted from continuum units if given so).
    Eigen::MatrixXd generator;
    PhaseConfig phase;
    SymbolConfig symbol;
    std::optional<SymbolConfig> compare_symbol;
    std::vector<double> L_list{1, 2, 4, 8, 16};
    std::optional<double> nu_radius;
    std::optional<double> s_claim;
    std::optional<double> tolerance;
    double p = 2.0;
    double weight_s = 0.0;
    std::uint64_t seed = 0;
    // dilation-demo
    double alpha = 0.25;
    double beta = 0.25;
    double mu_radius = 1.0;
    double demo_nu_radius = 1.0;
    // warp-frame
    std::vector<Eigen::MatrixXd> sweep;
};

/// Parses and validates a configuration for the given subcommand. Throws
/// ConfigError listing every problem.
RunConfig parse_config(const nlohmann::json& doc, const std::string& command);

/// The fully resolved configuration, defaults filled in.
nlohmann::json to_json(const RunConfig& cfg);

Signal build_window(const RunConfig& cfg);
Lattice build_lattice(const RunConfig& cfg);
Lattice build_lattice(const RunConfig& cfg, const Eigen::MatrixXd& generator);
TamePhase build_phase(const PhaseConfig& cfg);
SymbolTable build_symbol(const SymbolConfig& cfg, const Grid& grid, std::uint64_t seed);

} // namespace gaborfio
