#pragma once

// Regression, operator-norm estimation, weight audits and report types shared
// by the FIO and multiplier modules.

#include "gaborfio/tf_core.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace gaborfio {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    /// Root-mean-square residual of the fit in log space.
    double residual = 0.0;
};

/// Least-squares line through (log x, log y). Needs >= 3 points with positive
/// coordinates and at least two distinct x; throws Error(invalid_argument).
LineFit loglog_fit(std::span<const std::pair<double, double>> points);

/// Default slope tolerance for theorem-claim verdicts at grid size n.
double slope_tolerance(int n);

struct DecayReport {
    /// (log distance, log max magnitude), sorted by distance.
    std::vector<std::pair<double, double>> pairs;
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;
    double claim = 0.0;
    double tolerance = 0.75;
    bool pass = false;
};

/// Fills slope/intercept/residual/verdict from pairs (already in log space).
DecayReport make_decay_report(std::vector<std::pair<double, double>> log_pairs, double claim, double tolerance);

struct NormEstimate {
    enum class Method { singular_value, probe_sup };

    double value = 0.0;
    Method method = Method::singular_value;
    int probes = 0;
    int iterations = 0;
    bool converged = true;
    std::string confidence_note;
};

struct NormOptions {
    NormEstimate::Method method = NormEstimate::Method::singular_value;
    double tol = 1e-10;
    int max_iter = 10000;
    int probes = 200;
    std::uint64_t seed = 0;
};

/// Largest singular value by power iteration on M^H M, or the supremum of
/// |M f| / |f| over random probes (a lower bound).
NormEstimate operator_norm(const cmat& M, const NormOptions& options = {});

struct ModerateAudit {
    double c_best = 0.0;
    /// C at each sampling radius of the sweep (cumulative, so non-decreasing).
    std::vector<std::pair<double, double>> radius_sweep;
    bool pass = false;
};

/// Smallest C with m(z + w) <= C v(z) m(w) over sampled pairs in balls of
/// growing radius (d = 1 phase space). Fails when C keeps growing with the radius.
ModerateAudit moderate_audit(const Weight& m, const Weight& v, int samples, std::uint64_t seed = 0);

/// Report envelope: {config, slopes, norms, verdicts, provenance}.
struct Report {
    nlohmann::json config = nlohmann::json::object();
    nlohmann::json slopes = nlohmann::json::object();
    nlohmann::json norms = nlohmann::json::object();
    nlohmann::json verdicts = nlohmann::json::object();
    nlohmann::json provenance = nlohmann::json::object();

    nlohmann::json to_json() const;
};

nlohmann::json to_json(const DecayReport& r);
nlohmann::json to_json(const NormEstimate& r);

} // namespace gaborfio
