#include "gaborfio/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace gaborfio {

LineFit loglog_fit(std::span<const std::pair<double, double>> points)
{
    if (points.size() < 3)
        throw Error(ErrorKind::invalid_argument, "loglog_fit needs at least 3 points");
    double sx = 0, sy = 0;
    for (const auto& [x, y] : points) {
        if (!(x > 0.0) || !(y > 0.0))
            throw Error(ErrorKind::invalid_argument, "loglog_fit needs positive coordinates");
        sx += std::log(x);
        sy += std::log(y);
    }
    const double count = static_cast<double>(points.size());
    const double mx = sx / count, my = sy / count;
    double sxx = 0, sxy = 0;
    for (const auto& [x, y] : points) {
        const double dx = std::log(x) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(y) - my);
    }
    if (sxx < 1e-24 * count)
        throw Error(ErrorKind::invalid_argument, "loglog_fit: abscissae have no spread");
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss = 0;
    for (const auto& [x, y] : points) {
        const double e = std::log(y) - (fit.intercept + fit.slope * std::log(x));
        ss += e * e;
    }
    fit.residual = std::sqrt(ss / count);
    return fit;
}

double slope_tolerance(int n) { return n >= 256 ? 0.5 : 0.75; }

DecayReport make_decay_report(std::vector<std::pair<double, double>> log_pairs, double claim, double tolerance)
{
    std::sort(log_pairs.begin(), log_pairs.end());
    std::vector<std::pair<double, double>> raw;
    raw.reserve(log_pairs.size());
    for (const auto& [lx, ly] : log_pairs)
        raw.emplace_back(std::exp(lx), std::exp(ly));
    const LineFit fit = loglog_fit(raw);
    DecayReport r;
    r.pairs = std::move(log_pairs);
    r.slope = fit.slope;
    r.intercept = fit.intercept;
    r.residual = fit.residual;
    r.claim = claim;
    r.tolerance = tolerance;
    r.pass = r.slope <= -claim + tolerance;
    return r;
}

NormEstimate operator_norm(const cmat& M, const NormOptions& options)
{
    NormEstimate est;
    est.method = options.method;
    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> normal;
    auto random_vector = [&] {
        cvec v(M.cols());
        for (auto& x : v)
            x = {normal(rng), normal(rng)};
        return v;
    };

    if (options.method == NormEstimate::Method::probe_sup) {
        est.probes = options.probes;
        for (int p = 0; p < options.probes; ++p) {
            const cvec f = random_vector();
            est.value = std::max(est.value, (M * f).norm() / f.norm());
        }
        est.confidence_note = "lower bound: supremum of |Mf|/|f| over random probes";
        return est;
    }

    cvec v = random_vector();
    v.normalize();
    double lambda = 0.0;
    est.converged = false;
    for (int it = 1; it <= options.max_iter; ++it) {
        const cvec w = M * v;
        const double next = w.squaredNorm();  // Rayleigh quotient of M^H M
        est.iterations = it;
        cvec u = M.adjoint() * w;
        const double un = u.norm();
        if (un == 0.0) {
            lambda = next;
            est.converged = true;
            break;
        }
        v = u / un;
        if (std::abs(next - lambda) <= options.tol * next) {
            lambda = next;
            est.converged = true;
            break;
        }
        lambda = next;
    }
    est.value = std::sqrt(lambda);
    est.confidence_note = est.converged ? "power iteration on M^H M converged"
                                        : "power iteration hit the iteration cap; value is a lower bound";
    return est;
}

ModerateAudit moderate_audit(const Weight& m, const Weight& v, int samples, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto in_ball = [&](double R) {
        const double r = R * std::sqrt(unit(rng));
        const double a = two_pi * unit(rng);
        return PhasePoint{{r * std::cos(a), 0}, {r * std::sin(a), 0}};
    };
    auto ratio = [&](const PhasePoint& z, const PhasePoint& w) {
        return weight_eval(m, z + w) / (weight_eval(v, z) * weight_eval(m, w));
    };

    ModerateAudit audit;
    double c = ratio(PhasePoint{}, PhasePoint{});
    for (double R : {1.0, 4.0, 16.0, 64.0}) {
        for (int s = 0; s < samples; ++s)
            c = std::max(c, ratio(in_ball(R), in_ball(R)));
        audit.radius_sweep.emplace_back(R, c);
    }
    audit.c_best = c;
    const double previous = audit.radius_sweep[audit.radius_sweep.size() - 2].second;
    audit.pass = std::isfinite(c) && c <= 1.1 * previous;
    return audit;
}

nlohmann::json Report::to_json() const
{
    return nlohmann::json{{"config", config},
                          {"slopes", slopes},
                          {"norms", norms},
                          {"verdicts", verdicts},
                          {"provenance", provenance}};
}

nlohmann::json to_json(const DecayReport& r)
{
    nlohmann::json pairs = nlohmann::json::array();
    for (const auto& [lx, ly] : r.pairs)
        pairs.push_back({lx, ly});
    return {{"slope", r.slope}, {"intercept", r.intercept}, {"residual", r.residual}, {"claim", r.claim},
            {"tolerance", r.tolerance}, {"pass", r.pass}, {"pairs", pairs}};
}

nlohmann::json to_json(const NormEstimate& r)
{
    return {{"value", r.value},
            {"method", r.method == NormEstimate::Method::singular_value ? "singular-value" : "probe-sup"},
            {"probes", r.probes},
            {"iterations", r.iterations},
            {"converged", r.converged},
            {"confidence_note", r.confidence_note}};
}

} // namespace gaborfio
