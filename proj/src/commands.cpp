#include "gaborfio/commands.hpp"

#include "gaborfio/kernels.hpp"
#include "gaborfio/multiplier.hpp"
#include "gaborfio/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace gaborfio {

using nlohmann::json;

std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size())
{
    for (std::size_t i = 0; i < header.size(); ++i)
        body_ += (i ? "," : "") + header[i];
    body_ += '\n';
}

void CsvWriter::row(const std::vector<double>& values)
{
    if (values.size() != columns_)
        throw Error(ErrorKind::invalid_argument, "CSV row has the wrong number of columns");
    for (std::size_t i = 0; i < values.size(); ++i)
        body_ += (i ? "," : "") + format_double(values[i]);
    body_ += '\n';
}

namespace {

CommandResult start(const RunConfig& cfg, const std::string& command)
{
    CommandResult r;
    r.report.config = to_json(cfg);
    r.report.provenance = {
        {"tool", "gaborfio"},
        {"command", command},
        {"seed", cfg.seed},
        {"kernel_isa", std::string(kernels::isa_name(kernels::active().isa))},
        {"threads", thread_count()},
    };
    return r;
}

std::string window_csv(const Signal& g)
{
    CsvWriter csv(g.grid.d == 1 ? std::vector<std::string>{"index", "x", "re", "im"}
                                : std::vector<std::string>{"index", "x0", "x1", "re", "im"});
    for (std::size_t i = 0; i < g.grid.size(); ++i) {
        const auto idx = g.grid.unflat(i);
        const cplx v = g.values(static_cast<Eigen::Index>(i));
        if (g.grid.d == 1)
            csv.row({double(i), g.grid.coord(idx[0]), v.real(), v.imag()});
        else
            csv.row({double(i), g.grid.coord(idx[0]), g.grid.coord(idx[1]), v.real(), v.imag()});
    }
    return csv.body();
}

json bounds_json(const FrameBounds& b)
{
    return {{"lower", b.lower}, {"upper", b.upper}, {"is_frame", b.is_frame}};
}

// Frame spec with the configured window, tightened if requested.
GaborFrameSpec analysis_spec(const RunConfig& cfg)
{
    const Lattice lattice = build_lattice(cfg);
    GaborFrameSpec raw(build_window(cfg), lattice);
    if (!cfg.tighten)
        return raw;
    return GaborFrameSpec(canonical_tight_window(raw), lattice);
}

double default_claim(const SymbolTable& sym)
{
    const double c = sym.tag.decay_claim();
    return c > 0.0 ? c : 4.0;
}

} // namespace

// ---- frame-check -------------------------------------------------------------------

CommandResult cmd_frame_check(const RunConfig& cfg)
{
    CommandResult out = start(cfg, "frame-check");
    const Lattice lattice = build_lattice(cfg);
    const GaborFrameSpec spec(build_window(cfg), lattice);
    const FrameBounds b = frame_bounds(spec);
    out.report.norms["frame_bounds"] = bounds_json(b);
    out.report.norms["redundancy"] = lattice.redundancy();
    out.report.verdicts["is_frame"] = b.is_frame;
    if (!b.is_frame) {
        out.report.verdicts["message"] = "not a frame: lower bound below 1e-10 times the upper bound";
        out.exit_code = exit_not_a_frame;
        return out;
    }

    const Signal tight = canonical_tight_window(spec);
    const Signal dual = dual_window(spec);
    const GaborFrameSpec tight_spec(tight, lattice);
    const FrameBounds tb = frame_bounds(tight_spec);
    const double parseval_residual = std::max(std::abs(tb.lower - 1.0), std::abs(tb.upper - 1.0));

    const Signal f = Signal::random(cfg.grid, cfg.seed);
    const Signal back = synthesis(analysis(f, tight_spec), tight_spec);
    const double recon = (back.values - f.values).norm() / f.norm();

    out.report.norms["tight_frame_bounds"] = bounds_json(tb);
    out.report.norms["parseval_residual"] = parseval_residual;
    out.report.norms["reconstruction_residual"] = recon;
    out.report.verdicts["parseval_after_tightening"] = parseval_residual < 1e-8;
    out.files.push_back({"tight_window.csv", window_csv(tight)});
    out.files.push_back({"dual_window.csv", window_csv(dual)});
    return out;
}

// ---- decay-scan ----------------------------------------------------------------------

namespace {

struct ScanResult {
    DecayReport fit;
    std::vector<DecayBin> profile;
};

ScanResult scan(const RunConfig& cfg, const GaborFrameSpec& spec, const SymbolConfig& symbol, const CanonicalMap& cmap,
                double claim, double tol, GaborMatrix* keep)
{
    const FioOperator T(cfg.grid, build_phase(cfg.phase), build_symbol(symbol, cfg.grid, cfg.seed));
    GaborMatrix G = gabor_matrix(T, spec);
    ScanResult r;
    r.profile = decay_profile(G, cmap);
    r.fit = decay_envelope_fit(G, cmap, claim, tol);
    if (keep)
        *keep = std::move(G);
    return r;
}

} // namespace

CommandResult cmd_decay_scan(const RunConfig& cfg)
{
    CommandResult out = start(cfg, "decay-scan");
    const GaborFrameSpec spec = analysis_spec(cfg);
    const CanonicalMap cmap(build_phase(cfg.phase));
    const SymbolTable sym = build_symbol(cfg.symbol, cfg.grid, cfg.seed);
    const double claim = cfg.s_claim ? *cfg.s_claim : default_claim(sym);
    const double tol = cfg.tolerance ? *cfg.tolerance : slope_tolerance(cfg.grid.n);

    const FioOperator T(cfg.grid, build_phase(cfg.phase), sym);
    const GaborMatrix G = gabor_matrix(T, spec);
    if (!G.parseval)
        out.report.provenance["warning"] = G.warning;

    CsvWriter csv({"distance", "max_abs", "envelope", "in_fit"});
    for (const auto& b : decay_profile(G, cmap))
        csv.row({b.r, b.max_abs, b.envelope, b.in_fit ? 1.0 : 0.0});
    out.files.push_back({"decay.csv", csv.body()});

    const double bound = std::sqrt(2.0 * cfg.grid.d) * spec.lattice().generator_norm() + 1.0;
    const TransportAudit ta = transport_audit(G, cmap, bound);
    out.report.norms["transport"] = {{"bound", bound}, {"max_distance", ta.max_distance},
                                     {"fraction_within", ta.fraction_within}};
    out.report.verdicts["transport"] = ta.fraction_within == 1.0;

    try {
        const DecayReport fit = decay_envelope_fit(G, cmap, claim, tol);
        out.report.slopes["decay"] = to_json(fit);
        out.report.verdicts["decay"] = fit.pass;
        if (cfg.compare_symbol) {
            const ScanResult other = scan(cfg, spec, *cfg.compare_symbol, cmap, claim, tol, nullptr);
            out.report.slopes["compare_decay"] = to_json(other.fit);
            out.report.slopes["slope_difference"] = other.fit.slope - fit.slope;
            out.report.verdicts["compare_steeper_by_1"] = other.fit.slope <= fit.slope - 1.0;
            CsvWriter c2({"distance", "max_abs", "envelope"});
            for (const auto& b : other.profile)
                c2.row({b.r, b.max_abs, b.envelope});
            out.files.push_back({"decay_compare.csv", c2.body()});
        }
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::insufficient_range)
            throw;
        out.report.verdicts["decay"] = "insufficient_range";
        out.report.verdicts["message"] = e.what();
        out.exit_code = exit_insufficient_range;
    }
    return out;
}

// ---- approximate ----------------------------------------------------------------------

CommandResult cmd_approximate(const RunConfig& cfg)
{
    CommandResult out = start(cfg, "approximate");
    const GaborFrameSpec spec = analysis_spec(cfg);
    const CanonicalMap cmap(build_phase(cfg.phase));
    const SymbolTable sym = build_symbol(cfg.symbol, cfg.grid, cfg.seed);
    const FioOperator T(cfg.grid, build_phase(cfg.phase), sym);
    const cmat Tm = fio_matrix(T);
    const GaborMatrix G = gabor_matrix(Tm, spec);
    const double full = full_nu_radius(spec.lattice());
    const double radius = cfg.nu_radius ? *cfg.nu_radius : full;
    const MultiplierSymbolTable table = extract_symbols(G, warp_table(cmap, spec.lattice()), radius);

    NormOptions opts;
    opts.seed = cfg.seed;
    TruncationCurve curve;
    try {
        curve = truncation_error_curve(Tm, table, spec, cfg.L_list, cfg.p, Weight::polynomial(cfg.weight_s), opts);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::extraction_radius)
            throw;
        out.report.verdicts["message"] = e.what();
        out.exit_code = exit_extraction_radius;
        return out;
    }

    CsvWriter csv({"L", "error"});
    json points = json::array();
    for (const auto& pt : curve.points) {
        csv.row({pt.L, pt.error});
        points.push_back({{"L", pt.L}, {"error", pt.error}, {"norm", to_json(pt.estimate)}});
    }
    out.files.push_back({"error_curve.csv", csv.body()});
    out.report.norms["error_curve"] = points;
    out.report.norms["full_radius"] = full;
    out.report.norms["extraction_radius"] = radius;
    if (radius >= full) {
        out.report.norms["full_reconstruction_residual"] = curve.full_residual;
        out.report.verdicts["full_reconstruction"] = curve.full_residual < 1e-9;
    }

    // non-increasing in L (1e-10 slack)
    std::vector<TruncationPoint> sorted = curve.points;
    std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.L < b.L; });
    bool monotone = true;
    for (std::size_t i = 1; i < sorted.size(); ++i)
        monotone = monotone && sorted[i].error <= sorted[i - 1].error + 1e-10;
    out.report.verdicts["non_increasing"] = monotone;

    const double r = cfg.weight_s;
    const int d = cfg.grid.d;
    std::optional<double> claim;
    if (sym.tag.kind == SmoothnessTag::Kind::bandlimited)
        claim = 2.0 * sym.tag.parameter - 2.0 * d - r;
    else if (sym.tag.kind == SmoothnessTag::Kind::weighted)
        claim = sym.tag.parameter - 2.0 * d - r;
    const double tol = cfg.tolerance ? *cfg.tolerance : slope_tolerance(cfg.grid.n);
    if (curve.fit_valid) {
        json s{{"slope", curve.fit.slope}, {"intercept", curve.fit.intercept}, {"residual", curve.fit.residual},
               {"points", curve.fit_points}, {"tolerance", tol}};
        if (claim) {
            s["claim"] = *claim;
            out.report.verdicts["rate"] = curve.fit.slope <= -*claim + tol;
        }
        out.report.slopes["truncation"] = s;
    } else {
        out.report.slopes["truncation"] = {{"points", curve.fit_points},
                                           {"note", "fewer than 3 radii below the full lattice radius"}};
    }
    return out;
}

// ---- dilation-demo --------------------------------------------------------------------

CommandResult cmd_dilation_demo(const RunConfig& cfg)
{
    CommandResult out = start(cfg, "dilation-demo");
    const Grid& grid = cfg.grid;
    const double h = grid.h();
    const double s = cfg.phase.s;
    const long a_units = std::lround(cfg.alpha / h), b_units = std::lround(cfg.beta / h);
    const Lattice lattice = separable_lattice(grid, a_units, b_units);
    const Signal g = gaussian_window(grid, 1.0);  // e^{-pi t^2}, not normalised
    const CanonicalMap cmap(dilation_phase(s));
    const FioOperator T(grid, dilation_phase(s), constant_symbol(grid));

    struct Entry {
        long k, l, kp, lp;
        cplx closed, numeric;
    };
    const long kmax = static_cast<long>(std::floor(cfg.mu_radius / cfg.alpha + 1e-9));
    const long lmax = static_cast<long>(std::floor(cfg.mu_radius / cfg.beta + 1e-9));
    const long kpmax = static_cast<long>(std::floor(cfg.demo_nu_radius / cfg.alpha + 1e-9));
    const long lpmax = static_cast<long>(std::floor(cfg.demo_nu_radius / cfg.beta + 1e-9));

    std::vector<std::pair<long, long>> mus, nus;
    for (long k = -kmax; k <= kmax; ++k)
        for (long l = -lmax; l <= lmax; ++l)
            if (std::hypot(k * cfg.alpha, l * cfg.beta) <= cfg.mu_radius + 1e-12)
                mus.emplace_back(k, l);
    for (long k = -kpmax; k <= kpmax; ++k)
        for (long l = -lpmax; l <= lpmax; ++l)
            if (std::hypot(k * cfg.alpha, l * cfg.beta) <= cfg.demo_nu_radius + 1e-12)
                nus.emplace_back(k, l);

    std::vector<std::vector<Entry>> per_mu(mus.size());
    std::vector<double> c_dev(mus.size(), 0.0);
    parallel_for(mus.size(), [&](std::size_t i) {
        const auto [k, l] = mus[i];
        const TfIndex mu{{k * a_units, 0}, {l * b_units, 0}};
        const Signal image = apply_fio(T, tf_shift(g, wrap(mu, grid)));
        const ChiPrime cp = chi_prime(cmap, lattice, wrap(mu, grid));
        Signal atom(grid);
        for (const auto& [kp, lp] : nus) {
            const TfIndex nu = wrap(TfIndex{{kp * a_units, 0}, {lp * b_units, 0}}, grid);
            const cplx c = symbol_phase(nu, cp.index, grid);
            c_dev[i] = std::max(c_dev[i], std::abs(std::abs(c) - 1.0));
            tf_shift_into(g.span(), grid, add(cp.index, nu, grid), atom.span());
            // h turns the discrete inner product into the continuum integral
            const cplx numeric = c * inner(image, atom) * h;
            per_mu[i].push_back({k, l, kp, lp, dilation_symbol_closed_form(s, cfg.alpha, cfg.beta, k, l, kp, lp),
                                 numeric});
        }
    });

    std::vector<Entry> entries;
    for (auto& v : per_mu)
        entries.insert(entries.end(), v.begin(), v.end());
    CsvWriter csv({"k", "l", "kp", "lp", "closed_form_re", "closed_form_im", "numeric_re", "numeric_im", "abs_err"});
    for (const Entry& e : entries)
        csv.row({double(e.k), double(e.l), double(e.kp), double(e.lp), e.closed.real(), e.closed.imag(),
                 e.numeric.real(), e.numeric.imag(), std::abs(e.closed - e.numeric)});
    out.files.push_back({"dilation_symbols.csv", csv.body()});

    // relative error over the 99% of entries with the largest closed-form modulus
    std::vector<double> mods;
    for (const Entry& e : entries)
        mods.push_back(std::abs(e.closed));
    std::vector<double> sorted = mods;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t drop = sorted.size() / 100;
    const double cutoff = sorted.empty() ? 0.0 : sorted[drop];
    double max_rel = 0.0, max_abs = 0.0;
    std::size_t used = 0;
    for (const Entry& e : entries) {
        const double err = std::abs(e.closed - e.numeric);
        max_abs = std::max(max_abs, err);
        if (std::abs(e.closed) >= cutoff && std::abs(e.closed) > 0.0) {
            max_rel = std::max(max_rel, err / std::abs(e.closed));
            ++used;
        }
    }
    const double c_max = c_dev.empty() ? 0.0 : *std::max_element(c_dev.begin(), c_dev.end());
    out.report.norms["entries"] = entries.size();
    out.report.norms["entries_compared"] = used;
    out.report.norms["max_relative_error"] = max_rel;
    out.report.norms["max_abs_error"] = max_abs;
    out.report.norms["max_unit_phase_deviation"] = c_max;
    out.report.verdicts["closed_form_match"] = max_rel < 5e-2;
    out.report.verdicts["unit_phases"] = c_max == 0.0;
    return out;
}

// ---- warp-frame ---------------------------------------------------------------------------

namespace {

std::vector<Eigen::MatrixXd> default_sweep(const RunConfig& cfg)
{
    // nested chain: each lattice contains the previous one
    const std::vector<std::pair<double, double>> factors{{2, 2}, {2, 1}, {1, 1}, {0.5, 1}, {0.5, 0.5}};
    std::vector<Eigen::MatrixXd> out;
    for (const auto& [fx, fy] : factors) {
        Eigen::MatrixXd scale = Eigen::MatrixXd::Identity(2, 2);
        scale(0, 0) = fx;
        scale(1, 1) = fy;
        const Eigen::MatrixXd gen = cfg.generator * scale;
        try {
            (void)enumerate_lattice(gen, cfg.grid);
            out.push_back(gen);
        } catch (const Error&) {
        }
    }
    return out;
}

} // namespace

CommandResult cmd_warp_frame(const RunConfig& cfg)
{
    CommandResult out = start(cfg, "warp-frame");
    const Signal g = normalized(build_window(cfg));
    const CanonicalMap cmap(build_phase(cfg.phase));
    const Grid grid = cfg.grid;
    const PhaseBranchMap chi = [&](const PhasePoint& z) { return torus_images(cmap, z, grid); };

    const Lattice lattice = build_lattice(cfg);
    const WarpedFrameReport rep = warped_frame_check(g, lattice, chi);
    const double ratio = rep.bounds.upper > 0.0 ? rep.bounds.lower / rep.bounds.upper : 0.0;
    out.report.norms["warped_bounds"] = bounds_json(rep.bounds);
    out.report.norms["bound_ratio"] = ratio;
    out.report.norms["redundancy"] = lattice.redundancy();
    out.report.norms["warped_redundancy"] = static_cast<double>(rep.warped_points.size()) / cfg.grid.size();
    out.report.norms["max_rounding_displacement"] = rep.max_rounding_displacement;
    out.report.verdicts["warped_frame"] = ratio > 1e-6 ? "frame" : (ratio < 1e-10 ? "not_a_frame" : "indeterminate");

    struct Row {
        double density, lower, upper;
    };
    std::vector<Row> rows;
    for (const auto& gen : cfg.sweep.empty() ? default_sweep(cfg) : cfg.sweep) {
        const Lattice lat = build_lattice(cfg, gen);
        const WarpedFrameReport r = warped_frame_check(g, lat, chi);
        rows.push_back({lat.redundancy(), r.bounds.lower, r.bounds.upper});
    }
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.density < b.density; });
    CsvWriter csv({"density", "lower", "upper", "ratio"});
    bool monotone = true;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const Row& r = rows[i];
        csv.row({r.density, r.lower, r.upper, r.upper > 0.0 ? r.lower / r.upper : 0.0});
        if (i > 0)
            monotone = monotone && r.lower >= rows[i - 1].lower - 1e-12 * std::max(1.0, r.upper);
    }
    out.files.push_back({"delta_sweep.csv", csv.body()});
    out.report.verdicts["sweep_non_decreasing"] = monotone;
    return out;
}

// ---- dispatch ------------------------------------------------------------------------------

CommandResult run_command(const std::string& command, const RunConfig& cfg)
{
    try {
        if (command == "frame-check")
            return cmd_frame_check(cfg);
        if (command == "decay-scan")
            return cmd_decay_scan(cfg);
        if (command == "approximate")
            return cmd_approximate(cfg);
        if (command == "dilation-demo")
            return cmd_dilation_demo(cfg);
        if (command == "warp-frame")
            return cmd_warp_frame(cfg);
    } catch (const Error& e) {
        CommandResult r = start(cfg, command);
        r.report.verdicts["error"] = to_string(e.kind());
        r.report.verdicts["message"] = e.what();
        switch (e.kind()) {
        case ErrorKind::not_a_frame: r.exit_code = exit_not_a_frame; break;
        case ErrorKind::insufficient_range: r.exit_code = exit_insufficient_range; break;
        case ErrorKind::extraction_radius: r.exit_code = exit_extraction_radius; break;
        default: r.exit_code = exit_config; break;
        }
        return r;
    }
    throw ConfigError(std::vector<ConfigIssue>{{"command", "unknown subcommand \"" + command + "\""}});
}

} // namespace gaborfio
