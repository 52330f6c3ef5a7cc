#include "gaborfio/multiplier.hpp"

#include "gaborfio/kernels.hpp"
#include "gaborfio/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace gaborfio {

std::vector<TfIndex> warp_table(const CanonicalMap& cmap, const Lattice& lattice)
{
    std::vector<TfIndex> out;
    out.reserve(lattice.size());
    for (const ChiPrime& c : chi_prime_table(cmap, lattice))
        out.push_back(c.index);
    return out;
}

std::vector<TfIndex> identity_warp(const Lattice& lattice) { return lattice.points(); }

// ---- multipliers -------------------------------------------------------------------

GaborMultiplier::GaborMultiplier(cvec symbol, const GaborFrameSpec& spec, std::vector<TfIndex> warp)
    : symbol_(std::move(symbol)), spec_(&spec), warp_(std::move(warp))
{
    const std::size_t count = spec.lattice().size();
    if (static_cast<std::size_t>(symbol_.size()) != count || warp_.size() != count)
        throw Error(ErrorKind::invalid_argument, "multiplier symbol and warp must have one entry per lattice point");
    if (!symbol_.allFinite())
        throw Error(ErrorKind::invalid_argument, "multiplier symbol has non-finite entries");
    for (const TfIndex& w : warp_)
        if (!spec.lattice().find(w))
            throw Error(ErrorKind::invalid_argument, "warp value is not a lattice point");
}

Signal apply_multiplier(const GaborMultiplier& M, const Signal& f)
{
    const GaborFrameSpec& spec = M.spec();
    const cvec coeffs = analysis(f, spec);
    const cmat& atoms = spec.atoms();
    const auto N = static_cast<std::size_t>(atoms.rows());
    Signal out(spec.grid());
    for (std::size_t i = 0; i < M.warp().size(); ++i) {
        const cplx w = M.symbol()(static_cast<Eigen::Index>(i)) * coeffs(static_cast<Eigen::Index>(i));
        if (w == cplx(0.0))
            continue;
        const auto target = static_cast<Eigen::Index>(*spec.lattice().find(M.warp()[i]));
        kernels::axpy(w, {atoms.col(target).data(), N}, out.span());
    }
    return out;
}

cmat multiplier_matrix(const GaborMultiplier& M)
{
    // sum_lambda a_lambda pi(chi'(lambda)) g (pi(lambda) g)^*
    const GaborFrameSpec& spec = M.spec();
    const cmat& atoms = spec.atoms();
    cmat warped(atoms.rows(), atoms.cols());
    for (std::size_t i = 0; i < M.warp().size(); ++i) {
        const auto target = static_cast<Eigen::Index>(*spec.lattice().find(M.warp()[i]));
        warped.col(static_cast<Eigen::Index>(i)) = M.symbol()(static_cast<Eigen::Index>(i)) * atoms.col(target);
    }
    return warped * atoms.adjoint();
}

namespace {

std::vector<double> lattice_weights(const Lattice& lat, const Weight& m)
{
    std::vector<double> w(lat.size());
    for (std::size_t i = 0; i < lat.size(); ++i)
        w[i] = weight_eval(m, lat.point(i), lat.grid().d);
    return w;
}

std::vector<double> warped_weights(const Lattice& lat, const std::vector<TfIndex>& warp, const Weight& m)
{
    std::vector<double> w(warp.size());
    for (std::size_t i = 0; i < warp.size(); ++i)
        w[i] = weight_eval(m, to_point(warp[i], lat.grid()), lat.grid().d);
    return w;
}

// sup over seeded random probes of |op f|_{out} / |f|_{in}, coefficients
// taken against the frame of `spec`.
double probe_sup(const cmat& op, const GaborFrameSpec& spec, double p, std::span<const double> w_out,
                 std::span<const double> w_in, int probes, std::uint64_t seed)
{
    std::vector<double> ratios(static_cast<std::size_t>(std::max(probes, 0)), 0.0);
    parallel_for(ratios.size(), [&](std::size_t i) {
        const Signal f = Signal::random(spec.grid(), seed + 0x9e3779b97f4a7c15ULL * (i + 1));
        const double den = gabor_mod_norm(analysis(f, spec), p, w_in);
        if (den == 0.0)
            return;
        const Signal g(spec.grid(), op * f.values);
        ratios[i] = gabor_mod_norm(analysis(g, spec), p, w_out) / den;
    });
    return ratios.empty() ? 0.0 : *std::max_element(ratios.begin(), ratios.end());
}

} // namespace

MultiplierNormReport multiplier_norm_check(const GaborMultiplier& M, double p, const Weight& m, const Weight& m_tilde,
                                           int probes, std::uint64_t seed)
{
    const GaborFrameSpec& spec = M.spec();
    const Lattice& lat = spec.lattice();
    const auto w_out = lattice_weights(lat, m);
    const auto w_tilde = lattice_weights(lat, m_tilde);
    auto w_in = warped_weights(lat, M.warp(), m);
    for (std::size_t i = 0; i < w_in.size(); ++i)
        w_in[i] /= w_tilde[i];

    MultiplierNormReport rep;
    rep.p = p;
    rep.probes = probes;
    rep.empirical_norm = probe_sup(multiplier_matrix(M), spec, p, w_out, w_in, probes, seed);
    for (std::size_t i = 0; i < w_tilde.size(); ++i)
        rep.symbol_norm = std::max(rep.symbol_norm, std::abs(M.symbol()(static_cast<Eigen::Index>(i))) * w_tilde[i]);
    rep.ratio = rep.symbol_norm > 0.0 ? rep.empirical_norm / rep.symbol_norm : 0.0;
    return rep;
}

// ---- symbol extraction ----------------------------------------------------------------

cplx symbol_phase(const TfIndex& nu, const TfIndex& warped_mu, const Grid& grid)
{
    // pi(nu) pi(beta) = e^{-2 pi i x_nu eta_beta} pi(nu + beta)
    return commutation_phase(nu.k, warped_mu.m, grid);
}

double full_nu_radius(const Lattice& lattice)
{
    double r = 0.0;
    for (std::size_t i = 0; i < lattice.size(); ++i)
        r = std::max(r, norm(lattice.point(i), lattice.grid().d));
    return r;
}

MultiplierSymbolTable extract_symbols(const GaborMatrix& G, std::vector<TfIndex> warp, double nu_radius)
{
    const Lattice& lat = G.lattice;
    const Grid& grid = lat.grid();
    if (warp.size() != lat.size())
        throw Error(ErrorKind::invalid_argument, "warp table must have one entry per lattice point");

    MultiplierSymbolTable t;
    t.lattice = lat;
    t.nu_radius = nu_radius;
    t.warp = std::move(warp);

    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < lat.size(); ++i)
        if (norm(lat.point(i), grid.d) <= nu_radius + 1e-12)
            order.push_back(i);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return norm(lat.point(a), grid.d) < norm(lat.point(b), grid.d);
    });
    for (std::size_t i : order) {
        t.nu_set.push_back(lat.points()[i]);
        t.nu_norms.push_back(norm(lat.point(i), grid.d));
    }

    const auto rows = static_cast<Eigen::Index>(t.nu_set.size());
    const auto cols = static_cast<Eigen::Index>(lat.size());
    t.a.resize(rows, cols);
    t.c.resize(rows, cols);
    parallel_for(static_cast<std::size_t>(cols), [&](std::size_t mu) {
        const TfIndex& w = t.warp[mu];
        for (Eigen::Index i = 0; i < rows; ++i) {
            const TfIndex& nu = t.nu_set[static_cast<std::size_t>(i)];
            const auto target = lat.find(add(w, nu, grid));
            if (!target)
                throw Error(ErrorKind::invalid_argument, "warp value is not a lattice point");
            const cplx c = symbol_phase(nu, w, grid);
            t.c(i, static_cast<Eigen::Index>(mu)) = c;
            t.a(i, static_cast<Eigen::Index>(mu)) = c * G.entries(static_cast<Eigen::Index>(mu),
                                                                   static_cast<Eigen::Index>(*target));
        }
    });
    return t;
}

MultiplierSymbolTable extract_symbols(const FioOperator& T, const GaborFrameSpec& spec, const CanonicalMap& cmap,
                                      double nu_radius)
{
    return extract_symbols(gabor_matrix(T, spec), warp_table(cmap, spec.lattice()), nu_radius);
}

// ---- assembly ---------------------------------------------------------------------------

namespace {

void check_radius(const MultiplierSymbolTable& table, double L)
{
    if (L > table.nu_radius + 1e-12) {
        std::ostringstream msg;
        msg << "truncation radius " << L << " exceeds the extraction radius " << table.nu_radius;
        throw Error(ErrorKind::extraction_radius, msg.str());
    }
}

} // namespace

cmat assemble_truncated(const MultiplierSymbolTable& table, const GaborFrameSpec& spec, double L)
{
    check_radius(table, L);
    const Lattice& lat = spec.lattice();
    const Grid& grid = lat.grid();
    const cmat& atoms = spec.atoms();
    const auto N = static_cast<std::size_t>(atoms.rows());
    std::size_t terms = 0;
    while (terms < table.nu_norms.size() && table.nu_norms[terms] <= L + 1e-12)
        ++terms;

    // Column mu of W: sum_nu a_nu(mu) pi(nu) pi(chi'(mu)) g = sum_nu a_nu(mu) conj(c) pi(chi'(mu) + nu) g.
    // Accumulated in nu order, so the result is independent of the thread count.
    cmat W = cmat::Zero(atoms.rows(), atoms.cols());
    parallel_for(lat.size(), [&](std::size_t mu) {
        const auto col = static_cast<Eigen::Index>(mu);
        std::span<cplx> out{W.col(col).data(), N};
        for (std::size_t i = 0; i < terms; ++i) {
            const auto row = static_cast<Eigen::Index>(i);
            const auto target = static_cast<Eigen::Index>(*lat.find(add(table.warp[mu], table.nu_set[i], grid)));
            kernels::axpy(table.a(row, col) * std::conj(table.c(row, col)), {atoms.col(target).data(), N}, out);
        }
    });
    return W * atoms.adjoint();
}

cmat assemble_truncated_reference(const MultiplierSymbolTable& table, const GaborFrameSpec& spec, double L)
{
    check_radius(table, L);
    const Grid& grid = spec.grid();
    const auto N = static_cast<Eigen::Index>(grid.size());
    cmat sum = cmat::Zero(N, N);
    for (std::size_t i = 0; i < table.nu_set.size(); ++i) {
        if (table.nu_norms[i] > L + 1e-12)
            break;
        const GaborMultiplier M(table.a.row(static_cast<Eigen::Index>(i)).transpose(), spec, table.warp);
        const cmat Ma = multiplier_matrix(M);
        for (Eigen::Index col = 0; col < N; ++col) {
            const Signal column(grid, Ma.col(col));
            sum.col(col) += tf_shift(column, table.nu_set[i]).values;
        }
    }
    return sum;
}

TruncationCurve truncation_error_curve(const cmat& T, const MultiplierSymbolTable& table, const GaborFrameSpec& spec,
                                       std::span<const double> L_list, double p, const Weight& m,
                                       const NormOptions& options)
{
    if (L_list.size() < 3)
        throw Error(ErrorKind::invalid_argument, "truncation error curve needs at least 3 radii");
    const Lattice& lat = spec.lattice();
    const bool plain = p == 2.0 && m.is_polynomial() && m.s == 0.0;
    const auto w_out = lattice_weights(lat, m);
    const auto w_in = warped_weights(lat, table.warp, m);
    const double full = full_nu_radius(lat);

    auto measure = [&](double L) {
        const cmat D = T - assemble_truncated(table, spec, L);
        if (plain) {
            NormOptions o = options;
            o.method = NormEstimate::Method::singular_value;
            return operator_norm(D, o);
        }
        NormEstimate e;
        e.method = NormEstimate::Method::probe_sup;
        e.probes = options.probes;
        e.value = probe_sup(D, spec, p, w_out, w_in, options.probes, options.seed);
        e.confidence_note = "probe supremum over " + std::to_string(options.probes)
                            + " random signals; a lower bound on the operator norm";
        return e;
    };

    TruncationCurve curve;
    std::vector<std::pair<double, double>> fit_pts;
    for (double L : L_list) {
        if (!(L >= 0.0))
            throw Error(ErrorKind::invalid_argument, "truncation radii must be >= 0");
        TruncationPoint pt;
        pt.L = L;
        // radii past the whole lattice are the same sum as the full radius
        pt.estimate = measure(table.nu_radius >= full ? std::min(L, table.nu_radius) : L);
        pt.error = pt.estimate.value;
        curve.points.push_back(pt);
        if (L > 0.0 && L < full && pt.error > 0.0)
            fit_pts.emplace_back(L, pt.error);
    }
    if (table.nu_radius >= full)
        curve.full_residual = measure(full).value;
    curve.fit_points = fit_pts.size();
    if (fit_pts.size() >= 3) {
        curve.fit = loglog_fit(fit_pts);
        curve.fit_valid = true;
    }
    return curve;
}

// ---- dilation closed form ----------------------------------------------------------------

cplx dilation_symbol_closed_form(double s, double alpha, double beta, long k, long l, long kp, long lp)
{
    // mu = (alpha k, beta l), chi'(mu) = (alpha floor(k/s), beta floor(s l)), nu = (alpha k', beta l').
    const double fk = std::floor(static_cast<double>(k) / s + 1e-9);
    const double fl = std::floor(s * static_cast<double>(l) + 1e-9);
    const double p = alpha * static_cast<double>(k);
    const double q = alpha * (fk + static_cast<double>(kp));
    const double omega = beta * (s * static_cast<double>(l) - fl - static_cast<double>(lp));
    const double s2 = s * s + 1.0;
    const double modulus = std::exp(-M_PI * omega * omega / s2 - M_PI * (p - s * q) * (p - s * q) / s2) / std::sqrt(s2);
    const double angle = two_pi * (omega * (s * p + q) / s2 + alpha * static_cast<double>(kp) * beta * fl);
    return std::polar(modulus, angle);
}

} // namespace gaborfio
