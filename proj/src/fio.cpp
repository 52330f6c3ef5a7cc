#include "gaborfio/fio.hpp"

#include "gaborfio/kernels.hpp"
#include "gaborfio/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

namespace gaborfio {

double SmoothnessTag::decay_claim() const
{
    switch (kind) {
    case Kind::bandlimited: return 2.0 * parameter;
    case Kind::weighted: return parameter;
    default: return 0.0;
    }
}

std::string SmoothnessTag::label() const
{
    std::ostringstream out;
    switch (kind) {
    case Kind::constant: out << "constant"; break;
    case Kind::bandlimited: out << "bandlimited(N=" << parameter << ")"; break;
    case Kind::weighted: out << "weighted(s=" << parameter << ")"; break;
    case Kind::custom: out << "custom"; break;
    }
    return out.str();
}

// ---- symbols ---------------------------------------------------------------------

SymbolTable constant_symbol(const Grid& grid, cplx value)
{
    if (grid.d != 1)
        throw Error(ErrorKind::invalid_argument, "symbols are only supported for d = 1");
    SymbolTable t{grid, cmat::Constant(grid.n, grid.n, value), {}};
    return t;
}

double bandlimit_index(int n, int N)
{
    if (N < 1)
        throw Error(ErrorKind::invalid_argument, "band-limit order N must be >= 1");
    return static_cast<double>(n) / (4.0 * N);
}

SymbolTable spectral_symbol(const Grid& grid, const std::function<double(double)>& amplitude, std::uint64_t seed,
                            SmoothnessTag tag)
{
    if (grid.d != 1)
        throw Error(ErrorKind::invalid_argument, "symbols are only supported for d = 1");
    const int n = grid.n;
    const double h = grid.h();
    const Grid plane(n, 2);
    Signal coeffs(plane);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(0.0, two_pi);
    for (long p = 0; p < n; ++p) {
        for (long q = 0; q < n; ++q) {
            // one draw per cell, so the phases do not depend on the amplitude law
            const double theta = angle(rng);
            const long ps = grid.symmetric(p), qs = grid.symmetric(q);
            if (ps == 0 && qs == 0)
                continue;
            const double a = amplitude(h * std::hypot(static_cast<double>(ps), static_cast<double>(qs)));
            if (a != 0.0)
                coeffs.values[p * n + q] = std::polar(a, theta);
        }
    }
    // unitary transform: the coefficient norm is the rms of sigma - 1 over the grid
    const double rms = coeffs.values.norm();
    if (rms > 0.0)
        coeffs.values /= rms;
    // the unitary idft carries 1/n on the n x n plane; undo it to get the plain sum
    const Signal field = idft(coeffs);
    cmat out(n, n);
    for (long j = 0; j < n; ++j)
        for (long m = 0; m < n; ++m)
            out(j, m) = 1.0 + field.values[j * n + m] * static_cast<double>(n);
    return SymbolTable{grid, std::move(out), tag};
}

SymbolTable bandlimited_symbol(const Grid& grid, int N, std::uint64_t seed)
{
    const double band = bandlimit_index(grid.n, N) * grid.h();
    auto amp = [=](double w) { return w > band + 1e-12 ? 0.0 : 1.0; };
    return spectral_symbol(grid, amp, seed, {SmoothnessTag::Kind::bandlimited, double(N)});
}

SymbolTable weighted_symbol(const Grid& grid, double s, std::uint64_t seed)
{
    if (!(s >= 0.0))
        throw Error(ErrorKind::invalid_argument, "symbol weight exponent must be >= 0");
    auto amp = [=](double w) { return std::pow(1.0 + w * w, -0.5 * s); };
    return spectral_symbol(grid, amp, seed, {SmoothnessTag::Kind::weighted, s});
}

// ---- operator --------------------------------------------------------------------

FioOperator::FioOperator(const Grid& grid, TamePhase phase, SymbolTable symbol)
    : grid_(grid), phase_(std::move(phase)), symbol_(std::move(symbol))
{
    if (grid_.d != 1)
        throw Error(ErrorKind::invalid_argument, "FIOs are only supported for d = 1");
    if (!(symbol_.grid == grid_))
        throw Error(ErrorKind::invalid_argument, "symbol grid differs from operator grid");
    const int n = grid_.n;
    if (symbol_.values.rows() != n || symbol_.values.cols() != n)
        throw Error(ErrorKind::invalid_argument, "symbol table must be n x n");
    if (!symbol_.values.allFinite())
        throw Error(ErrorKind::invalid_argument, "symbol table has non-finite entries");

    const double h = grid_.h();
    kernel_.resize(n, n);
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t jj) {
        const long j = static_cast<long>(jj);
        const double x = grid_.coord(j);
        for (long m = 0; m < n; ++m) {
            const double phi = phase_.value(x, grid_.coord(m));
            // reduce mod 1 first: keeps the argument small for large |Phi|
            const double frac = phi - std::round(phi);
            kernel_(j, m) = std::polar(h, two_pi * frac) * symbol_.values(j, m);
        }
    });
}

Signal apply_fio(const FioOperator& T, const Signal& f)
{
    if (!(f.grid == T.grid()))
        throw Error(ErrorKind::invalid_argument, "signal grid differs from operator grid");
    const Signal fhat = dft(f);
    return Signal(T.grid(), T.kernel() * fhat.values);
}

cmat fio_matrix(const FioOperator& T)
{
    const std::size_t N = T.grid().size();
    if (N > max_dense_size)
        throw Error(ErrorKind::size_guard, "dense FIO matrix needs n^d <= 1024, got " + std::to_string(N));
    // K applied to the columns of the unitary DFT matrix.
    const int n = T.grid().n;
    const auto& roots = roots_of_unity(n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    cmat F(n, n);
    for (long m = 0; m < n; ++m)
        for (long k = 0; k < n; ++k)
            F(m, k) = std::conj(roots[static_cast<std::size_t>((m * k) % n)]) * scale;
    return T.kernel() * F;
}

// ---- Gabor matrix ----------------------------------------------------------------

GaborMatrix gabor_matrix(const cmat& op, const GaborFrameSpec& spec)
{
    const auto N = static_cast<Eigen::Index>(spec.grid().size());
    if (op.rows() != N || op.cols() != N)
        throw Error(ErrorKind::invalid_argument, "operator size does not match the frame grid");

    GaborMatrix G{spec.lattice(), spec.window(), {}, true, {}};
    const FrameBounds b = spec.frame_bounds ? *spec.frame_bounds : frame_bounds(spec);
    if (std::abs(b.lower - 1.0) > 1e-8 || std::abs(b.upper - 1.0) > 1e-8) {
        std::ostringstream msg;
        msg.precision(6);
        msg << "frame is not Parseval (bounds " << b.lower << ", " << b.upper
            << "); Gabor matrix computed anyway";
        G.parseval = false;
        G.warning = msg.str();
    }

    const cmat& atoms = spec.atoms();
    const cmat image = op * atoms;  // column mu: T pi(mu) g
    const auto count = atoms.cols();
    G.entries.resize(count, count);
    // G(mu, lambda) = <image_mu, atom_lambda>
    parallel_for(static_cast<std::size_t>(count), [&](std::size_t mu) {
        const auto len = static_cast<std::size_t>(N);
        const cplx* t = image.col(static_cast<Eigen::Index>(mu)).data();
        for (Eigen::Index lam = 0; lam < count; ++lam)
            G.entries(static_cast<Eigen::Index>(mu), lam) = kernels::dot_conj({t, len}, {atoms.col(lam).data(), len});
    });
    return G;
}

GaborMatrix gabor_matrix(const FioOperator& T, const GaborFrameSpec& spec)
{
    if (!(T.grid() == spec.grid()))
        throw Error(ErrorKind::invalid_argument, "frame grid differs from operator grid");
    return gabor_matrix(fio_matrix(T), spec);
}

// ---- decay measurements -------------------------------------------------------------

namespace {

double torus_distance(const PhasePoint& a, const PhasePoint& b, const Grid& grid)
{
    return norm(wrap(a - b, grid), grid.d);
}

using Branches = std::vector<PhasePoint>;

std::vector<Branches> chi_rows(const GaborMatrix& G, const CanonicalMap& cmap)
{
    std::vector<Branches> out(G.lattice.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = torus_images(cmap, G.lattice.point(i), G.lattice.grid());
    return out;
}

double branch_distance(const Branches& chi, const PhasePoint& p, const Grid& grid)
{
    double best = std::numeric_limits<double>::infinity();
    for (const PhasePoint& c : chi)
        best = std::min(best, torus_distance(c, p, grid));
    return best;
}

// bin index -> (max |G|) keyed by floor(log r / width)
std::map<long, double> log_bins(const GaborMatrix& G, const CanonicalMap& cmap)
{
    const Grid& grid = G.lattice.grid();
    std::vector<PhasePoint> chi(G.lattice.size());
    for (std::size_t i = 0; i < chi.size(); ++i)
        chi[i] = cmap(G.lattice.point(i));
    std::map<long, double> bins;
    for (std::size_t mu = 0; mu < chi.size(); ++mu) {
        for (std::size_t lam = 0; lam < chi.size(); ++lam) {
            const double mag = std::abs(G.entries(static_cast<Eigen::Index>(mu), static_cast<Eigen::Index>(lam)));
            const double r = std::sqrt(1.0 + std::pow(torus_distance(chi[mu], G.lattice.point(lam), grid), 2));
            const long key = static_cast<long>(std::floor(std::log(r) / decay_bin_width));
            auto [it, inserted] = bins.try_emplace(key, mag);
            if (!inserted)
                it->second = std::max(it->second, mag);
        }
    }
    return bins;
}

double bin_center(long key) { return std::exp((static_cast<double>(key) + 0.5) * decay_bin_width); }

} // namespace

std::vector<DecayBin> decay_profile(const GaborMatrix& G, const CanonicalMap& cmap)
{
    std::vector<DecayBin> out;
    for (const auto& [key, mag] : log_bins(G, cmap))
        out.push_back({bin_center(key), mag, mag, false});
    if (out.empty())
        return out;
    const double r_max = out.back().r;
    double global_max = 0.0;
    for (const auto& b : out)
        global_max = std::max(global_max, b.max_abs);
    // running max from the far end of the fit window inwards
    double running = 0.0;
    for (std::size_t i = out.size(); i-- > 0;) {
        DecayBin& b = out[i];
        if (b.r > 0.5 * r_max) {
            b.envelope = b.max_abs;
            continue;
        }
        running = std::max(running, b.max_abs);
        b.envelope = running;
        b.in_fit = b.r >= 2.0 && b.envelope > decay_noise_floor * global_max;
    }
    return out;
}

DecayReport decay_envelope_fit(const GaborMatrix& G, const CanonicalMap& cmap, double s_claim, double tolerance)
{
    const auto profile = decay_profile(G, cmap);
    std::vector<std::pair<double, double>> pairs;
    for (const auto& b : profile)
        if (b.in_fit)
            pairs.emplace_back(std::log(b.r), std::log(b.envelope));
    if (pairs.size() < 4) {
        std::ostringstream msg;
        msg << "decay fit needs >= 4 distance bins in [2, r_max/2], got " << pairs.size()
            << " (r_max = " << (profile.empty() ? 0.0 : profile.back().r) << ")";
        throw Error(ErrorKind::insufficient_range, msg.str());
    }
    return make_decay_report(std::move(pairs), s_claim, tolerance);
}

TransportAudit transport_audit(const GaborMatrix& G, const CanonicalMap& cmap, double bound)
{
    const Grid& grid = G.lattice.grid();
    const auto chi = chi_rows(G, cmap);
    TransportAudit out;
    out.bound = bound;
    out.row_distance.resize(chi.size());
    std::size_t within = 0;
    for (std::size_t mu = 0; mu < chi.size(); ++mu) {
        const auto row = G.entries.row(static_cast<Eigen::Index>(mu)).cwiseAbs().eval();
        const double peak = row.maxCoeff();
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index lam = 0; lam < row.size(); ++lam)
            if (row(lam) >= peak * (1.0 - 1e-9))
                best = std::min(best, branch_distance(chi[mu], G.lattice.point(static_cast<std::size_t>(lam)), grid));
        out.row_distance[mu] = best;
        out.max_distance = std::max(out.max_distance, best);
        if (best <= bound)
            ++within;
    }
    out.fraction_within = chi.empty() ? 1.0 : static_cast<double>(within) / static_cast<double>(chi.size());
    return out;
}

EnvelopeReport envelope_function_audit(const GaborMatrix& G, const TamePhase& phase, const Weight& m, double bin_width)
{
    if (!(bin_width > 0.0))
        throw Error(ErrorKind::invalid_argument, "envelope bin width must be positive");
    const Grid& grid = G.lattice.grid();
    const std::size_t count = G.lattice.size();
    std::map<std::pair<long, long>, double> bins;
    auto key_of = [&](double u1, double u2) {
        return std::make_pair(std::lround(grid.wrap(u1) / bin_width), std::lround(grid.wrap(u2) / bin_width));
    };
    for (std::size_t mu = 0; mu < count; ++mu) {
        const PhasePoint in = G.lattice.point(mu);
        for (std::size_t lam = 0; lam < count; ++lam) {
            const PhasePoint outp = G.lattice.point(lam);
            const double u1 = outp.eta[0] - phase.grad_x(outp.x[0], in.eta[0]);
            const double u2 = in.x[0] - phase.grad_eta(outp.x[0], in.eta[0]);
            const double mag = std::abs(G.entries(static_cast<Eigen::Index>(mu), static_cast<Eigen::Index>(lam)));
            auto [it, inserted] = bins.try_emplace(key_of(u1, u2), mag);
            if (!inserted)
                it->second = std::max(it->second, mag);
        }
    }

    EnvelopeReport rep;
    rep.bin_width = bin_width;
    for (const auto& [key, env] : bins) {
        rep.bins.push_back({key.first, key.second, env});
        PhasePoint u;
        u.eta[0] = key.first * bin_width;
        u.x[0] = key.second * bin_width;
        rep.l1_mass += env * weight_eval(m, u, 1);
    }
    // Second pass: how far any entry sits above its bin value (never positive).
    rep.max_excess = -std::numeric_limits<double>::infinity();
    for (std::size_t mu = 0; mu < count; ++mu) {
        const PhasePoint in = G.lattice.point(mu);
        for (std::size_t lam = 0; lam < count; ++lam) {
            const PhasePoint outp = G.lattice.point(lam);
            const double u1 = outp.eta[0] - phase.grad_x(outp.x[0], in.eta[0]);
            const double u2 = in.x[0] - phase.grad_eta(outp.x[0], in.eta[0]);
            const double mag = std::abs(G.entries(static_cast<Eigen::Index>(mu), static_cast<Eigen::Index>(lam)));
            rep.max_excess = std::max(rep.max_excess, mag - bins.at(key_of(u1, u2)));
        }
    }
    if (count == 0)
        rep.max_excess = 0.0;
    return rep;
}

} // namespace gaborfio
