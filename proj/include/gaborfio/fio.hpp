#pragma once

// Fourier integral operators  Tf(x) = int e^{2 pi i Phi(x,eta)} sigma(x,eta) fhat(eta) deta
// on the periodic grid (d = 1), their Gabor matrices, and decay measurements.

#include "gaborfio/diagnostics.hpp"
#include "gaborfio/lattice.hpp"
#include "gaborfio/phase_flow.hpp"

#include <cstdint>
#include <string>

namespace gaborfio {

/// Declared smoothness class of a symbol. Only used for expected-slope
/// bookkeeping; never changes a computation.
struct SmoothnessTag {
    enum class Kind { constant, bandlimited, weighted, custom };
    Kind kind = Kind::constant;
    /// bandlimited: N (symbol modelled as W^inf_{2N}); weighted: s.
    double parameter = 0.0;

    /// Off-diagonal decay exponent the class promises: 2N, s, or 0.
    double decay_claim() const;
    std::string label() const;
};

/// sigma(x_j, eta_m), rows = raw time index j, columns = raw frequency index m.
struct SymbolTable {
    Grid grid;
    cmat values;
    SmoothnessTag tag;
};

SymbolTable constant_symbol(const Grid& grid, cplx value = 1.0);

/// 1 + sum_{w != 0} c amplitude(|w|) e^{i theta_w} e^{2 pi i (w_x x + w_eta eta)}
/// over the dual grid of the n x n symbol grid, |w| in continuum units,
/// theta_w seeded uniform phases, c chosen so that sigma - 1 has unit rms.
/// One 2-d inverse FFT.
SymbolTable spectral_symbol(const Grid& grid, const std::function<double(double)>& amplitude, std::uint64_t seed,
                            SmoothnessTag tag);

/// Band limit (in DFT index units of the n x n symbol grid) used for the
/// W^inf_{2N} surrogate: n / (4N).
double bandlimit_index(int n, int N);

/// Flat spectrum on 0 < |w| <= B, B = bandlimit_index(n, N) in index units,
/// through spectral_symbol. N enters only through the band limit.
SymbolTable bandlimited_symbol(const Grid& grid, int N, std::uint64_t seed = 0);

/// Same construction without a band limit and with amplitudes <w>^{-s}:
/// the surrogate for sigma in M^inf_{1 (x) v_s}.
SymbolTable weighted_symbol(const Grid& grid, double s, std::uint64_t seed = 0);

class FioOperator {
public:
    /// Throws Error(invalid_argument) if the grid is not 1-d or the symbol grid differs.
    FioOperator(const Grid& grid, TamePhase phase, SymbolTable symbol);

    const Grid& grid() const { return grid_; }
    const TamePhase& phase() const { return phase_; }
    const SymbolTable& symbol() const { return symbol_; }
    /// K(j, m) = e^{2 pi i Phi(x_j, eta_m)} sigma(x_j, eta_m) h.
    const cmat& kernel() const { return kernel_; }

private:
    Grid grid_;
    TamePhase phase_;
    SymbolTable symbol_;
    cmat kernel_;
};

/// Riemann sum Tf(x_j) = sum_m K(j, m) fhat(eta_m). Throws on grid mismatch.
Signal apply_fio(const FioOperator& T, const Signal& f);

inline constexpr std::size_t max_dense_size = 1024;

/// Dense matrix with column k = apply_fio(T, e_k). Throws Error(size_guard) above 1024.
cmat fio_matrix(const FioOperator& T);

struct GaborMatrix {
    Lattice lattice;
    Signal window;
    /// G(mu, lambda) = <T pi(mu) g, pi(lambda) g>, rows mu, columns lambda.
    cmat entries;
    bool parseval = true;
    std::string warning;
};

/// Gabor matrix of T. A non-Parseval spec is flagged in `warning` and the
/// computation proceeds.
GaborMatrix gabor_matrix(const FioOperator& T, const GaborFrameSpec& spec);
/// Same for an operator already given as a dense matrix.
GaborMatrix gabor_matrix(const cmat& op, const GaborFrameSpec& spec);

/// log-width of the distance bins used by decay_envelope_fit.
inline constexpr double decay_bin_width = 0.025;

/// Entries below this fraction of max |G| are round-off and carry no decay information.
inline constexpr double decay_noise_floor = 1e-12;

struct DecayBin {
    double r = 0.0;
    double max_abs = 0.0;
    /// Inside the fit window: max_abs over this bin and every farther bin of
    /// the window, the quantity a bound C r^{-s} constrains. Outside: max_abs.
    double envelope = 0.0;
    bool in_fit = false;
};

/// Per-bin maxima of |G| against r = <chi(mu) - lambda>, torus metric on the
/// unwrapped chi, bins of width decay_bin_width in log r, sorted by r. The fit
/// window is r in [2, r_max / 2]; bins at the noise floor are left out.
std::vector<DecayBin> decay_profile(const GaborMatrix& G, const CanonicalMap& cmap);

/// Least-squares fit of log envelope against log r over the fit window.
/// Throws Error(insufficient_range) when fewer than 4 bins are usable.
DecayReport decay_envelope_fit(const GaborMatrix& G, const CanonicalMap& cmap, double s_claim,
                               double tolerance = 0.75);

struct TransportAudit {
    /// Torus distance from chi(mu) (nearest branch) to the nearest argmax of row mu.
    std::vector<double> row_distance;
    double max_distance = 0.0;
    double fraction_within = 0.0;
    double bound = 0.0;
};

/// Checks that every row of |G| peaks within `bound` of chi(mu). Entries within
/// a relative 1e-9 of the row maximum all count as argmax.
TransportAudit transport_audit(const GaborMatrix& G, const CanonicalMap& cmap, double bound);

struct EnvelopeReport {
    struct Bin {
        long u1 = 0;  // frequency displacement, in bin_width units
        long u2 = 0;  // time displacement, in bin_width units
        double envelope = 0.0;
    };
    std::vector<Bin> bins;
    double bin_width = 0.0;
    /// sum_u H_emp(u) m(u)
    double l1_mass = 0.0;
    /// max over pairs of |G| - H_emp(u(pair)); <= 0 by construction.
    double max_excess = 0.0;
};

/// Empirical envelope over u = (eta' - d_x Phi(x', eta), x - d_eta Phi(x', eta)),
/// mu = (x, eta) the input point and lambda = (x', eta') the output point.
EnvelopeReport envelope_function_audit(const GaborMatrix& G, const TamePhase& phase, const Weight& m,
                                       double bin_width = 0.5);

} // namespace gaborfio
