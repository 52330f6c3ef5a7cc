#pragma once

// Modified Gabor multipliers  M_a f = sum_lambda a_lambda <f, pi(lambda) g> pi(chi'(lambda)) g,
// the symbol sequences a_nu that make T = sum_nu pi(nu) M_{a_nu} exact, and
// truncations of that sum.

#include "gaborfio/diagnostics.hpp"
#include "gaborfio/fio.hpp"

namespace gaborfio {

/// Torus indices chi'(lambda) for every lattice point, in lattice order.
std::vector<TfIndex> warp_table(const CanonicalMap& cmap, const Lattice& lattice);
/// chi' = identity.
std::vector<TfIndex> identity_warp(const Lattice& lattice);

class GaborMultiplier {
public:
    /// Throws Error(invalid_argument) if sizes disagree or a warp value is not a lattice point.
    GaborMultiplier(cvec symbol, const GaborFrameSpec& spec, std::vector<TfIndex> warp);

    const cvec& symbol() const { return symbol_; }
    const GaborFrameSpec& spec() const { return *spec_; }
    const std::vector<TfIndex>& warp() const { return warp_; }

private:
    cvec symbol_;
    const GaborFrameSpec* spec_;
    std::vector<TfIndex> warp_;
};

Signal apply_multiplier(const GaborMultiplier& M, const Signal& f);
/// Dense matrix of M_a; column k = apply_multiplier(M, e_k).
cmat multiplier_matrix(const GaborMultiplier& M);

struct MultiplierNormReport {
    double p = 2.0;
    /// sup over probes of |M f|_{M^p_m} / |f|_{M^p_{(m o chi') / m~}}
    double empirical_norm = 0.0;
    /// |a|_{l^inf_{m~}}
    double symbol_norm = 0.0;
    /// empirical_norm / symbol_norm; bounded when the multiplier is.
    double ratio = 0.0;
    int probes = 0;
};

/// Probe estimate of the multiplier norm. `m_tilde` weights the symbol;
/// pass Weight::polynomial(0) for the unweighted case.
MultiplierNormReport multiplier_norm_check(const GaborMultiplier& M, double p, const Weight& m,
                                           const Weight& m_tilde, int probes = 200, std::uint64_t seed = 0);

struct MultiplierSymbolTable {
    Lattice lattice;
    double nu_radius = 0.0;
    /// Lattice points nu with |nu| <= nu_radius (torus norm), sorted by |nu|.
    std::vector<TfIndex> nu_set;
    std::vector<double> nu_norms;
    /// chi'(mu) per lattice point.
    std::vector<TfIndex> warp;
    /// a(i, j) = a_{nu_i}(mu_j)
    cmat a;
    /// c(i, j) = c_{nu_i, mu_j}, unit modulus
    cmat c;
};

/// c_{nu, mu} with pi(chi'(mu) + nu) = c pi(nu) pi(chi'(mu)) on the torus.
cplx symbol_phase(const TfIndex& nu, const TfIndex& warped_mu, const Grid& grid);

/// a_nu(mu) = c_{nu,mu} <T pi(mu) g, pi(chi'(mu) + nu) g> for |nu| <= nu_radius.
MultiplierSymbolTable extract_symbols(const FioOperator& T, const GaborFrameSpec& spec, const CanonicalMap& cmap,
                                      double nu_radius);
/// Same from a precomputed Gabor matrix and warp table.
MultiplierSymbolTable extract_symbols(const GaborMatrix& G, std::vector<TfIndex> warp, double nu_radius);

/// Smallest radius that includes every lattice point.
double full_nu_radius(const Lattice& lattice);

/// Matrix of sum_{|nu| <= L} pi(nu) M_{a_nu}. Throws Error(extraction_radius)
/// when L exceeds the table's nu_radius.
cmat assemble_truncated(const MultiplierSymbolTable& table, const GaborFrameSpec& spec, double L);
/// Term-by-term reference: one multiplier_matrix per nu, shifted and summed.
cmat assemble_truncated_reference(const MultiplierSymbolTable& table, const GaborFrameSpec& spec, double L);

struct TruncationPoint {
    double L = 0.0;
    double error = 0.0;
    NormEstimate estimate;
};

struct TruncationCurve {
    std::vector<TruncationPoint> points;
    /// Fit over the L values whose truncation is still a proper subset of the
    /// lattice (the rest reconstruct T to round-off).
    LineFit fit;
    bool fit_valid = false;
    std::size_t fit_points = 0;
    /// Error at the full radius, always computed.
    double full_residual = 0.0;
};

/// |T - T_L| for each L. p = 2 with m = 1 uses the largest singular value,
/// anything else a probe supremum of gabor_mod_norm ratios. Throws
/// Error(invalid_argument) when L_list has fewer than 3 entries.
TruncationCurve truncation_error_curve(const cmat& T, const MultiplierSymbolTable& table, const GaborFrameSpec& spec,
                                       std::span<const double> L_list, double p, const Weight& m,
                                       const NormOptions& options = {});

// ---- dilation example ----------------------------------------------------------------

/// Closed form of a_{(alpha k', beta l')}(alpha k, beta l) for D_s f(x) = f(s x),
/// the lattice alpha Z x beta Z and the unnormalised window e^{-pi t^2}.
cplx dilation_symbol_closed_form(double s, double alpha, double beta, long k, long l, long kp, long lp);

} // namespace gaborfio
