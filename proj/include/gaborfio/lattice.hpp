#pragma once

// Lattices on the phase-space torus and the Gabor frames they carry.

#include "gaborfio/tf_core.hpp"

#include <functional>
#include <optional>
#include <string>

namespace gaborfio {

/// Lambda = A Z^{2d} reduced onto the torus Z_n^{2d}.
///
/// The generator is kept in grid units: column c of A is a step of A(0,c)
/// samples in time and A(d,c) samples in frequency (d = 1).  For d = 2 the
/// rows are ordered (x0, x1, eta0, eta1).
class Lattice {
public:
    Lattice() = default;

    const Grid& grid() const { return grid_; }
    const Eigen::MatrixXd& generator() const { return generator_; }
    /// Generator in continuum units, h * A.
    Eigen::MatrixXd generator_continuum() const;
    /// Spectral norm of the continuum generator.
    double generator_norm() const;

    const std::vector<TfIndex>& points() const { return points_; }
    std::size_t size() const { return points_.size(); }
    PhasePoint point(std::size_t i) const { return to_point(points_[i], grid_); }
    /// Atoms per signal dimension, #points / n^d.
    double redundancy() const;

    /// Position of a torus point in points(), or nullopt if not in the lattice.
    std::optional<std::size_t> find(const TfIndex& idx) const;

    friend Lattice enumerate_lattice(const Eigen::MatrixXd& generator, const Grid& grid);

private:
    Grid grid_;
    Eigen::MatrixXd generator_;
    std::vector<TfIndex> points_;
    std::vector<int> lookup_;  // phase cell -> point index or -1
};

/// Enumerates A Z^{2d} on the torus. A must be an invertible integer matrix
/// (grid units) with n A^{-1} integral, so that the lattice is periodic with
/// the torus.  Violations throw Error(incommensurate_lattice) with the
/// nearest commensurate generator in the message.
Lattice enumerate_lattice(const Eigen::MatrixXd& generator, const Grid& grid);

/// Separable fast path: A = diag(a, b) in grid units (d = 1).
Lattice separable_lattice(const Grid& grid, long a, long b);

// ---- windows -----------------------------------------------------------------

/// g(t) = exp(-pi t^2 / width^2) (per axis, tensor product for d = 2).
Signal gaussian_window(const Grid& grid, double width = 1.0);
/// Indicator of |t| <= half_support per axis.
Signal box_window(const Grid& grid, double half_support);
/// Centered cardinal B-spline of the given order, scaled to unit knot spacing `width`.
Signal bspline_window(const Grid& grid, int order, double width);
/// Scales to unit l2 norm.
Signal normalized(const Signal& g);

// ---- frames --------------------------------------------------------------------

struct FrameBounds {
    double lower = 0.0;
    double upper = 0.0;
    /// False when lower < 1e-10 * upper.
    bool is_frame = false;
};

inline constexpr double not_a_frame_ratio = 1e-10;

class GaborFrameSpec {
public:
    GaborFrameSpec(Signal window, Lattice lattice);

    const Signal& window() const { return window_; }
    const Lattice& lattice() const { return lattice_; }
    const Grid& grid() const { return lattice_.grid(); }

    /// Columns pi(lambda_i) g, one per lattice point.
    const cmat& atoms() const { return atoms_; }

    std::optional<FrameBounds> frame_bounds;
    std::optional<Signal> tight_window;
    std::optional<Signal> dual_window;

private:
    Signal window_;
    Lattice lattice_;
    cmat atoms_;
};

/// Columns pi(p) g for the given torus points.
cmat build_atoms(const Signal& g, std::span<const TfIndex> points);

/// S = sum_lambda pi(lambda)g (pi(lambda)g)^*.
cmat frame_operator(const GaborFrameSpec& spec);
/// Extremal eigenvalues of the frame operator.
FrameBounds frame_bounds(const GaborFrameSpec& spec);
FrameBounds frame_bounds_of(const cmat& frame_op);

/// S^{-1/2} g. Throws Error(not_a_frame) when the lower bound is below
/// 1e-10 (absolute) or 1e-10 * upper.
Signal canonical_tight_window(const GaborFrameSpec& spec);
/// S^{-1} g, same precondition.
Signal dual_window(const GaborFrameSpec& spec);

/// c_lambda = <f, pi(lambda) g>.
cvec analysis(const Signal& f, const GaborFrameSpec& spec);
/// sum_lambda c_lambda pi(lambda) g. Throws Error(invalid_argument) on length mismatch.
Signal synthesis(const cvec& coefficients, const GaborFrameSpec& spec);

/// (sum |c_lambda|^p m(lambda)^p)^{1/p}, or the weighted sup for p = inf.
double gabor_mod_norm(const Signal& f, double p, const Weight& m, const GaborFrameSpec& spec);
/// Same with the weight already sampled on the lattice points.
double gabor_mod_norm(const cvec& coefficients, double p, std::span<const double> weights);

// ---- warped lattices -------------------------------------------------------------

using PhaseMap = std::function<PhasePoint(const PhasePoint&)>;

struct WarpedFrameReport {
    FrameBounds bounds;
    /// Largest distance between chi(lambda) and its grid rounding.
    double max_rounding_displacement = 0.0;
    std::vector<TfIndex> warped_points;
};

/// Frame bounds of {pi(round(chi(lambda))) g : lambda in Lambda}; the warped
/// set is a multiset, coincident images contribute separately.
WarpedFrameReport warped_frame_check(const Signal& g, const Lattice& lattice, const PhaseMap& chi);

/// A map that may have several images on the torus (e.g. a dilation, which
/// is many-to-one there).
using PhaseBranchMap = std::function<std::vector<PhasePoint>(const PhasePoint&)>;

/// Same check on the union of all images of all lattice points, duplicates
/// after rounding removed: the torus trace of chi applied to the periodized lattice.
WarpedFrameReport warped_frame_check(const Signal& g, const Lattice& lattice, const PhaseBranchMap& chi);

} // namespace gaborfio
