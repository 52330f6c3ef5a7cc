#pragma once

// Finite periodic signal model and the time-frequency shifts acting on it.
//
// A signal lives on Z_n^d.  Sample j stands for the continuum point
// x_j = j*h with h = 1/sqrt(n) and j wrapped to (-n/2, n/2], so time and
// frequency both span sqrt(n).  A continuum shift x (or frequency eta) is
// representable when x/h is an integer; shifts are then exact permutations
// and modulations by n-th roots of unity.

#include "gaborfio/error.hpp"

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace gaborfio {

using cplx = std::complex<double>;
using cvec = Eigen::VectorXcd;
using cmat = Eigen::MatrixXcd;

inline constexpr double two_pi = 6.283185307179586476925286766559;

struct Grid {
    int n = 0;
    int d = 1;

    Grid() = default;
    /// Throws Error(invalid_argument) unless n >= 8 and d is 1 or 2.
    Grid(int points_per_axis, int dimension);

    double h() const;
    /// Number of samples, n^d.
    std::size_t size() const;
    /// Number of phase-space grid points, n^(2d).
    std::size_t phase_space_size() const { return size() * size(); }
    /// Continuum width of either the time or the frequency torus, sqrt(n).
    double span() const;

    /// Index wrapped to the symmetric range (-n/2, n/2].
    long symmetric(long j) const;
    /// Index reduced to [0, n).
    long modulo(long j) const;
    /// Continuum coordinate of an integer index.
    double coord(long j) const { return static_cast<double>(symmetric(j)) * h(); }
    /// Wraps a continuum coordinate to (-span/2, span/2].
    double wrap(double x) const;

    /// Flat sample index of a per-axis index (axis 0 is the slowest).
    std::size_t flat(std::span<const long> idx) const;
    /// Per-axis raw indices [0, n) of a flat sample index.
    std::array<long, 2> unflat(std::size_t flat_index) const;

    friend bool operator==(const Grid&, const Grid&) = default;
};

/// Per-axis continuum vector; components beyond d are zero.
using Coord = std::array<double, 2>;

/// A point z = (x, eta) of phase space, continuum units.
struct PhasePoint {
    Coord x{};
    Coord eta{};

    friend PhasePoint operator+(const PhasePoint& a, const PhasePoint& b);
    friend PhasePoint operator-(const PhasePoint& a, const PhasePoint& b);
    friend bool operator==(const PhasePoint&, const PhasePoint&) = default;
};

/// Euclidean norm over the first d components of x and eta.
double norm(const PhasePoint& z, int d = 1);
/// Japanese bracket (1 + |z|^2)^(1/2).
double bracket(const PhasePoint& z, int d = 1);
/// Componentwise wrap onto the phase-space torus.
PhasePoint wrap(const PhasePoint& z, const Grid& grid);

/// A grid-representable phase point in integer grid units. Values are kept
/// in the symmetric range by the helpers that produce them.
struct TfIndex {
    std::array<long, 2> k{};
    std::array<long, 2> m{};

    friend bool operator==(const TfIndex&, const TfIndex&) = default;
};

TfIndex wrap(const TfIndex& idx, const Grid& grid);
TfIndex add(const TfIndex& a, const TfIndex& b, const Grid& grid);
TfIndex negate(const TfIndex& a, const Grid& grid);
PhasePoint to_point(const TfIndex& idx, const Grid& grid);
/// Throws Error(not_grid_representable) with the nearest representable value.
TfIndex to_index(const PhasePoint& z, const Grid& grid);
/// Nearest grid point, wrapped; never throws.
TfIndex round_to_grid(const PhasePoint& z, const Grid& grid);
/// Flat index of the phase-space cell, in [0, n^(2d)).
std::size_t phase_cell(const TfIndex& idx, const Grid& grid);

struct Signal {
    Grid grid;
    cvec values;

    Signal() = default;
    explicit Signal(const Grid& g);
    /// Throws Error(invalid_argument) if values.size() != n^d.
    Signal(const Grid& g, cvec v);

    double norm() const;
    std::span<const cplx> span() const { return {values.data(), static_cast<std::size_t>(values.size())}; }
    std::span<cplx> span() { return {values.data(), static_cast<std::size_t>(values.size())}; }

    static Signal impulse(const Grid& g, std::size_t flat_index);
    static Signal random(const Grid& g, std::uint64_t seed);
};

/// <f, g> = sum_j f_j conj(g_j).
cplx inner(const Signal& f, const Signal& g);

/// e^{2 pi i r / n} for r in [0, n), cached per n.
const std::vector<cplx>& roots_of_unity(int n);

// ---- time-frequency shifts -------------------------------------------------

Signal translate(const Signal& f, const Coord& x);
Signal modulate(const Signal& f, const Coord& eta);
/// pi(lambda) f = M_eta T_x f.
Signal tf_shift(const Signal& f, const PhasePoint& lambda);
/// pi(lambda)^{-1} f.
Signal tf_shift_inverse(const Signal& f, const PhasePoint& lambda);

Signal translate(const Signal& f, const std::array<long, 2>& k);
Signal modulate(const Signal& f, const std::array<long, 2>& m);
Signal tf_shift(const Signal& f, const TfIndex& lambda);
/// Writes pi(lambda) f into out without allocating; out.size() == f.size().
void tf_shift_into(std::span<const cplx> f, const Grid& grid, const TfIndex& lambda, std::span<cplx> out);

/// e^{2 pi i x.eta}; the factor in M_eta T_x = e^{2 pi i x.eta} T_x M_eta.
cplx commutation_phase(const Coord& x, const Coord& eta, int d = 1);
/// Exact torus version for grid indices: e^{2 pi i k.m / n}.
cplx commutation_phase(const std::array<long, 2>& k, const std::array<long, 2>& m, const Grid& grid);

// ---- Fourier transform and STFT ----------------------------------------------

/// Unitary DFT over all d axes; output index m stands for eta_m = symmetric(m)*h.
Signal dft(const Signal& f);
Signal idft(const Signal& f);

/// V(x_j, eta_m) = <f, pi(x_j, eta_m) g>, rows indexed by flat time index,
/// columns by flat frequency index (both raw order).
struct StftTable {
    Grid grid;
    cmat values;
};

/// Throws Error(invalid_argument) if g is zero or the grids differ.
StftTable stft(const Signal& f, const Signal& g);

// ---- weights ---------------------------------------------------------------

/// Weight functions on phase space.
struct Weight {
    enum class Kind { polynomial, subexponential, table };

    Kind kind = Kind::polynomial;
    double s = 0.0;       // polynomial: (1 + |z|^2)^{s/2}
    double a = 0.0;       // subexponential: exp(a |z|^b)
    double b = 0.0;
    std::shared_ptr<const std::vector<double>> values;  // table: per phase cell
    Grid table_grid;

    static Weight polynomial(double s);
    static Weight subexponential(double a, double b);
    /// Throws Error(invalid_argument) unless values are positive and sized n^(2d).
    static Weight table(const Grid& grid, std::vector<double> values);

    bool is_polynomial() const { return kind == Kind::polynomial; }
};

double weight_eval(const Weight& w, const PhasePoint& z, int d = 1);

} // namespace gaborfio
