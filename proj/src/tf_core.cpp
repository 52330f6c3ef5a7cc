#include "gaborfio/tf_core.hpp"
#include "gaborfio/kernels.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <map>
#include <mutex>
#include <random>
#include <sstream>

namespace gaborfio {

// ---- Grid ------------------------------------------------------------------

Grid::Grid(int points_per_axis, int dimension)
    : n(points_per_axis), d(dimension)
{
    if (n < 8)
        throw Error(ErrorKind::invalid_argument, "grid needs at least 8 points per axis, got " + std::to_string(n));
    if (d != 1 && d != 2)
        throw Error(ErrorKind::invalid_argument, "grid dimension must be 1 or 2, got " + std::to_string(d));
}

double Grid::h() const { return 1.0 / std::sqrt(static_cast<double>(n)); }

std::size_t Grid::size() const { return d == 1 ? static_cast<std::size_t>(n) : static_cast<std::size_t>(n) * n; }

double Grid::span() const { return std::sqrt(static_cast<double>(n)); }

long Grid::modulo(long j) const
{
    const long r = j % n;
    return r < 0 ? r + n : r;
}

long Grid::symmetric(long j) const
{
    const long r = modulo(j);
    return r > n / 2 ? r - n : r;
}

double Grid::wrap(double x) const
{
    const double L = span();
    return x - L * std::ceil((x - 0.5 * L) / L);
}

std::size_t Grid::flat(std::span<const long> idx) const
{
    if (d == 1)
        return static_cast<std::size_t>(modulo(idx[0]));
    return static_cast<std::size_t>(modulo(idx[0]) * n + modulo(idx[1]));
}

std::array<long, 2> Grid::unflat(std::size_t flat_index) const
{
    const long f = static_cast<long>(flat_index);
    if (d == 1)
        return {f, 0};
    return {f / n, f % n};
}

// ---- phase points ------------------------------------------------------------

PhasePoint operator+(const PhasePoint& a, const PhasePoint& b)
{
    return {{a.x[0] + b.x[0], a.x[1] + b.x[1]}, {a.eta[0] + b.eta[0], a.eta[1] + b.eta[1]}};
}

PhasePoint operator-(const PhasePoint& a, const PhasePoint& b)
{
    return {{a.x[0] - b.x[0], a.x[1] - b.x[1]}, {a.eta[0] - b.eta[0], a.eta[1] - b.eta[1]}};
}

double norm(const PhasePoint& z, int d)
{
    double s = 0.0;
    for (int a = 0; a < d; ++a)
        s += z.x[a] * z.x[a] + z.eta[a] * z.eta[a];
    return std::sqrt(s);
}

double bracket(const PhasePoint& z, int d)
{
    const double r = norm(z, d);
    return std::sqrt(1.0 + r * r);
}

PhasePoint wrap(const PhasePoint& z, const Grid& grid)
{
    PhasePoint out;
    for (int a = 0; a < grid.d; ++a) {
        out.x[a] = grid.wrap(z.x[a]);
        out.eta[a] = grid.wrap(z.eta[a]);
    }
    return out;
}

TfIndex wrap(const TfIndex& idx, const Grid& grid)
{
    TfIndex out;
    for (int a = 0; a < grid.d; ++a) {
        out.k[a] = grid.symmetric(idx.k[a]);
        out.m[a] = grid.symmetric(idx.m[a]);
    }
    return out;
}

TfIndex add(const TfIndex& a, const TfIndex& b, const Grid& grid)
{
    return wrap(TfIndex{{a.k[0] + b.k[0], a.k[1] + b.k[1]}, {a.m[0] + b.m[0], a.m[1] + b.m[1]}}, grid);
}

TfIndex negate(const TfIndex& a, const Grid& grid)
{
    return wrap(TfIndex{{-a.k[0], -a.k[1]}, {-a.m[0], -a.m[1]}}, grid);
}

PhasePoint to_point(const TfIndex& idx, const Grid& grid)
{
    PhasePoint z;
    for (int a = 0; a < grid.d; ++a) {
        z.x[a] = grid.coord(idx.k[a]);
        z.eta[a] = grid.coord(idx.m[a]);
    }
    return z;
}

namespace {

long representable_index(double value, const Grid& grid, const char* what)
{
    const double q = value / grid.h();
    const double r = std::round(q);
    if (std::abs(q - r) > 1e-9 * std::max(1.0, std::abs(q))) {
        std::ostringstream msg;
        msg.precision(17);
        msg << what << " = " << value << " is not a multiple of the grid step h = " << grid.h()
            << " (off by " << std::abs(q - r) << " steps); nearest representable value is " << r * grid.h();
        throw Error(ErrorKind::not_grid_representable, msg.str());
    }
    return static_cast<long>(r);
}

} // namespace

TfIndex to_index(const PhasePoint& z, const Grid& grid)
{
    TfIndex idx;
    for (int a = 0; a < grid.d; ++a) {
        idx.k[a] = representable_index(z.x[a], grid, "time shift");
        idx.m[a] = representable_index(z.eta[a], grid, "frequency shift");
    }
    return wrap(idx, grid);
}

TfIndex round_to_grid(const PhasePoint& z, const Grid& grid)
{
    TfIndex idx;
    for (int a = 0; a < grid.d; ++a) {
        idx.k[a] = std::lround(z.x[a] / grid.h());
        idx.m[a] = std::lround(z.eta[a] / grid.h());
    }
    return wrap(idx, grid);
}

std::size_t phase_cell(const TfIndex& idx, const Grid& grid)
{
    std::size_t cell = 0;
    const auto n = static_cast<std::size_t>(grid.n);
    for (int a = 0; a < grid.d; ++a)
        cell = cell * n + static_cast<std::size_t>(grid.modulo(idx.k[a]));
    for (int a = 0; a < grid.d; ++a)
        cell = cell * n + static_cast<std::size_t>(grid.modulo(idx.m[a]));
    return cell;
}

// ---- signals -----------------------------------------------------------------

Signal::Signal(const Grid& g)
    : grid(g), values(cvec::Zero(static_cast<Eigen::Index>(g.size())))
{
}

Signal::Signal(const Grid& g, cvec v)
    : grid(g), values(std::move(v))
{
    if (static_cast<std::size_t>(values.size()) != grid.size())
        throw Error(ErrorKind::invalid_argument, "signal length " + std::to_string(values.size())
                                                     + " does not match grid size " + std::to_string(grid.size()));
}

double Signal::norm() const { return std::sqrt(kernels::norm_sq(span())); }

Signal Signal::impulse(const Grid& g, std::size_t flat_index)
{
    Signal s(g);
    s.values(static_cast<Eigen::Index>(flat_index)) = 1.0;
    return s;
}

Signal Signal::random(const Grid& g, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Signal s(g);
    for (auto& v : s.values)
        v = {normal(rng), normal(rng)};
    return s;
}

cplx inner(const Signal& f, const Signal& g)
{
    if (f.grid != g.grid)
        throw Error(ErrorKind::invalid_argument, "inner product of signals on different grids");
    return kernels::dot_conj(f.span(), g.span());
}

const std::vector<cplx>& roots_of_unity(int n)
{
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<const std::vector<cplx>>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[n];
    if (!slot) {
        auto table = std::make_unique<std::vector<cplx>>(static_cast<std::size_t>(n));
        for (int r = 0; r < n; ++r)
            (*table)[static_cast<std::size_t>(r)] = std::polar(1.0, two_pi * r / n);
        slot = std::move(table);
    }
    return *slot;
}

// ---- shifts ----------------------------------------------------------------

void tf_shift_into(std::span<const cplx> f, const Grid& grid, const TfIndex& lambda, std::span<cplx> out)
{
    const auto& roots = roots_of_unity(grid.n);
    const long n = grid.n;
    if (grid.d == 1) {
        const long k = grid.modulo(lambda.k[0]);
        const long m = grid.modulo(lambda.m[0]);
        long src = n - k;  // (j - k) mod n at j = 0
        long phase = 0;    // m*j mod n
        for (long j = 0; j < n; ++j) {
            if (src == n)
                src = 0;
            out[static_cast<std::size_t>(j)] = roots[static_cast<std::size_t>(phase)] * f[static_cast<std::size_t>(src)];
            ++src;
            phase += m;
            if (phase >= n)
                phase -= n;
        }
        return;
    }
    const long k0 = grid.modulo(lambda.k[0]), k1 = grid.modulo(lambda.k[1]);
    const long m0 = grid.modulo(lambda.m[0]), m1 = grid.modulo(lambda.m[1]);
    for (long j0 = 0; j0 < n; ++j0) {
        const long s0 = grid.modulo(j0 - k0);
        for (long j1 = 0; j1 < n; ++j1) {
            const long s1 = grid.modulo(j1 - k1);
            const long phase = (m0 * j0 + m1 * j1) % n;
            out[static_cast<std::size_t>(j0 * n + j1)] =
                roots[static_cast<std::size_t>(phase)] * f[static_cast<std::size_t>(s0 * n + s1)];
        }
    }
}

Signal tf_shift(const Signal& f, const TfIndex& lambda)
{
    Signal out(f.grid);
    tf_shift_into(f.span(), f.grid, lambda, out.span());
    return out;
}

Signal translate(const Signal& f, const std::array<long, 2>& k)
{
    return tf_shift(f, TfIndex{k, {0, 0}});
}

Signal modulate(const Signal& f, const std::array<long, 2>& m)
{
    return tf_shift(f, TfIndex{{0, 0}, m});
}

Signal translate(const Signal& f, const Coord& x)
{
    return translate(f, to_index(PhasePoint{x, {}}, f.grid).k);
}

Signal modulate(const Signal& f, const Coord& eta)
{
    return modulate(f, to_index(PhasePoint{{}, eta}, f.grid).m);
}

Signal tf_shift(const Signal& f, const PhasePoint& lambda)
{
    return tf_shift(f, to_index(lambda, f.grid));
}

Signal tf_shift_inverse(const Signal& f, const PhasePoint& lambda)
{
    const TfIndex idx = to_index(lambda, f.grid);
    const Signal demodulated = modulate(f, std::array<long, 2>{-idx.m[0], -idx.m[1]});
    return translate(demodulated, std::array<long, 2>{-idx.k[0], -idx.k[1]});
}

cplx commutation_phase(const Coord& x, const Coord& eta, int d)
{
    double dot = 0.0;
    for (int a = 0; a < d; ++a)
        dot += x[a] * eta[a];
    return std::polar(1.0, two_pi * dot);
}

cplx commutation_phase(const std::array<long, 2>& k, const std::array<long, 2>& m, const Grid& grid)
{
    long acc = 0;
    for (int a = 0; a < grid.d; ++a)
        acc += grid.modulo(k[a]) * grid.modulo(m[a]);
    return roots_of_unity(grid.n)[static_cast<std::size_t>(acc % grid.n)];
}

// ---- DFT / STFT --------------------------------------------------------------

namespace {

// Unnormalized transform along every axis; forward uses e^{-2 pi i jm/n}.
void fft_all_axes(cvec& data, const Grid& grid, bool inverse)
{
    Eigen::FFT<double> fft;
    fft.SetFlag(Eigen::FFT<double>::Unscaled);
    const auto n = static_cast<std::size_t>(grid.n);
    std::vector<cplx> in(n), out(n);
    const std::size_t lines = grid.size() / n;
    for (int axis = 0; axis < grid.d; ++axis) {
        // axis 0 of a 2-d grid has stride n; the last axis is contiguous.
        const std::size_t stride = (grid.d == 2 && axis == 0) ? n : 1;
        for (std::size_t line = 0; line < lines; ++line) {
            const std::size_t base = stride == 1 ? line * n : line;
            for (std::size_t i = 0; i < n; ++i)
                in[i] = data(static_cast<Eigen::Index>(base + i * stride));
            if (inverse)
                fft.inv(out, in);
            else
                fft.fwd(out, in);
            for (std::size_t i = 0; i < n; ++i)
                data(static_cast<Eigen::Index>(base + i * stride)) = out[i];
        }
    }
}

} // namespace

Signal dft(const Signal& f)
{
    Signal out = f;
    fft_all_axes(out.values, f.grid, false);
    out.values /= std::sqrt(static_cast<double>(f.grid.size()));
    return out;
}

Signal idft(const Signal& f)
{
    Signal out = f;
    fft_all_axes(out.values, f.grid, true);
    out.values /= std::sqrt(static_cast<double>(f.grid.size()));
    return out;
}

StftTable stft(const Signal& f, const Signal& g)
{
    if (f.grid != g.grid)
        throw Error(ErrorKind::invalid_argument, "stft: signal and window live on different grids");
    if (g.norm() == 0.0)
        throw Error(ErrorKind::invalid_argument, "stft: window must be nonzero");

    const Grid& grid = f.grid;
    const auto N = static_cast<Eigen::Index>(grid.size());
    StftTable table{grid, cmat(N, N)};
    cvec shifted(N), product(N);
    for (Eigen::Index jx = 0; jx < N; ++jx) {
        const auto k = grid.unflat(static_cast<std::size_t>(jx));
        tf_shift_into(g.span(), grid, TfIndex{k, {0, 0}}, {shifted.data(), static_cast<std::size_t>(N)});
        kernels::multiply_conj(f.span(), {shifted.data(), static_cast<std::size_t>(N)},
                               {product.data(), static_cast<std::size_t>(N)});
        fft_all_axes(product, grid, false);
        table.values.row(jx) = product.transpose();
    }
    return table;
}

// ---- weights -----------------------------------------------------------------

Weight Weight::polynomial(double s)
{
    if (!(s >= 0.0))
        throw Error(ErrorKind::invalid_argument, "polynomial weight exponent must be >= 0");
    Weight w;
    w.kind = Kind::polynomial;
    w.s = s;
    return w;
}

Weight Weight::subexponential(double a, double b)
{
    if (!(a > 0.0) || !(b > 0.0 && b < 1.0))
        throw Error(ErrorKind::invalid_argument, "subexponential weight needs a > 0 and 0 < b < 1");
    Weight w;
    w.kind = Kind::subexponential;
    w.a = a;
    w.b = b;
    return w;
}

Weight Weight::table(const Grid& grid, std::vector<double> values)
{
    if (values.size() != grid.phase_space_size())
        throw Error(ErrorKind::invalid_argument, "weight table must have one entry per phase-space grid point");
    for (double v : values)
        if (!(v > 0.0))
            throw Error(ErrorKind::invalid_argument, "weight table entries must be strictly positive");
    Weight w;
    w.kind = Kind::table;
    w.table_grid = grid;
    w.values = std::make_shared<const std::vector<double>>(std::move(values));
    return w;
}

double weight_eval(const Weight& w, const PhasePoint& z, int d)
{
    switch (w.kind) {
    case Weight::Kind::polynomial: {
        const double r = norm(z, d);
        return std::pow(1.0 + r * r, 0.5 * w.s);
    }
    case Weight::Kind::subexponential:
        return std::exp(w.a * std::pow(norm(z, d), w.b));
    case Weight::Kind::table:
        return (*w.values)[phase_cell(round_to_grid(z, w.table_grid), w.table_grid)];
    }
    return 1.0;
}

} // namespace gaborfio
