#include "gaborfio/lattice.hpp"
#include "gaborfio/kernels.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

namespace gaborfio {

// ---- Lattice ---------------------------------------------------------------------

Eigen::MatrixXd Lattice::generator_continuum() const { return generator_ * grid_.h(); }

double Lattice::generator_norm() const
{
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(generator_continuum());
    return svd.singularValues()(0);
}

double Lattice::redundancy() const
{
    return static_cast<double>(points_.size()) / static_cast<double>(grid_.size());
}

std::optional<std::size_t> Lattice::find(const TfIndex& idx) const
{
    const int at = lookup_[phase_cell(idx, grid_)];
    if (at < 0)
        return std::nullopt;
    return static_cast<std::size_t>(at);
}

namespace {

long nearest_divisor(long value, long n)
{
    long best = 1;
    for (long q = 1; q <= n; ++q)
        if (n % q == 0 && std::abs(q - value) < std::abs(best - value))
            best = q;
    return best;
}

std::string matrix_text(const Eigen::MatrixXd& m)
{
    std::ostringstream out;
    out << "[";
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        out << (r ? ", [" : "[");
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            out << (c ? ", " : "") << m(r, c);
        out << "]";
    }
    out << "]";
    return out.str();
}

Eigen::MatrixXd commensurate_suggestion(const Eigen::MatrixXd& a, long n)
{
    Eigen::MatrixXd s = a.array().round().matrix();
    for (Eigen::Index i = 0; i < s.rows(); ++i)
        s(i, i) = static_cast<double>(nearest_divisor(std::max(1L, std::lround(std::abs(s(i, i)))), n));
    return s;
}

} // namespace

Lattice enumerate_lattice(const Eigen::MatrixXd& generator, const Grid& grid)
{
    const Eigen::Index dim = 2 * grid.d;
    if (generator.rows() != dim || generator.cols() != dim)
        throw Error(ErrorKind::invalid_argument, "lattice generator must be " + std::to_string(dim) + "x"
                                                     + std::to_string(dim));

    const Eigen::MatrixXd rounded = generator.array().round().matrix();
    const double off_grid = (generator - rounded).cwiseAbs().maxCoeff();
    if (off_grid > 1e-9)
        throw Error(ErrorKind::incommensurate_lattice,
                    "lattice generator entries must be whole grid steps (max deviation " + std::to_string(off_grid)
                        + "); nearest commensurate generator: "
                        + matrix_text(commensurate_suggestion(generator, grid.n)));

    const double det = rounded.determinant();
    if (std::abs(det) < 0.5)
        throw Error(ErrorKind::invalid_argument, "lattice generator is singular");

    const Eigen::MatrixXd periods = static_cast<double>(grid.n) * rounded.inverse();
    const double non_periodic = (periods - periods.array().round().matrix()).cwiseAbs().maxCoeff();
    if (non_periodic > 1e-9)
        throw Error(ErrorKind::incommensurate_lattice,
                    "lattice " + matrix_text(rounded) + " does not tile the torus of " + std::to_string(grid.n)
                        + " points per axis (n*A^-1 not integral); nearest commensurate generator: "
                        + matrix_text(commensurate_suggestion(rounded, grid.n)));

    Lattice lat;
    lat.grid_ = grid;
    lat.generator_ = rounded;
    lat.lookup_.assign(grid.phase_space_size(), -1);

    std::vector<TfIndex> steps;
    for (Eigen::Index c = 0; c < dim; ++c) {
        TfIndex step;
        for (int a = 0; a < grid.d; ++a) {
            step.k[a] = std::lround(rounded(a, c));
            step.m[a] = std::lround(rounded(grid.d + a, c));
        }
        steps.push_back(wrap(step, grid));
    }

    // Closure of the generated subgroup of Z_n^{2d}.
    std::vector<char> seen(grid.phase_space_size(), 0);
    std::deque<TfIndex> frontier{TfIndex{}};
    seen[phase_cell(TfIndex{}, grid)] = 1;
    while (!frontier.empty()) {
        const TfIndex p = frontier.front();
        frontier.pop_front();
        lat.points_.push_back(p);
        for (const TfIndex& s : steps) {
            const TfIndex q = add(p, s, grid);
            auto& flag = seen[phase_cell(q, grid)];
            if (!flag) {
                flag = 1;
                frontier.push_back(q);
            }
        }
    }

    std::sort(lat.points_.begin(), lat.points_.end(), [](const TfIndex& a, const TfIndex& b) {
        return std::tie(a.k[0], a.k[1], a.m[0], a.m[1]) < std::tie(b.k[0], b.k[1], b.m[0], b.m[1]);
    });
    for (std::size_t i = 0; i < lat.points_.size(); ++i)
        lat.lookup_[phase_cell(lat.points_[i], grid)] = static_cast<int>(i);
    return lat;
}

Lattice separable_lattice(const Grid& grid, long a, long b)
{
    Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(2, 2);
    gen(0, 0) = static_cast<double>(a);
    gen(1, 1) = static_cast<double>(b);
    return enumerate_lattice(gen, grid);
}

// ---- windows ---------------------------------------------------------------------

namespace {

template <class Profile>
Signal tensor_window(const Grid& grid, Profile profile)
{
    std::vector<double> axis(static_cast<std::size_t>(grid.n));
    for (long j = 0; j < grid.n; ++j)
        axis[static_cast<std::size_t>(j)] = profile(grid.coord(j));
    Signal g(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto idx = grid.unflat(i);
        double v = axis[static_cast<std::size_t>(idx[0])];
        if (grid.d == 2)
            v *= axis[static_cast<std::size_t>(idx[1])];
        g.values(static_cast<Eigen::Index>(i)) = v;
    }
    return g;
}

double bspline(int order, double x)
{
    // Centered cardinal B-spline via the truncated-power formula.
    double sum = 0.0;
    double binom = 1.0;
    double fact = 1.0;
    for (int k = 1; k < order; ++k)
        fact *= k;
    for (int k = 0; k <= order; ++k) {
        const double t = x + 0.5 * order - k;
        if (t > 0.0)
            sum += ((k % 2) ? -1.0 : 1.0) * binom * std::pow(t, order - 1);
        binom = binom * (order - k) / (k + 1);
    }
    return std::max(0.0, sum / fact);
}

} // namespace

Signal gaussian_window(const Grid& grid, double width)
{
    if (!(width > 0.0))
        throw Error(ErrorKind::invalid_argument, "gaussian width must be positive");
    const double L = grid.span();
    return tensor_window(grid, [&](double t) {
        // periodized on the torus
        double v = 0.0;
        for (int r = -2; r <= 2; ++r) {
            const double u = (t + r * L) / width;
            v += std::exp(-M_PI * u * u);
        }
        return v;
    });
}

Signal box_window(const Grid& grid, double half_support)
{
    if (!(half_support > 0.0))
        throw Error(ErrorKind::invalid_argument, "box half-support must be positive");
    const double tol = 1e-12 * grid.span();
    return tensor_window(grid, [&](double t) { return std::abs(t) <= half_support + tol ? 1.0 : 0.0; });
}

Signal bspline_window(const Grid& grid, int order, double width)
{
    if (order < 1 || !(width > 0.0))
        throw Error(ErrorKind::invalid_argument, "bspline needs order >= 1 and positive width");
    return tensor_window(grid, [&](double t) { return bspline(order, t / width); });
}

Signal normalized(const Signal& g)
{
    const double nrm = g.norm();
    if (nrm == 0.0)
        throw Error(ErrorKind::invalid_argument, "cannot normalize a zero window");
    return Signal(g.grid, g.values / nrm);
}

// ---- frames ----------------------------------------------------------------------

cmat build_atoms(const Signal& g, std::span<const TfIndex> points)
{
    const auto N = static_cast<Eigen::Index>(g.grid.size());
    cmat atoms(N, static_cast<Eigen::Index>(points.size()));
    for (std::size_t i = 0; i < points.size(); ++i)
        tf_shift_into(g.span(), g.grid, points[i],
                      {atoms.col(static_cast<Eigen::Index>(i)).data(), static_cast<std::size_t>(N)});
    return atoms;
}

GaborFrameSpec::GaborFrameSpec(Signal window, Lattice lattice)
    : window_(std::move(window)), lattice_(std::move(lattice))
{
    if (window_.grid != lattice_.grid())
        throw Error(ErrorKind::invalid_argument, "window and lattice live on different grids");
    if (window_.norm() == 0.0)
        throw Error(ErrorKind::invalid_argument, "frame window must be nonzero");
    atoms_ = build_atoms(window_, lattice_.points());
}

cmat frame_operator(const GaborFrameSpec& spec)
{
    const cmat& atoms = spec.atoms();
    cmat S = atoms * atoms.adjoint();
    // exact Hermitian symmetry
    S = 0.5 * (S + S.adjoint()).eval();
    return S;
}

FrameBounds frame_bounds_of(const cmat& frame_op)
{
    Eigen::SelfAdjointEigenSolver<cmat> eig(frame_op, Eigen::EigenvaluesOnly);
    const auto& ev = eig.eigenvalues();
    FrameBounds b;
    b.lower = std::max(0.0, ev(0));
    b.upper = ev(ev.size() - 1);
    b.is_frame = b.upper > 0.0 && b.lower >= not_a_frame_ratio * b.upper;
    return b;
}

FrameBounds frame_bounds(const GaborFrameSpec& spec) { return frame_bounds_of(frame_operator(spec)); }

namespace {

// g mapped through S^{power} using the Hermitian eigendecomposition of S.
Signal apply_frame_power(const GaborFrameSpec& spec, double power, const char* what)
{
    Eigen::SelfAdjointEigenSolver<cmat> eig(frame_operator(spec));
    const auto& ev = eig.eigenvalues();
    const double lower = ev(0), upper = ev(ev.size() - 1);
    if (!(lower > 1e-10) || lower < not_a_frame_ratio * upper) {
        std::ostringstream msg;
        msg << what << ": not a frame (lower bound " << lower << ", upper bound " << upper << ")";
        throw Error(ErrorKind::not_a_frame, msg.str());
    }
    const cmat& V = eig.eigenvectors();
    const Eigen::VectorXd scale = ev.array().pow(power).matrix();
    cvec coeff = V.adjoint() * spec.window().values;
    coeff.array() *= scale.array().cast<cplx>();
    return Signal(spec.grid(), V * coeff);
}

} // namespace

Signal canonical_tight_window(const GaborFrameSpec& spec)
{
    return apply_frame_power(spec, -0.5, "canonical_tight_window");
}

Signal dual_window(const GaborFrameSpec& spec) { return apply_frame_power(spec, -1.0, "dual_window"); }

cvec analysis(const Signal& f, const GaborFrameSpec& spec)
{
    if (f.grid != spec.grid())
        throw Error(ErrorKind::invalid_argument, "analysis: signal grid differs from frame grid");
    const cmat& atoms = spec.atoms();
    const auto N = static_cast<std::size_t>(atoms.rows());
    cvec c(atoms.cols());
    for (Eigen::Index i = 0; i < atoms.cols(); ++i)
        c(i) = kernels::dot_conj(f.span(), {atoms.col(i).data(), N});
    return c;
}

Signal synthesis(const cvec& coefficients, const GaborFrameSpec& spec)
{
    const cmat& atoms = spec.atoms();
    if (coefficients.size() != atoms.cols())
        throw Error(ErrorKind::invalid_argument, "synthesis: expected " + std::to_string(atoms.cols())
                                                     + " coefficients, got " + std::to_string(coefficients.size()));
    const auto N = static_cast<std::size_t>(atoms.rows());
    Signal out(spec.grid());
    for (Eigen::Index i = 0; i < atoms.cols(); ++i)
        kernels::axpy(coefficients(i), {atoms.col(i).data(), N}, out.span());
    return out;
}

double gabor_mod_norm(const cvec& coefficients, double p, std::span<const double> weights)
{
    if (static_cast<std::size_t>(coefficients.size()) != weights.size())
        throw Error(ErrorKind::invalid_argument, "gabor_mod_norm: weight count differs from coefficient count");
    if (!(p >= 1.0))
        throw Error(ErrorKind::invalid_argument, "gabor_mod_norm: p must lie in [1, inf]");
    if (std::isinf(p)) {
        double sup = 0.0;
        for (Eigen::Index i = 0; i < coefficients.size(); ++i)
            sup = std::max(sup, std::abs(coefficients(i)) * weights[static_cast<std::size_t>(i)]);
        return sup;
    }
    // scale by the sup to keep |c|^p in range
    double sup = 0.0;
    for (Eigen::Index i = 0; i < coefficients.size(); ++i)
        sup = std::max(sup, std::abs(coefficients(i)) * weights[static_cast<std::size_t>(i)]);
    if (sup == 0.0)
        return 0.0;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < coefficients.size(); ++i)
        acc += std::pow(std::abs(coefficients(i)) * weights[static_cast<std::size_t>(i)] / sup, p);
    return sup * std::pow(acc, 1.0 / p);
}

double gabor_mod_norm(const Signal& f, double p, const Weight& m, const GaborFrameSpec& spec)
{
    const Lattice& lat = spec.lattice();
    std::vector<double> w(lat.size());
    for (std::size_t i = 0; i < lat.size(); ++i)
        w[i] = weight_eval(m, lat.point(i), lat.grid().d);
    return gabor_mod_norm(analysis(f, spec), p, w);
}

// ---- warped lattices -------------------------------------------------------------

namespace {

WarpedFrameReport warped_impl(const Signal& g, const Lattice& lattice,
                              const std::function<std::vector<PhasePoint>(const PhasePoint&)>& chi, bool dedupe)
{
    const Grid& grid = lattice.grid();
    WarpedFrameReport report;
    report.warped_points.reserve(lattice.size());
    std::set<std::array<long, 4>> seen;
    for (std::size_t i = 0; i < lattice.size(); ++i) {
        for (const PhasePoint& image : chi(lattice.point(i))) {
            const TfIndex rounded = wrap(round_to_grid(image, grid), grid);
            const double shift = norm(wrap(image - to_point(rounded, grid), grid), grid.d);
            report.max_rounding_displacement = std::max(report.max_rounding_displacement, shift);
            if (dedupe && !seen.insert({rounded.k[0], rounded.k[1], rounded.m[0], rounded.m[1]}).second)
                continue;
            report.warped_points.push_back(rounded);
        }
    }
    const cmat atoms = build_atoms(g, report.warped_points);
    cmat S = atoms * atoms.adjoint();
    S = 0.5 * (S + S.adjoint()).eval();
    report.bounds = frame_bounds_of(S);
    return report;
}

} // namespace

WarpedFrameReport warped_frame_check(const Signal& g, const Lattice& lattice, const PhaseMap& chi)
{
    return warped_impl(g, lattice, [&](const PhasePoint& z) { return std::vector<PhasePoint>{chi(z)}; }, false);
}

WarpedFrameReport warped_frame_check(const Signal& g, const Lattice& lattice, const PhaseBranchMap& chi)
{
    return warped_impl(g, lattice, chi, true);
}

} // namespace gaborfio
