#include "gaborfio/phase_flow.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>

namespace gaborfio {

// ---- built-in phases ---------------------------------------------------------------

TamePhase linear_phase()
{
    TamePhase p;
    p.name = "linear";
    p.value = [](double x, double eta) { return x * eta; };
    p.grad_x = [](double, double eta) { return eta; };
    p.grad_eta = [](double x, double) { return x; };
    p.mixed = [](double, double) { return 1.0; };
    p.declared_delta = 1.0;
    p.declared_deriv_bound = 1.0;
    return p;
}

TamePhase dilation_phase(double s)
{
    if (!(s > 0.0))
        throw Error(ErrorKind::invalid_argument, "dilation factor must be positive");
    TamePhase p;
    p.name = "dilation";
    p.value = [s](double x, double eta) { return s * x * eta; };
    p.grad_x = [s](double, double eta) { return s * eta; };
    p.grad_eta = [s](double x, double) { return s * x; };
    p.mixed = [s](double, double) { return s; };
    p.declared_delta = s;
    p.declared_deriv_bound = s;
    return p;
}

TamePhase chirp_phase(double c)
{
    TamePhase p;
    p.name = "chirp";
    p.value = [c](double x, double eta) { return x * eta + 0.5 * c * eta * eta; };
    p.grad_x = [](double, double eta) { return eta; };
    p.grad_eta = [c](double x, double eta) { return x + c * eta; };
    p.mixed = [](double, double) { return 1.0; };
    p.declared_delta = 1.0;
    p.declared_deriv_bound = std::max(1.0, std::abs(c));
    return p;
}

TamePhase perturbed_phase(double eps)
{
    if (!(std::abs(eps) < 1.0))
        throw Error(ErrorKind::invalid_argument, "perturbation strength must satisfy |eps| < 1");
    TamePhase p;
    p.name = "perturbed";
    p.value = [eps](double x, double eta) { return x * eta + eps * std::sin(x) * std::sin(eta); };
    p.grad_x = [eps](double x, double eta) { return eta + eps * std::cos(x) * std::sin(eta); };
    p.grad_eta = [eps](double x, double eta) { return x + eps * std::sin(x) * std::cos(eta); };
    p.mixed = [eps](double x, double eta) { return 1.0 + eps * std::cos(x) * std::cos(eta); };
    p.declared_delta = 1.0 - std::abs(eps);
    p.declared_deriv_bound = 1.0 + std::abs(eps);
    return p;
}

// ---- tameness audit ----------------------------------------------------------------

namespace {

template <class Body>
void for_each_sample(const PhaseBox& box, int samples, Body body)
{
    const int count = std::max(samples, 2);
    for (int i = 0; i < count; ++i) {
        const double x = box.x_min + (box.x_max - box.x_min) * i / (count - 1);
        for (int j = 0; j < count; ++j) {
            const double eta = box.eta_min + (box.eta_max - box.eta_min) * j / (count - 1);
            body(x, eta);
        }
    }
}

} // namespace

TamenessReport tameness_audit(const TamePhase& phase, const PhaseBox& box, int samples)
{
    TamenessReport r;
    r.min_abs_det = std::numeric_limits<double>::infinity();
    constexpr double fd_grad = 1e-5;
    constexpr double fd_hess = 1e-3;

    for_each_sample(box, samples, [&](double x, double eta) {
        r.min_abs_det = std::min(r.min_abs_det, std::abs(phase.mixed(x, eta)));

        const double gx_fd = (phase.value(x + fd_grad, eta) - phase.value(x - fd_grad, eta)) / (2 * fd_grad);
        const double ge_fd = (phase.value(x, eta + fd_grad) - phase.value(x, eta - fd_grad)) / (2 * fd_grad);
        const double gx = phase.grad_x(x, eta), ge = phase.grad_eta(x, eta);
        r.max_gradient_error = std::max(r.max_gradient_error, std::abs(gx - gx_fd) / std::max(1.0, std::abs(gx)));
        r.max_gradient_error = std::max(r.max_gradient_error, std::abs(ge - ge_fd) / std::max(1.0, std::abs(ge)));

        // second derivatives from the analytic gradients
        const double gx_p = phase.grad_x(x + fd_hess, eta), gx_m = phase.grad_x(x - fd_hess, eta);
        const double ge_p = phase.grad_eta(x, eta + fd_hess), ge_m = phase.grad_eta(x, eta - fd_hess);
        const double gx_ep = phase.grad_x(x, eta + fd_hess), gx_em = phase.grad_x(x, eta - fd_hess);
        const double ge_xp = phase.grad_eta(x + fd_hess, eta), ge_xm = phase.grad_eta(x - fd_hess, eta);
        const double pxx = (gx_p - gx_m) / (2 * fd_hess);
        const double pee = (ge_p - ge_m) / (2 * fd_hess);
        const double pxe = (gx_ep - gx_em) / (2 * fd_hess);
        r.max_second_derivative = std::max({r.max_second_derivative, std::abs(pxx), std::abs(pee), std::abs(pxe)});

        // third derivatives as second differences of the gradients
        const double h2 = fd_hess * fd_hess;
        const double pxxx = (gx_p - 2 * gx + gx_m) / h2;
        const double peee = (ge_p - 2 * ge + ge_m) / h2;
        const double pxee = (gx_ep - 2 * gx + gx_em) / h2;
        const double pxxe = (ge_xp - 2 * ge + ge_xm) / h2;
        r.max_third_derivative = std::max(
            {r.max_third_derivative, std::abs(pxxx), std::abs(peee), std::abs(pxee), std::abs(pxxe)});
    });

    r.det_ok = r.min_abs_det >= phase.declared_delta * (1.0 - 1e-12);
    const double slack = 1e-5;
    r.derivs_ok = r.max_second_derivative <= phase.declared_deriv_bound + slack
                  && r.max_third_derivative <= phase.declared_deriv_bound + slack;
    r.gradients_ok = r.max_gradient_error < 1e-6;
    return r;
}

// ---- canonical map -----------------------------------------------------------------

namespace {

// Solves F(u) = target for u by damped Newton, F' = derivative.
double newton_solve(const std::function<double(double)>& F, const std::function<double(double)>& dF, double target,
                    double seed, double tol, int max_iter, const char* what)
{
    const double scale = std::max(1.0, std::abs(target));
    double u = seed;
    double res = F(u) - target;
    std::vector<double> trace{std::abs(res)};
    // one undamped step past the stopping rule: convergence is quadratic, so
    // this takes the residual from tol to round-off
    auto polish = [&](double v, double r) {
        const double slope = dF(v);
        if (slope == 0.0 || !std::isfinite(slope))
            return v;
        const double w = v - r / slope;
        return std::abs(F(w) - target) <= std::abs(r) ? w : v;
    };
    for (int it = 0; it < max_iter; ++it) {
        if (std::abs(res) < tol * scale)
            return polish(u, res);
        const double slope = dF(u);
        if (slope == 0.0 || !std::isfinite(slope))
            break;
        double step = res / slope;
        double trial = u - step;
        double trial_res = F(trial) - target;
        for (int halvings = 0; halvings < 40 && !(std::abs(trial_res) < std::abs(res)); ++halvings) {
            step *= 0.5;
            trial = u - step;
            trial_res = F(trial) - target;
        }
        if (!(std::abs(trial_res) <= std::abs(res))) {
            trace.push_back(std::abs(trial_res));
            break;
        }
        u = trial;
        res = trial_res;
        trace.push_back(std::abs(res));
    }
    if (std::abs(res) < tol * scale)
        return polish(u, res);
    std::ostringstream msg;
    msg << what << ": Newton did not converge in " << max_iter << " iterations (final residual " << std::abs(res)
        << "); the phase may not be tame here";
    throw NewtonDivergence(msg.str(), std::move(trace));
}

} // namespace

CanonicalMap::CanonicalMap(TamePhase phase, double newton_tol, int max_iter)
    : phase_(std::move(phase)), newton_tol_(newton_tol), max_iter_(max_iter)
{
    // sampled Lipschitz constant on [-4, 4]^2 along unit-0.1 steps
    constexpr double step = 0.1;
    const PhaseBox box{-4.0, 4.0, -4.0, 4.0};
    try {
        for_each_sample(box, 9, [&](double x, double eta) {
            const PhasePoint z{{x, 0}, {eta, 0}};
            const PhasePoint fz = (*this)(z), gz = inverse(z);
            for (const PhasePoint dz : {PhasePoint{{step, 0}, {0, 0}}, PhasePoint{{0, 0}, {step, 0}}}) {
                lipschitz_ = std::max(lipschitz_, norm((*this)(z + dz) - fz) / step);
                lipschitz_ = std::max(lipschitz_, norm(inverse(z + dz) - gz) / step);
            }
        });
    } catch (const NewtonDivergence&) {
        lipschitz_ = std::numeric_limits<double>::infinity();
    }
}

PhasePoint CanonicalMap::operator()(const PhasePoint& z) const
{
    const double y = z.x[0], eta = z.eta[0];
    const double x = newton_solve([&](double u) { return phase_.grad_eta(u, eta); },
                                  [&](double u) { return phase_.mixed(u, eta); }, y, y, newton_tol_, max_iter_,
                                  "canonical_map");
    return PhasePoint{{x, 0}, {phase_.grad_x(x, eta), 0}};
}

PhasePoint CanonicalMap::inverse(const PhasePoint& z) const
{
    const double x = z.x[0], xi = z.eta[0];
    const double eta = newton_solve([&](double u) { return phase_.grad_x(x, u); },
                                    [&](double u) { return phase_.mixed(x, u); }, xi, xi, newton_tol_, max_iter_,
                                    "canonical_map_inverse");
    return PhasePoint{{phase_.grad_eta(x, eta), 0}, {eta, 0}};
}

PhasePoint canonical_map(const CanonicalMap& cm, const PhasePoint& z) { return cm(z); }

PhasePoint canonical_map_inverse(const CanonicalMap& cm, const PhasePoint& z) { return cm.inverse(z); }

SymplecticReport symplectic_audit(const CanonicalMap& cm, const PhaseBox& box, int samples, double step)
{
    SymplecticReport r;
    for_each_sample(box, samples, [&](double y, double eta) {
        const PhasePoint z{{y, 0}, {eta, 0}};
        const PhasePoint dy = cm(z + PhasePoint{{step, 0}, {}}) - cm(z - PhasePoint{{step, 0}, {}});
        const PhasePoint de = cm(z + PhasePoint{{}, {step, 0}}) - cm(z - PhasePoint{{}, {step, 0}});
        Eigen::Matrix2d D;
        D << dy.x[0], de.x[0], dy.eta[0], de.eta[0];
        D /= 2 * step;
        Eigen::Matrix2d J;
        J << 0, 1, -1, 0;
        const double dev = (D.transpose() * J * D - J).cwiseAbs().maxCoeff();
        r.max_deviation = std::max(r.max_deviation, dev);
        ++r.samples;
    });
    return r;
}

// ---- lattice rounding ---------------------------------------------------------------

namespace {
// floor that snaps values within 1e-9 of an integer onto it, so exact lattice
// images are not pushed one cell down by rounding noise
double snapped_floor(double v) { return std::floor(v + 1e-9); }
} // namespace

PhasePoint lattice_floor(const Eigen::Matrix2d& generator, const PhasePoint& z)
{
    const Eigen::Vector2d c = generator.inverse() * Eigen::Vector2d(z.x[0], z.eta[0]);
    const Eigen::Vector2d fl(snapped_floor(c(0)), snapped_floor(c(1)));
    const Eigen::Vector2d out = generator * fl;
    return PhasePoint{{out(0), 0}, {out(1), 0}};
}

ChiPrime chi_prime(const CanonicalMap& cm, const Lattice& lattice, const TfIndex& lambda)
{
    const Grid& grid = lattice.grid();
    if (grid.d != 1)
        throw Error(ErrorKind::invalid_argument, "chi_prime supports d = 1 only");
    ChiPrime out;
    out.chi = cm(to_point(lambda, grid));
    const Eigen::Matrix2d A = lattice.generator();
    const Eigen::Vector2d c = A.inverse() * Eigen::Vector2d(out.chi.x[0], out.chi.eta[0]) / grid.h();
    const Eigen::Vector2d fl(snapped_floor(c(0)), snapped_floor(c(1)));
    const Eigen::Vector2d steps = A * fl;
    const long k = std::lround(steps(0)), m = std::lround(steps(1));
    out.index = wrap(TfIndex{{k, 0}, {m, 0}}, grid);
    out.chi_prime = PhasePoint{{static_cast<double>(k) * grid.h(), 0}, {static_cast<double>(m) * grid.h(), 0}};
    return out;
}

std::vector<ChiPrime> chi_prime_table(const CanonicalMap& cm, const Lattice& lattice)
{
    std::vector<ChiPrime> table;
    table.reserve(lattice.size());
    for (const TfIndex& p : lattice.points())
        table.push_back(chi_prime(cm, lattice, p));
    return table;
}

std::size_t chi_prime_max_multiplicity(const std::vector<ChiPrime>& table, const Lattice& lattice)
{
    std::unordered_map<std::size_t, std::size_t> count;
    std::size_t best = 0;
    for (const ChiPrime& c : table)
        best = std::max(best, ++count[phase_cell(c.index, lattice.grid())]);
    return best;
}

TransportRatio weight_transport_audit(const CanonicalMap& cm, const Weight& w, const PhaseBox& box, int samples)
{
    TransportRatio r;
    if (!w.is_polynomial())
        return r;
    r.supported = true;
    r.ratio_min = std::numeric_limits<double>::infinity();
    for_each_sample(box, samples, [&](double x, double eta) {
        const PhasePoint z{{x, 0}, {eta, 0}};
        const double q = weight_eval(w, cm(z)) / weight_eval(w, z);
        r.ratio_min = std::min(r.ratio_min, q);
        r.ratio_max = std::max(r.ratio_max, q);
    });
    return r;
}

TransportRatio growth_equivalence_audit(const CanonicalMap& cm, const PhaseBox& box, int samples)
{
    TransportRatio r;
    r.supported = true;
    r.ratio_min = std::numeric_limits<double>::infinity();
    for_each_sample(box, samples, [&](double x, double eta) {
        const PhasePoint z{{x, 0}, {eta, 0}};
        const double q = (1.0 + norm(cm(z))) / (1.0 + norm(z));
        r.ratio_min = std::min(r.ratio_min, q);
        r.ratio_max = std::max(r.ratio_max, q);
    });
    return r;
}

std::vector<PhasePoint> torus_images(const CanonicalMap& cm, const PhasePoint& z, const Grid& grid)
{
    std::vector<PhasePoint> out;
    for (int k = -3; k <= 3; ++k) {
        PhasePoint shifted = z;
        shifted.x[0] += k * grid.span();
        const PhasePoint img = wrap(cm(shifted), grid);
        const bool seen = std::any_of(out.begin(), out.end(), [&](const PhasePoint& p) {
            return norm(wrap(p - img, grid), grid.d) < 1e-9;
        });
        if (!seen)
            out.push_back(img);
    }
    return out;
}

PhaseBox torus_box(const Grid& grid)
{
    const double half = 0.5 * grid.span();
    return PhaseBox{-half, half, -half, half};
}

} // namespace gaborfio
