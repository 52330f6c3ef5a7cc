#pragma once

// Tame phase functions Phi(x, eta) (d = 1) and the canonical transformation
// they generate:  y = d_eta Phi(x, eta),  xi = d_x Phi(x, eta),  with
// chi(y, eta) = (x, xi).

#include "gaborfio/lattice.hpp"

#include <functional>
#include <string>

namespace gaborfio {

struct TamePhase {
    using Scalar2 = std::function<double(double x, double eta)>;

    std::string name;
    Scalar2 value;
    Scalar2 grad_x;
    Scalar2 grad_eta;
    Scalar2 mixed;  // d^2 Phi / dx deta
    /// Lower bound claimed for |det d^2_{x,eta} Phi|.
    double declared_delta = 1.0;
    /// Bound claimed for derivatives of order 2 and 3.
    double declared_deriv_bound = 0.0;
};

/// x * eta
TamePhase linear_phase();
/// s * x * eta, the dilation f(x) -> f(s x).
TamePhase dilation_phase(double s);
/// x * eta + (c/2) eta^2
TamePhase chirp_phase(double c);
/// x * eta + eps * sin(x) * sin(eta), |eps| < 1
TamePhase perturbed_phase(double eps);

struct PhaseBox {
    double x_min = -1.0, x_max = 1.0;
    double eta_min = -1.0, eta_max = 1.0;
};

struct TamenessReport {
    double min_abs_det = 0.0;
    double max_second_derivative = 0.0;
    double max_third_derivative = 0.0;
    /// Largest relative mismatch of the analytic gradients against central differences.
    double max_gradient_error = 0.0;
    bool det_ok = false;
    bool derivs_ok = false;
    bool gradients_ok = false;
    bool pass() const { return det_ok && derivs_ok && gradients_ok; }
};

/// Evaluates the tameness conditions on a samples x samples grid over the box.
TamenessReport tameness_audit(const TamePhase& phase, const PhaseBox& box, int samples);

class CanonicalMap {
public:
    explicit CanonicalMap(TamePhase phase, double newton_tol = 1e-12, int max_iter = 50);

    const TamePhase& phase() const { return phase_; }
    double newton_tol() const { return newton_tol_; }
    int max_iter() const { return max_iter_; }
    /// Sampled Lipschitz constant of chi and chi^{-1} (the larger of the two).
    double lipschitz_estimate() const { return lipschitz_; }

    /// chi(y, eta). Throws NewtonDivergence.
    PhasePoint operator()(const PhasePoint& z) const;
    /// chi^{-1}(x, xi). Throws NewtonDivergence.
    PhasePoint inverse(const PhasePoint& z) const;

private:
    TamePhase phase_;
    double newton_tol_;
    int max_iter_;
    double lipschitz_ = 0.0;
};

PhasePoint canonical_map(const CanonicalMap& cm, const PhasePoint& z);
PhasePoint canonical_map_inverse(const CanonicalMap& cm, const PhasePoint& z);

struct SymplecticReport {
    /// max over samples of ||Dchi^T J Dchi - J||_max
    double max_deviation = 0.0;
    int samples = 0;
};

/// Central-difference Jacobians (step 1e-4) at samples x samples points of the box.
SymplecticReport symplectic_audit(const CanonicalMap& cm, const PhaseBox& box, int samples, double step = 1e-4);

/// A floor(A^{-1} z) for a continuum generator A.
PhasePoint lattice_floor(const Eigen::Matrix2d& generator, const PhasePoint& z);

struct ChiPrime {
    /// chi'(lambda) as a lattice point on the torus.
    TfIndex index;
    /// Unwrapped continuum chi(lambda) and chi'(lambda).
    PhasePoint chi;
    PhasePoint chi_prime;
};

/// chi'(lambda) = A floor(A^{-1} chi(lambda)), lambda given by its torus index.
ChiPrime chi_prime(const CanonicalMap& cm, const Lattice& lattice, const TfIndex& lambda);
/// chi' for every lattice point, in lattice order.
std::vector<ChiPrime> chi_prime_table(const CanonicalMap& cm, const Lattice& lattice);
/// Largest number of lattice points mapped to one lattice point by chi'.
std::size_t chi_prime_max_multiplicity(const std::vector<ChiPrime>& table, const Lattice& lattice);

struct TransportRatio {
    double ratio_min = 0.0;
    double ratio_max = 0.0;
    /// False for weights that are not polynomial; ratios are then left at 0.
    bool supported = false;
};

/// Range of v(chi(z)) / v(z) over a samples x samples grid of the box.
TransportRatio weight_transport_audit(const CanonicalMap& cm, const Weight& w, const PhaseBox& box, int samples);

/// Range of (1 + |chi(z)|) / (1 + |z|) over the box; K = max(ratio_max, 1/ratio_min).
TransportRatio growth_equivalence_audit(const CanonicalMap& cm, const PhaseBox& box, int samples);

/// Images of z under the torus canonical relation: chi(y + kL, eta) for
/// |k| <= 3, L the torus span, wrapped and deduplicated. A dilation by s is
/// s-to-1 on the torus and has s branches; the other built-in phases have one.
std::vector<PhasePoint> torus_images(const CanonicalMap& cm, const PhasePoint& z, const Grid& grid);

/// Box covering the whole phase-space torus of a grid.
PhaseBox torus_box(const Grid& grid);

} // namespace gaborfio
