#include "gaborfio/multiplier.hpp"
#include "invariants.hpp"

#include <doctest.h>

#include <random>

using namespace gaborfio;
using gaborfio::testing::tight_gaussian_spec;

namespace {

cvec random_symbol(std::size_t size, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    cvec a(static_cast<Eigen::Index>(size));
    for (auto& v : a)
        v = cplx(u(rng), u(rng));
    return a;
}

// c <D_s pi(mu) g, pi(chi'(mu) + nu) g> for g(t) = e^{-pi t^2}, by a fine Riemann sum on R
cplx dilation_symbol_quadrature(double s, double alpha, double beta, long k, long l, long kp, long lp)
{
    const double fk = std::floor(static_cast<double>(k) / s + 1e-9);
    const double fl = std::floor(s * static_cast<double>(l) + 1e-9);
    const double xl = alpha * (fk + static_cast<double>(kp));
    const double el = beta * (fl + static_cast<double>(lp));
    const double step = 1e-3;
    cplx sum = 0.0;
    for (double t = -12.0; t <= 12.0; t += step) {
        const double a = s * t - alpha * static_cast<double>(k);
        const double b = t - xl;
        sum += std::polar(std::exp(-M_PI * (a * a + b * b)), 2.0 * M_PI * (beta * l * s - el) * t);
    }
    const cplx c = std::polar(1.0, 2.0 * M_PI * alpha * static_cast<double>(kp) * beta * fl);
    return c * sum * step;
}

} // namespace

TEST_SUITE("multiplier")
{
    TEST_CASE("elementary multipliers")
    {
        const Grid g(32, 1);
        const GaborFrameSpec spec = tight_gaussian_spec(g);
        const std::size_t count = spec.lattice().size();
        const GaborMultiplier one(cvec::Ones(static_cast<Eigen::Index>(count)), spec, identity_warp(spec.lattice()));
        CHECK((multiplier_matrix(one) - cmat::Identity(32, 32)).cwiseAbs().maxCoeff() < 1e-10);

        const Signal f = Signal::random(g, 1);
        const GaborMultiplier zero(cvec::Zero(static_cast<Eigen::Index>(count)), spec, identity_warp(spec.lattice()));
        CHECK(apply_multiplier(zero, f).norm() == 0.0);

        // one nonzero coefficient: a rank-one operator onto the warped atom
        const CanonicalMap cm(dilation_phase(2.0));
        const std::vector<TfIndex> warp = warp_table(cm, spec.lattice());
        cvec a = cvec::Zero(static_cast<Eigen::Index>(count));
        const std::size_t mu0 = 5;
        a(static_cast<Eigen::Index>(mu0)) = cplx(0.5, -2.0);
        const GaborMultiplier r1(a, spec, warp);
        const Signal& w = spec.window();
        const Signal expect_atom = tf_shift(w, warp[mu0]);
        const cplx coeff = a(static_cast<Eigen::Index>(mu0)) * inner(f, tf_shift(w, spec.lattice().points()[mu0]));
        CHECK((apply_multiplier(r1, f).values - coeff * expect_atom.values).cwiseAbs().maxCoeff() < 1e-12);
        Eigen::JacobiSVD<cmat> svd(multiplier_matrix(r1));
        CHECK(svd.singularValues()(1) < 1e-12 * svd.singularValues()(0));

        // matrix columns are applications to basis vectors; linearity in the symbol
        const cvec b1 = random_symbol(count, 2), b2 = random_symbol(count, 3);
        const cmat m1 = multiplier_matrix(GaborMultiplier(b1, spec, warp));
        const cmat m2 = multiplier_matrix(GaborMultiplier(b2, spec, warp));
        const cmat m12 = multiplier_matrix(GaborMultiplier(b1 + b2, spec, warp));
        CHECK((m12 - m1 - m2).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((m1 * f.values - apply_multiplier(GaborMultiplier(b1, spec, warp), f).values).norm() < 1e-12);

        CHECK_THROWS_AS(GaborMultiplier(cvec::Ones(3), spec, warp), Error);
        std::vector<TfIndex> bad = warp;
        bad[0] = TfIndex{{1, 0}, {1, 0}};
        CHECK_THROWS_AS(GaborMultiplier(b1, spec, bad), Error);
    }

    TEST_CASE("multiplier norm check")
    {
        const Grid g(32, 1);
        const GaborFrameSpec spec = tight_gaussian_spec(g);
        const std::size_t count = spec.lattice().size();
        const Weight flat = Weight::polynomial(0);
        const GaborMultiplier one(cvec::Ones(static_cast<Eigen::Index>(count)), spec, identity_warp(spec.lattice()));
        const MultiplierNormReport r = multiplier_norm_check(one, 2.0, flat, flat, 50);
        CHECK(r.ratio <= 1.0 + 1e-8);
        CHECK(r.symbol_norm == doctest::Approx(1.0));

        const CanonicalMap cm(dilation_phase(2.0));
        const std::vector<TfIndex> warp = warp_table(cm, spec.lattice());
        const cvec a = random_symbol(count, 4);
        const MultiplierNormReport r1 = multiplier_norm_check(GaborMultiplier(a, spec, warp), 2.0, flat, flat, 50);
        const MultiplierNormReport r2 = multiplier_norm_check(GaborMultiplier(2.0 * a, spec, warp), 2.0, flat, flat, 50);
        CHECK(r2.empirical_norm == doctest::Approx(2.0 * r1.empirical_norm).epsilon(1e-10));
        CHECK(r2.ratio == doctest::Approx(r1.ratio).epsilon(1e-10));
    }

    TEST_CASE("multiplier norm ratio stays bounded across resolutions")
    {
        const Weight flat = Weight::polynomial(0);
        const double inf = std::numeric_limits<double>::infinity();
        for (double p : {1.0, 2.0, inf}) {
            double worst[2] = {};
            int i = 0;
            for (int n : {32, 64}) {
                const Grid g(n, 1);
                const GaborFrameSpec spec = tight_gaussian_spec(g);
                const std::vector<TfIndex> warp = warp_table(CanonicalMap(dilation_phase(2.0)), spec.lattice());
                for (std::uint64_t s = 0; s < 50; ++s) {
                    const GaborMultiplier M(random_symbol(spec.lattice().size(), 100 + s), spec, warp);
                    const MultiplierNormReport r = multiplier_norm_check(M, p, flat, flat, 10, s);
                    worst[i] = std::max(worst[i], r.ratio);
                }
                CHECK(std::isfinite(worst[i]));
                ++i;
            }
            INFO("p = " << p << ": " << worst[0] << " vs " << worst[1]);
            CHECK(worst[1] < 2.0 * worst[0]);
            CHECK(worst[0] < 2.0 * worst[1]);
        }
    }

    TEST_CASE("symbol extraction")
    {
        const Grid g(32, 1);
        const GaborFrameSpec spec = tight_gaussian_spec(g);
        const double full = full_nu_radius(spec.lattice());
        const CanonicalMap id(linear_phase());
        const FioOperator I(g, linear_phase(), constant_symbol(g));
        const MultiplierSymbolTable t = extract_symbols(I, spec, id, full);
        REQUIRE(t.nu_set.front() == TfIndex{});
        const double gn = spec.window().norm();
        CHECK((t.a.row(0).array() - cplx(gn * gn)).abs().maxCoeff() < 1e-12);
        CHECK(t.nu_set.size() == spec.lattice().size());
        CHECK(std::is_sorted(t.nu_norms.begin(), t.nu_norms.end()));
        CHECK((t.c.array().abs() - 1.0).abs().maxCoeff() < 1e-15);

        const MultiplierSymbolTable small = extract_symbols(I, spec, id, 1.0);
        for (double r : small.nu_norms)
            CHECK(r <= 1.0 + 1e-12);
        CHECK(small.nu_set.size() < t.nu_set.size());
    }

    TEST_CASE("c phases reproduce the shifted atoms")
    {
        const Grid g(64, 1);
        const GaborFrameSpec spec = tight_gaussian_spec(g);
        const Lattice& lat = spec.lattice();
        const Signal& w = spec.window();
        std::mt19937_64 rng(11);
        std::uniform_int_distribution<std::size_t> pick(0, lat.size() - 1);
        for (int i = 0; i < 100; ++i) {
            const TfIndex nu = lat.points()[pick(rng)];
            const TfIndex mu = lat.points()[pick(rng)];
            const Signal lhs = tf_shift(w, add(mu, nu, g));
            const Signal rhs = tf_shift(tf_shift(w, mu), nu);
            CHECK((lhs.values - symbol_phase(nu, mu, g) * rhs.values).cwiseAbs().maxCoeff() < 1e-12);
        }
    }

    TEST_CASE("truncated assembly")
    {
        const Grid g(32, 1);
        const GaborFrameSpec spec = tight_gaussian_spec(g);
        const double full = full_nu_radius(spec.lattice());
        for (const TamePhase& ph : {dilation_phase(2.0), perturbed_phase(0.25)}) {
            const CanonicalMap cm(ph);
            const FioOperator T(g, ph, bandlimited_symbol(g, 2, 0));
            const cmat M = fio_matrix(T);
            const MultiplierSymbolTable t = extract_symbols(T, spec, cm, full);
            CHECK((assemble_truncated(t, spec, full) - M).cwiseAbs().maxCoeff() < 1e-9);
            for (double L : {0.0, 1.0, 2.0})
                CHECK((assemble_truncated(t, spec, L) - assemble_truncated_reference(t, spec, L)).cwiseAbs().maxCoeff() <
                      1e-12);
            // L = 0 is the single multiplier M_{a_0}
            const GaborMultiplier a0(t.a.row(0).transpose(), spec, t.warp);
            CHECK((assemble_truncated(t, spec, 0.0) - multiplier_matrix(a0)).cwiseAbs().maxCoeff() < 1e-12);

            const MultiplierSymbolTable part = extract_symbols(T, spec, cm, 1.5);
            try {
                assemble_truncated(part, spec, 2.0);
                FAIL("expected an extraction radius error");
            } catch (const Error& e) {
                CHECK(e.kind() == ErrorKind::extraction_radius);
            }
        }
    }

    TEST_CASE("coefficient decay in |nu|")
    {
        const Grid g(64, 1);
        const GaborFrameSpec spec = tight_gaussian_spec(g);
        const double full = full_nu_radius(spec.lattice());
        for (const TamePhase& ph : {linear_phase(), dilation_phase(2.0)}) {
            const CanonicalMap cm(ph);
            for (int N : {1, 2, 3}) {
                const MultiplierSymbolTable t =
                    extract_symbols(FioOperator(g, ph, bandlimited_symbol(g, N, 0)), spec, cm, full);
                std::map<long, double> shell;  // sup_mu |a_nu(mu)| per |nu| (rounded)
                for (std::size_t i = 0; i < t.nu_set.size(); ++i) {
                    const long key = std::lround(t.nu_norms[i] * 1e6);
                    shell[key] = std::max(shell[key], t.a.row(static_cast<Eigen::Index>(i)).cwiseAbs().maxCoeff());
                }
                std::vector<std::pair<double, double>> pts;
                for (const auto& [key, v] : shell) {
                    const double r = static_cast<double>(key) * 1e-6;
                    if (r >= 1.0 && r <= full / 2.0 && v > 1e-12)
                        pts.emplace_back(std::sqrt(1.0 + r * r), v);
                }
                const LineFit fit = loglog_fit(pts);
                INFO(ph.name << " N = " << N << " slope " << fit.slope);
                CHECK(fit.slope <= -2.0 * N + 0.5);
            }
        }
    }

    TEST_CASE("truncation error curves")
    {
        const Grid g(64, 1);
        const GaborFrameSpec spec = tight_gaussian_spec(g);
        const double full = full_nu_radius(spec.lattice());
        const std::vector<double> Ls{1, 2, 4, 8, 16};
        const Weight flat = Weight::polynomial(0);
        struct Case {
            TamePhase phase;
            SymbolTable (*make)(const Grid&);
            double claim;
        };
        auto bl2 = [](const Grid& gr) { return bandlimited_symbol(gr, 2, 0); };
        auto w4 = [](const Grid& gr) { return weighted_symbol(gr, 4.0, 0); };
        auto w6 = [](const Grid& gr) { return weighted_symbol(gr, 6.0, 0); };
        // rates 2N - 2 and s - 2; the dilation only checks monotonicity (torus aliases sit
        // half a period away and are not reached by small radii)
        for (const TamePhase& ph : {linear_phase(), chirp_phase(1.0), dilation_phase(2.0)}) {
            const CanonicalMap cm(ph);
            for (const auto& [make, claim] : std::vector<std::pair<SymbolTable (*)(const Grid&), double>>{
                     {+bl2, 2.0}, {+w4, 2.0}, {+w6, 4.0}}) {
                const FioOperator T(g, ph, make(g));
                const MultiplierSymbolTable t = extract_symbols(T, spec, cm, full);
                const TruncationCurve c = truncation_error_curve(fio_matrix(T), t, spec, Ls, 2.0, flat);
                INFO(ph.name << " claim " << claim << " slope " << c.fit.slope);
                CHECK(c.full_residual < 1e-9);
                for (std::size_t i = 1; i < c.points.size(); ++i)
                    CHECK(c.points[i].error <= c.points[i - 1].error + 1e-10);
                REQUIRE(c.fit_valid);
                if (ph.name != "dilation")
                    CHECK(c.fit.slope <= -claim + 0.75);
            }
        }
        const FioOperator T(g, linear_phase(), constant_symbol(g));
        const MultiplierSymbolTable t = extract_symbols(T, spec, CanonicalMap(linear_phase()), full);
        const std::vector<double> two{1, 2};
        CHECK_THROWS_AS(truncation_error_curve(fio_matrix(T), t, spec, two, 2.0, flat), Error);
    }

    TEST_CASE("dilation closed form")
    {
        for (double s : {2.0, 3.0})
            for (long k = -3; k <= 3; ++k)
                for (long l = -2; l <= 2; ++l)
                    for (long kp = -1; kp <= 1; ++kp)
                        for (long lp = -1; lp <= 1; ++lp) {
                            const cplx cf = dilation_symbol_closed_form(s, 0.25, 0.25, k, l, kp, lp);
                            const cplx q = dilation_symbol_quadrature(s, 0.25, 0.25, k, l, kp, lp);
                            CHECK(std::abs(cf - q) < 1e-10);
                        }
        // s = 1: modulus e^{-pi (beta l')^2 / 2} e^{-pi (alpha k')^2 / 2} / sqrt 2
        for (long kp = -2; kp <= 2; ++kp)
            for (long lp = -2; lp <= 2; ++lp) {
                const double expect =
                    std::exp(-M_PI * (0.0625 * lp * lp + 0.0625 * kp * kp) / 2.0) / std::sqrt(2.0);
                CHECK(std::abs(dilation_symbol_closed_form(1.0, 0.25, 0.25, 3, -1, kp, lp)) ==
                      doctest::Approx(expect).epsilon(1e-12));
            }
        // k' = l' = 0 with s l and k / s integers: 1 / sqrt(s^2 + 1)
        CHECK(std::abs(dilation_symbol_closed_form(2.0, 0.25, 0.25, 4, 3, 0, 0)) ==
              doctest::Approx(1.0 / std::sqrt(5.0)));
        CHECK(std::abs(dilation_symbol_closed_form(3.0, 0.5, 0.5, -6, 1, 0, 0)) ==
              doctest::Approx(1.0 / std::sqrt(10.0)));
    }
}
