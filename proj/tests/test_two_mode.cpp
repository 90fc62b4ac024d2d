#include <doctest.h>

#include <cmath>
#include <random>

#include "bosrec/lindblad.hpp"
#include "bosrec/numerics.hpp"
#include "bosrec/states.hpp"
#include "bosrec/two_mode.hpp"
#include "oracles.hpp"

using namespace bosrec;

namespace {

const double kPi = std::acos(-1.0);

ModelParams make_params(double w1, double w2, double k1, double k2, double g) {
    return ModelParams{w1, w2, k1, k2, Complex(g, 0.0)};
}

double max_deviation(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("lambdas examples") {
    {
        const LambdaPair lp = lambdas(make_params(1.0, 1.0, 0.0, 0.0, 0.7));
        CHECK(lp.plus == Complex(0.0, 1.0));
        CHECK(lp.minus == Complex(0.0, 0.0));
    }
    {
        const LambdaPair lp = lambdas(make_params(1.0, 3.0, 0.4, 0.0, 0.1));
        CHECK(lp.plus.real() == doctest::Approx(0.1));
        CHECK(lp.plus.imag() == doctest::Approx(2.0));
        CHECK(lp.minus.real() == doctest::Approx(0.1));
        CHECK(lp.minus.imag() == doctest::Approx(-1.0));
    }
    {
        // kappa1 - kappa2 = 4g with zero detuning puts lambda- on the
        // exceptional point lambda- = g
        const double g = 0.15;
        const LambdaPair lp = lambdas(make_params(2.0, 2.0, 4.0 * g + 0.1, 0.1, g));
        CHECK(lp.minus.real() == doctest::Approx(g).epsilon(1e-14));
        CHECK(lp.minus.imag() == 0.0);
    }
}

TEST_CASE("params validation") {
    CHECK_THROWS_AS(lambdas(make_params(-1.0, 1.0, 0.0, 0.0, 0.0)), std::invalid_argument);
    CHECK_THROWS_AS(lambdas(make_params(1.0, 1.0, -0.1, 0.0, 0.0)), std::invalid_argument);
    ModelParams complex_g{1.0, 1.0, 0.0, 0.0, Complex(0.1, 0.2)};
    CHECK_THROWS_AS(envelopes(complex_g, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(envelopes(make_params(1, 1, 0, 0, 0.5), -1.0), std::invalid_argument);
}

TEST_CASE("envelopes at t = 0 are exactly (1, 0)") {
    for (auto p : {make_params(1, 1, 0, 0, 0.3), make_params(5, 3, 0.4, 0.7, 0.9)}) {
        const Envelopes env = envelopes(p, 0.0);
        CHECK(env.f1 == Complex(1.0, 0.0));
        CHECK(env.f2 == Complex(0.0, 0.0));
    }
}

TEST_CASE("resonant lossless envelopes are rotating sines") {
    const double w = 2.5, g = 0.4;
    const ModelParams p = make_params(w, w, 0.0, 0.0, g);
    for (double t : {0.3, 1.0, 4.7, 9.2}) {
        const Envelopes env = envelopes(p, t);
        const Complex rot = std::exp(Complex(0.0, -w * t));
        CHECK(std::abs(env.f1 - rot * std::cos(g * t)) <= 1e-13);
        CHECK(std::abs(env.f2 - Complex(0.0, -1.0) * rot * std::sin(g * t)) <= 1e-13);
    }
    // quarter swap period: f1 = 0 and |f2| = 1
    const Envelopes sw = envelopes(p, kPi / (2.0 * g));
    CHECK(std::abs(sw.f1) <= 1e-14);
    CHECK(std::abs(std::abs(sw.f2) - 1.0) <= 1e-14);
}

TEST_CASE("decoupled envelopes reduce to single-mode decay") {
    const ModelParams p = make_params(2.0, 0.7, 0.3, 0.8, 0.0);
    for (double t : {0.1, 1.0, 10.0, 40.0}) {
        const Envelopes env = envelopes(p, t);
        const Complex expected = std::exp(Complex(-0.5 * p.kappa1, -p.omega1) * t);
        CHECK(std::abs(env.f1 - expected) <= 1e-13 * std::abs(expected) + 1e-15);
        CHECK(env.f2 == Complex(0.0, 0.0));
    }
}

TEST_CASE("exceptional point envelopes follow the linear-in-t limit") {
    const double g = 0.2, w = 3.0;
    const ModelParams p = make_params(w, w, 4.0 * g + 0.3, 0.3, g);
    const LambdaPair lp = lambdas(p);
    REQUIRE(std::abs(lp.minus - Complex(g, 0.0)) <= 1e-15);
    for (double t : {1e-7, 1e-3, 0.7, 3.0, 12.0}) {
        const Envelopes env = envelopes(p, t);
        const Complex decay = std::exp(-lp.plus * t);
        CHECK(std::abs(env.f1 - decay * (1.0 - g * t)) <= 1e-11);
        CHECK(std::abs(env.f2 - Complex(0.0, -1.0) * g * t * decay) <= 1e-11);
    }
}

TEST_CASE("exceptional point continuity under coupling perturbation") {
    const double g = 0.2, w = 3.0;
    const ModelParams p = make_params(w, w, 4.0 * g + 0.3, 0.3, g);
    for (double t : {0.5, 2.0, 10.0, 30.0}) {
        const Envelopes base = envelopes(p, t);
        for (double rel : {1e-6, -1e-6}) {
            ModelParams nudged = p;
            nudged.g = g * (1.0 + rel);
            const Envelopes other = envelopes(nudged, t);
            CHECK(std::abs(base.f1 - other.f1) <= 1e-5);
            CHECK(std::abs(base.f2 - other.f2) <= 1e-5);
        }
    }
}

TEST_CASE("envelope branch flip is invisible") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> omega(0.5, 10.0), kappa(0.0, 1.0), coupling(0.0, 1.0),
        time(0.0, 50.0);
    for (int trial = 0; trial < 60; ++trial) {
        const ModelParams p =
            make_params(omega(rng), omega(rng), kappa(rng), kappa(rng), coupling(rng));
        const double t = time(rng);
        const Envelopes a = detail::envelopes_branch(p, t, false);
        const Envelopes b = detail::envelopes_branch(p, t, true);
        CHECK(std::abs(a.f1 - b.f1) <= 1e-13);
        CHECK(std::abs(a.f2 - b.f2) <= 1e-13);
    }
}

TEST_CASE("envelope contraction over random parameters") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> omega(0.5, 10.0), kappa(0.0, 1.0), coupling(0.0, 1.0),
        time(0.0, 50.0);
    for (int trial = 0; trial < 60; ++trial) {
        const bool lossless = trial % 3 == 0;
        const ModelParams p = make_params(omega(rng), omega(rng), lossless ? 0.0 : kappa(rng),
                                          lossless ? 0.0 : kappa(rng), coupling(rng));
        for (int i = 0; i < 20; ++i) {
            const Envelopes env = envelopes(p, time(rng));
            const double total = std::norm(env.f1) + std::norm(env.f2);
            CHECK(total <= 1.0 + 1e-12);
            if (lossless) CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("envelopes_mode2_swap") {
    const ModelParams p = make_params(1.0, 2.0, 0.1, 0.2, 0.3);
    const ModelParams swapped = envelopes_mode2_swap(p);
    CHECK(swapped.omega1 == 2.0);
    CHECK(swapped.omega2 == 1.0);
    CHECK(swapped.kappa1 == 0.2);
    CHECK(swapped.kappa2 == 0.1);
    CHECK(swapped.g == p.g);

    const ModelParams twice = envelopes_mode2_swap(swapped);
    CHECK(twice.omega1 == p.omega1);
    CHECK(twice.kappa1 == p.kappa1);

    const ModelParams symmetric = make_params(3.0, 3.0, 0.4, 0.4, 0.2);
    const ModelParams same = envelopes_mode2_swap(symmetric);
    CHECK(same.omega1 == symmetric.omega1);
    CHECK(same.kappa1 == symmetric.kappa1);

    // for real g the mode-2 envelope equals the mode-1 formula on the
    // swapped parameters: sinh(xt)/x is even in lambda-
    for (double t : {0.4, 2.2, 8.0}) {
        const Envelopes a = envelopes(p, t);
        const Envelopes b = envelopes(swapped, t);
        CHECK(std::abs(a.f2 - b.f2) <= 1e-14);
    }
}

TEST_CASE("joint elements at t = 0 reproduce the initial product state") {
    const DensityMatrix rho0 = random_density_matrix(5, 21);
    const InitialState init = InitialState::from_matrix(rho0);
    const ModelParams p = make_params(4.0, 3.0, 0.2, 0.5, 0.6);
    for (int n1 = 0; n1 < 6; ++n1) {
        for (int m1 = 0; m1 < 6; ++m1) {
            const Complex v = joint_element(p, init, n1, m1, 0, 0, 0.0);
            CHECK(std::abs(v - rho0.matrix()(n1, m1)) <= 1e-14);
        }
    }
    CHECK(joint_element(p, init, 1, 1, 1, 0, 0.0) == Complex(0.0));
    CHECK(joint_element(p, init, 0, 0, 0, 2, 0.0) == Complex(0.0));
}

TEST_CASE("decoupled Fock-1 population decays exponentially") {
    const InitialState init = InitialState::from_matrix(fock_state(1, 2));
    const ModelParams p = make_params(2.0, 1.0, 0.35, 0.0, 0.0);
    for (double t : {0.0, 0.5, 2.0, 7.0}) {
        const Complex v = joint_element(p, init, 1, 1, 0, 0, t);
        CHECK(std::abs(v - std::exp(-p.kappa1 * t)) <= 1e-12);
    }
}

TEST_CASE("full swap moves Fock-2 into mode two") {
    const double g = 0.25;
    const ModelParams p = make_params(3.0, 3.0, 0.0, 0.0, g);
    const InitialState init = InitialState::from_matrix(fock_state(2, 3));
    const Complex v = joint_element(p, init, 0, 0, 2, 2, kPi / (2.0 * g));
    CHECK(std::abs(v - 1.0) <= 1e-12);
}

TEST_CASE("joint density of the vacuum stays vacuum") {
    const InitialState init = InitialState::from_matrix(fock_state(0, 1));
    const ModelParams p = make_params(5.0, 5.0, 0.05, 0.08, 0.1);
    for (double t : {0.0, 1.0, 13.0}) {
        const DensityMatrix rho = joint_density(p, init, 4, 4, t);
        CHECK(max_deviation(rho.matrix(), tensor_product(fock_state(0, 4), fock_state(0, 4)).matrix()) <=
              1e-14);
    }
}

TEST_CASE("coherent initial states stay product coherent states") {
    const Complex alpha0(0.7, -0.4);
    const InitialState init = InitialState::coherent(alpha0);
    const ModelParams p = make_params(5.0, 4.0, 0.3, 0.15, 0.45);
    for (double t : {0.0, 0.8, 3.1}) {
        const auto [a1, a2] = coherent_amplitudes(p, alpha0, t);
        const DensityMatrix joint = joint_density(p, init, 8, 8, t);
        const DensityMatrix expected =
            tensor_product(coherent_state(a1, 8), coherent_state(a2, 8));
        CHECK(max_deviation(joint.matrix(), expected.matrix()) <= 1e-10);
    }
}

TEST_CASE("joint trace is preserved for finite-support initial states") {
    const DensityMatrix rho0 = random_density_matrix(3, 5);
    const InitialState init = InitialState::from_matrix(rho0);
    const ModelParams p = make_params(4.0, 4.5, 0.25, 0.1, 0.5);
    for (double t : {0.0, 0.7, 2.9, 11.0}) {
        const DensityMatrix rho = joint_density(p, init, 8, 8, t);
        CHECK(std::abs(rho.trace().real() - 1.0) <= std::max(1e-10, rho.eps_trunc()));
        CHECK(std::abs(rho.trace().imag()) <= 1e-12);
    }
}

TEST_CASE("reduced density at t = 0 equals the initial state") {
    const DensityMatrix rho0 = random_density_matrix(4, 17);
    const InitialState init = InitialState::from_matrix(rho0);
    const ModelParams p = make_params(2.0, 3.0, 0.6, 0.2, 0.7);
    const DensityMatrix red1 = reduced_density(p, init, 1, 8, 0.0);
    for (int n = 0; n < 5; ++n) {
        for (int m = 0; m < 5; ++m) {
            CHECK(std::abs(red1.matrix()(n, m) - rho0.matrix()(n, m)) <= 1e-14);
        }
    }
    const DensityMatrix red2 = reduced_density(p, init, 2, 4, 0.0);
    CHECK(max_deviation(red2.matrix(), fock_state(0, 4).matrix()) <= 1e-14);
}

TEST_CASE("partial trace of the joint matrix matches the reduced closed form") {
    const DensityMatrix rho0 = random_density_matrix(3, 33);
    const InitialState init = InitialState::from_matrix(rho0);
    const ModelParams p = make_params(4.0, 4.2, 0.2, 0.35, 0.6);
    const int c1 = 6, c2 = 7;
    for (double t : {0.45, 1.8, 6.0}) {
        const DensityMatrix joint = joint_density(p, init, c1, c2, t);
        const DensityMatrix red1 = reduced_density(p, init, 1, c1, t);
        for (int n = 0; n < c1; ++n) {
            for (int m = 0; m < c1; ++m) {
                Complex traced = 0.0;
                for (int l = 0; l < c2; ++l) {
                    traced += joint.matrix()(n * c2 + l, m * c2 + l);
                }
                CHECK(std::abs(traced - red1.matrix()(n, m)) <= 1e-9);
            }
        }
    }
}

TEST_CASE("decoupled reduced dynamics matches the single-oscillator element") {
    const DensityMatrix rho0 = random_density_matrix(6, 57);
    const InitialState init = InitialState::from_matrix(rho0);
    const ModelParams p = make_params(2.0, 1.0, 0.3, 0.0, 0.0);
    for (double t : {0.0, 0.4, 1.7, 5.2, 10.0}) {
        const DensityMatrix red = reduced_density(p, init, 1, 7, t);
        for (int n = 0; n < 7; ++n) {
            for (int m = 0; m < 7; ++m) {
                const Complex expected =
                    oracles::single_oscillator_element(rho0, n, m, p.omega1, p.kappa1, t);
                REQUIRE(std::abs(red.matrix()(n, m) - expected) <= 1e-12);
            }
        }
    }
}

TEST_CASE("coherent reduced states match direct construction and stay pure") {
    const Complex alpha0(0.8, 0.3);
    const InitialState init = InitialState::coherent(alpha0);
    const ModelParams p = make_params(5.0, 5.0, 0.05, 0.08, 0.1);
    for (double t : {0.0, 1.3, 6.4, 20.0}) {
        const auto [a1, a2] = coherent_amplitudes(p, alpha0, t);
        for (int mode : {1, 2}) {
            const DensityMatrix red = reduced_density(p, init, mode, 20, t);
            const DensityMatrix expected = coherent_state(mode == 1 ? a1 : a2, 20);
            CHECK(max_deviation(red.matrix(), expected.matrix()) <= 1e-10);
            CHECK(std::abs(purity(red) - 1.0) <= 1e-9);
        }
    }
}

TEST_CASE("coherent amplitudes at the swap point") {
    const double w = 2.0, g = 0.5;
    const ModelParams p = make_params(w, w, 0.0, 0.0, g);
    const Complex alpha0(0.4, 0.1);
    const double ts = kPi / (2.0 * g);
    const auto [a1, a2] = coherent_amplitudes(p, alpha0, ts);
    CHECK(std::abs(a1) <= 1e-14);
    const Complex expected = Complex(0.0, -1.0) * std::exp(Complex(0.0, -w * ts)) * alpha0;
    CHECK(std::abs(a2 - expected) <= 1e-13);
}

TEST_CASE("thermal reduced states stay thermal with the mapped temperature") {
    const double beta0 = 1.5;
    const InitialState init = InitialState::thermal(beta0);
    const ModelParams p = make_params(5.0, 5.0, 0.05, 0.08, 0.1);

    const auto t0 = thermal_betas(p, beta0, 0.0);
    CHECK(t0.first == doctest::Approx(beta0).epsilon(1e-14));
    CHECK(std::isinf(t0.second));

    for (double t : {0.4, 2.0, 9.0}) {
        const auto [b1, b2] = thermal_betas(p, beta0, t);
        CHECK(std::isfinite(b1));
        for (int mode : {1, 2}) {
            const double beta = mode == 1 ? b1 : b2;
            const DensityMatrix red = reduced_density(p, init, mode, 14, t);
            for (int n = 0; n < 14; ++n) {
                for (int m = 0; m < 14; ++m) {
                    if (n == m) {
                        const double expected = -std::expm1(-beta) * std::exp(-beta * n);
                        CHECK(std::abs(red.matrix()(n, n).real() - expected) <= 1e-10);
                    } else {
                        CHECK(std::abs(red.matrix()(n, m)) <= 1e-12);
                    }
                }
            }
        }
    }
}

TEST_CASE("swap property transfers any state up to deterministic phases") {
    const double w = 3.0, g = 0.25;
    const ModelParams p = make_params(w, w, 0.0, 0.0, g);
    const double ts = kPi / (2.0 * g);
    const DensityMatrix rho0 = random_density_matrix(4, 77);
    const InitialState init = InitialState::from_matrix(rho0);
    const DensityMatrix red2 = reduced_density(p, init, 2, 6, ts);
    const DensityMatrix red1 = reduced_density(p, init, 1, 6, ts);
    const Complex mi(0.0, -1.0), pi_(0.0, 1.0);
    for (int n = 0; n < 5; ++n) {
        for (int m = 0; m < 5; ++m) {
            const Complex expected = rho0.matrix()(n, m) * ipow(mi, n) * ipow(pi_, m) *
                                     std::exp(Complex(0.0, -w * (n - m) * ts));
            CHECK(std::abs(red2.matrix()(n, m) - expected) <= 1e-10);
            CHECK(std::abs(std::abs(red2.matrix()(n, m)) - std::abs(rho0.matrix()(n, m))) <=
                  1e-10);
        }
    }
    CHECK(max_deviation(red1.matrix(), fock_state(0, 6).matrix()) <= 1e-10);
}

TEST_CASE("initial state validation") {
    CHECK_THROWS_AS(InitialState::thermal(0.0), std::invalid_argument);
    CHECK_THROWS_AS(InitialState::thermal(-1.0), std::invalid_argument);
    DensityMatrix bad({3});
    bad.matrix()(0, 0) = 0.7;  // trace far from one
    CHECK_THROWS_AS(InitialState::from_matrix(bad), std::invalid_argument);
    DensityMatrix skew({2});
    skew.matrix() << 0.5, Complex(0.2, 0.1), Complex(0.2, 0.3), 0.5;
    CHECK_THROWS_AS(InitialState::from_matrix(skew), std::invalid_argument);
}

TEST_CASE("closed form matches the master-equation oracle") {
    const std::vector<double> grid{1.0, 3.0, 6.0};
    const double dt = 2e-3;
    const int dim = 12;

    const std::vector<ModelParams> param_sets{
        make_params(5.0, 5.0, 0.05, 0.08, 0.1),
        make_params(2.0, 2.6, 0.3, 0.12, 0.5),
        make_params(1.2, 1.0, 0.0, 0.4, 0.8),
    };

    struct Case {
        const char* name;
        InitialState init;
        DensityMatrix rho0;
    };
    const std::vector<Case> cases = [&] {
        std::vector<Case> c;
        c.push_back({"fock1", InitialState::from_matrix(fock_state(1, 2)), fock_state(1, dim)});
        c.push_back({"fock2", InitialState::from_matrix(fock_state(2, 3)), fock_state(2, dim)});
        const Complex alpha(0.6, 0.0);
        c.push_back({"coherent", InitialState::coherent(alpha), coherent_state(alpha, dim)});
        c.push_back({"thermal", InitialState::thermal(2.0), thermal_state(2.0, dim)});
        return c;
    }();

    for (const auto& p : param_sets) {
        const auto [h, jumps] = build_system(p, dim, dim);
        for (const auto& c : cases) {
            const DensityMatrix joint0 = tensor_product(c.rho0, fock_state(0, dim));
            const Trajectory traj = integrate(h, jumps, joint0, grid, dt);
            for (std::size_t i = 0; i < grid.size(); ++i) {
                const DensityMatrix closed = joint_density(p, c.init, dim, dim, grid[i]);
                const double dev = max_deviation(closed.matrix(), traj.states[i].matrix());
                INFO("case " << c.name << " t=" << grid[i]);
                REQUIRE(dev <= 1e-4);
            }
        }
    }
}
