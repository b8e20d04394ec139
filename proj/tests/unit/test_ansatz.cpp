#include "doctest.h"

#include "oracles.hpp"

#include <multikink/ansatz.hpp>
#include <multikink/errors.hpp>

#include <cmath>

using namespace mk;
using doctest::Approx;

namespace {

MultikinkAnsatz make_ansatz(const Potential& W, std::vector<int> labels, std::vector<double> v,
                            std::vector<double> a) {
    VacuumTable table = find_vacua(W, W.search_interval());
    ChainOfVacua chain = validate_chain(table, labels);
    return MultikinkAnsatz(W, std::move(table), MultikinkParams::make(std::move(chain), std::move(v), std::move(a)));
}

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

}  // namespace

TEST_SUITE("ansatz") {

TEST_CASE("parameter admissibility") {
    const Potential W = Potential::sine_gordon();
    const VacuumTable t = find_vacua(W, W.search_interval());
    const ChainOfVacua c = validate_chain(t, {0, 1, 2});
    CHECK_THROWS_AS((void)MultikinkParams::make(c, {0.3, -0.3}, {0.0, 0.0}), ConfigError);
    CHECK_THROWS_AS((void)MultikinkParams::make(c, {0.3, 0.3}, {0.0, 0.0}), ConfigError);
    CHECK_THROWS_AS((void)MultikinkParams::make(c, {-0.3, 1.0}, {0.0, 0.0}), ConfigError);
    CHECK_THROWS_AS((void)MultikinkParams::make(c, {-0.3}, {0.0, 0.0}), ConfigError);
    const MultikinkParams p = MultikinkParams::make(c, {-0.6, 0.8}, {1.0, 2.0});
    CHECK(p.gammas[0] == Approx(1.25));
    CHECK(p.gammas[1] == Approx(5.0 / 3.0));
    CHECK_THROWS_AS((void)lorentz_gamma(-1.0), ArgumentError);
}

TEST_CASE("multikink superposition") {
    const UniformGrid grid = UniformGrid::covering(-30.0, 30.0, 0.05);

    SUBCASE("no kinks is the vacuum") {
        const MultikinkAnsatz a = make_ansatz(Potential::phi4(), {1}, {}, {});
        const FieldState s = multikink(a, 3.0, grid);
        for (std::size_t i = 0; i < grid.n; ++i) {
            CHECK(s.phi[i] == 1.0);
            CHECK(s.phi_dot[i] == 0.0);
        }
    }
    SUBCASE("static phi4 kink") {
        const MultikinkAnsatz a = make_ansatz(Potential::phi4(), {0, 1}, {0.0}, {0.0});
        const FieldState s = multikink(a, 5.0, grid);
        double err = 0.0;
        for (std::size_t i = 0; i < grid.n; ++i) err = std::max(err, std::abs(s.phi[i] - oracle::phi4_kink(grid.x(i)).h));
        CHECK(err <= 1e-8);
        CHECK(s.sector == std::make_pair(0, 1));
    }
    SUBCASE("two sine-Gordon kinks at t = 40") {
        const double v = 0.3, g = 1.0 / std::sqrt(1.0 - v * v);
        const MultikinkAnsatz a = make_ansatz(Potential::sine_gordon(), {0, 1, 2}, {-v, v}, {0.0, 0.0});
        const FieldState s = multikink(a, 40.0, grid);
        double err = 0.0;
        for (std::size_t i = 0; i < grid.n; ++i) {
            const double x = grid.x(i);
            const double single = x < 0.0 ? oracle::sg_kink(g * (x + 12.0)).h
                                          : 2.0 * oracle::pi + oracle::sg_kink(g * (x - 12.0)).h;
            err = std::max(err, std::abs(s.phi[i] - single));
        }
        CHECK(err <= 1e-4);
        // midpoints pi and 3 pi sit at x = -12 and x = 12
        const std::size_t left = static_cast<std::size_t>(std::lround((-12.0 - grid.x_min) / grid.dx));
        CHECK(s.phi[left] == Approx(oracle::pi).epsilon(1e-9));
        CHECK(s.phi[grid.n - 1 - left] == Approx(3.0 * oracle::pi).epsilon(1e-9));
    }
    SUBCASE("time derivative is exact") {
        const MultikinkAnsatz a = make_ansatz(Potential::phi6(), {0, 1, 0}, {-0.4, 0.5}, {-3.0, 2.0});
        const double t = 1.3, h = 1e-5;
        const FieldState s = multikink(a, t, grid);
        const FieldState p = multikink(a, t + h, grid), m = multikink(a, t - h, grid);
        double err = 0.0;
        for (std::size_t i = 0; i < grid.n; ++i) err = std::max(err, std::abs((p.phi[i] - m.phi[i]) / (2 * h) - s.phi_dot[i]));
        CHECK(err <= 1e-7);
    }
}

TEST_CASE("sector consistency") {
    const UniformGrid grid = UniformGrid::covering(-40.0, 40.0, 0.1);
    const MultikinkAnsatz a = make_ansatz(Potential::phi6(), {2, 1, 0, 1}, {-0.5, 0.0, 0.4}, {-5.0, 0.0, 5.0});
    const FieldState s = multikink(a, 4.0, grid);
    CHECK(s.phi.front() == Approx(1.0).epsilon(1e-10));
    CHECK(s.phi.back() == Approx(0.0).scale(1.0).epsilon(1e-10));
}

TEST_CASE("linearized potential") {
    const UniformGrid grid = UniformGrid::covering(-20.0, 20.0, 0.05);
    const MultikinkAnsatz a = make_ansatz(Potential::phi4(), {0, 1}, {0.0}, {0.0});
    const std::vector<double> V = potential_V(a, 0.0, grid);
    double err = 0.0;
    for (std::size_t i = 0; i < grid.n; ++i) {
        const double th = std::tanh(oracle::sqrt2 * grid.x(i));
        err = std::max(err, std::abs(V[i] - (12.0 * th * th - 4.0)));
    }
    CHECK(err <= 1e-7);

    // limits telescope to the outer masses
    const MultikinkAnsatz b = make_ansatz(Potential::phi6(), {0, 1, 2}, {-0.2, 0.3}, {-4.0, 4.0});
    const UniformGrid wide = UniformGrid::covering(-60.0, 60.0, 0.1);
    const std::vector<double> W2 = potential_V(b, 2.0, wide);
    CHECK(W2.front() == Approx(8.0).epsilon(1e-9));
    CHECK(W2.back() == Approx(8.0).epsilon(1e-9));
    const MultikinkAnsatz c = make_ansatz(Potential::phi6(), {0, 1}, {0.1}, {0.0});
    const std::vector<double> W3 = potential_V(c, 0.0, wide);
    CHECK(W3.front() == Approx(8.0).epsilon(1e-9));
    CHECK(W3.back() == Approx(2.0).epsilon(1e-9));

    const MultikinkAnsatz vac = make_ansatz(Potential::phi6(), {1}, {}, {});
    CHECK(potential_V(vac, 0.0, grid)[17] == Approx(2.0));
}

TEST_CASE("zero modes") {
    const UniformGrid grid = UniformGrid::covering(-25.0, 25.0, 0.01);

    SUBCASE("static kink") {
        const MultikinkAnsatz a = make_ansatz(Potential::phi4(), {0, 1}, {0.0}, {0.0});
        const ModePair m = zero_modes(a, 0, 0.0, grid);
        double e = 0.0;
        for (std::size_t i = 0; i < grid.n; ++i) {
            const double dh = oracle::phi4_kink(grid.x(i)).dh;
            e = std::max({e, std::abs(m.Y0.first[i] - dh), std::abs(m.Y0.second[i]), std::abs(m.Y1.first[i]),
                          std::abs(m.Y1.second[i] - dh)});
            // J(a, b) = (b, -a)
            e = std::max({e, std::abs(m.psi0.first[i] - m.Y0.second[i]), std::abs(m.psi0.second[i] + m.Y0.first[i])});
        }
        CHECK(e <= 1e-7);
        CHECK(std::abs(project(m.psi0, m.Y0)) <= 1e-12);
        CHECK(project(m.psi1, m.Y0) == Approx(oracle::phi4_energy).epsilon(1e-8));
    }
    SUBCASE("moving phi4 kink") {
        const double v = 0.5, g = 2.0 / std::sqrt(3.0);
        const MultikinkAnsatz a = make_ansatz(Potential::phi4(), {0, 1}, {v}, {0.0});
        const ModePair m = zero_modes(a, 0, 0.0, grid);
        double e = 0.0;
        for (std::size_t i = 0; i < grid.n; ++i) {
            const oracle::Jet j = oracle::phi4_kink(g * grid.x(i));
            e = std::max({e, std::abs(m.Y0.first[i] - j.dh), std::abs(m.Y0.second[i] + g * v * j.d2h)});
        }
        CHECK(e <= 1e-7);
        CHECK(project(m.psi0, m.Y1) == Approx(-project(m.psi1, m.Y0)).epsilon(1e-10));
        CHECK(std::abs(project(m.psi0, m.Y0)) <= 1e-12);
    }
    SUBCASE("modes are parameter derivatives of the moving kink") {
        const double v = 0.35, a0 = 0.7, t = 1.1, g = 1.0 / std::sqrt(1.0 - v * v), eps = 1e-5;
        const Potential W = Potential::sine_gordon();
        const MultikinkAnsatz a = make_ansatz(W, {0, 1}, {v}, {a0});
        const ModePair m = zero_modes(a, 0, t, grid);
        auto at = [&](double vv, double aa) {
            return multikink(a.with_params(MultikinkParams::make(a.params().chain, {vv}, {aa})), t, grid);
        };
        const FieldState ap = at(v, a0 + eps), am = at(v, a0 - eps);
        const FieldState vp = at(v + eps, a0), vm = at(v - eps, a0);
        double e0 = 0.0, e1 = 0.0;
        for (std::size_t i = 0; i < grid.n; ++i) {
            // Y0 = -(1/g) d/da (phi, phi_t)
            e0 = std::max(e0, std::abs(m.Y0.first[i] + (ap.phi[i] - am.phi[i]) / (2 * eps) / g));
            e0 = std::max(e0, std::abs(m.Y0.second[i] + (ap.phi_dot[i] - am.phi_dot[i]) / (2 * eps) / g));
            // -(1/g^2) d/dv (phi, phi_t) = Y1 + (t/g) Y0
            const double sec = -t / g;
            e1 = std::max(e1, std::abs(m.Y1.first[i] + (vp.phi[i] - vm.phi[i]) / (2 * eps) / (g * g) - sec * m.Y0.first[i]));
            e1 = std::max(e1, std::abs(m.Y1.second[i] + (vp.phi_dot[i] - vm.phi_dot[i]) / (2 * eps) / (g * g) -
                                           sec * m.Y0.second[i]));
        }
        CHECK(e0 <= 1e-6);
        CHECK(e1 <= 1e-6);
    }
    CHECK_THROWS_AS((void)zero_modes(make_ansatz(Potential::phi4(), {0, 1}, {0.0}, {0.0}), 1, 0.0, grid),
                    ArgumentError);
}

TEST_CASE("inner products") {
    const UniformGrid grid = UniformGrid::covering(-5.0, 5.0, 0.01);
    TwoField f = TwoField::zeros(grid), g = TwoField::zeros(grid);
    for (std::size_t i = 0; i < grid.n; ++i) {
        f.first[i] = std::exp(-grid.x(i) * grid.x(i));
        g.second[i] = std::cos(grid.x(i));
    }
    CHECK(project(f, g) == 0.0);
    CHECK(project(f, f) == Approx(std::sqrt(oracle::pi / 2.0)).epsilon(1e-9));
    // |h|_E^2 for h = (e^{-x^2}, 0): int e^{-2x^2} (1 + 4x^2) = 2 sqrt(pi/2)
    CHECK(energy_norm_sq(f) == Approx(2.0 * std::sqrt(oracle::pi / 2.0)).epsilon(2e-4));
    const TwoField other{UniformGrid::covering(-5.0, 5.0, 0.02), g.first, g.second};
    CHECK_THROWS_AS((void)project(f, other), ArgumentError);
}

TEST_CASE("cutoff functions") {
    const MultikinkAnsatz a = make_ansatz(Potential::sine_gordon(), {0, 1, 2}, {-0.3, 0.3}, {-1.0, 1.0});
    const double t = 10.0, rho = default_rho(a.params());
    CHECK(rho == Approx(0.05 * 0.6));
    CHECK(cutoff_chi(a, 1, t, 0.3 * t + 1.0, rho) == 1.0);
    CHECK(cutoff_chi(a, 1, t, 0.3 * t + 1.0 + 2.01 * rho * t, rho) == 0.0);
    CHECK(cutoff_chi(a, 0, t, -0.3 * t - 1.0 - 2.5 * rho * t, rho) == 0.0);
    CHECK(cutoff_chi(a, 1, t, 0.3 * t + 1.0 + 1.5 * rho * t, rho) == Approx(0.5));
    CHECK_THROWS_AS((void)cutoff_chi(a, 0, 0.0, 0.0, rho), DomainError);
    CHECK(bump_chi(1.25) > bump_chi(1.5));
    CHECK(bump_chi(1.5) > 0.0);
    CHECK(bump_chi(1.5) < 1.0);
    CHECK(bump_chi(-1.3) == bump_chi(1.3));
    const MultikinkAnsatz single = make_ansatz(Potential::phi4(), {0, 1}, {0.2}, {0.0});
    CHECK(default_rho(single.params()) == 0.05);
}

TEST_CASE("quadratic forms") {
    const UniformGrid grid = UniformGrid::covering(-20.0, 20.0, 0.01);
    const MultikinkAnsatz a = make_ansatz(Potential::phi4(), {0, 1}, {0.0}, {0.0});
    CHECK(quad_form_Q(a, 1.0, TwoField::zeros(grid), 0.05) == 0.0);

    TwoField kernel = TwoField::zeros(grid);
    for (std::size_t i = 0; i < grid.n; ++i) kernel.first[i] = oracle::phi4_kink(grid.x(i)).dh;
    const double q = quad_form_Q(a, 1.0, kernel, 0.05);
    CHECK(std::abs(q) <= 1e-3);
    CHECK(std::abs(quad_form_single(a, 0, 1.0, kernel)) <= 1e-3);

    std::mt19937_64 rng(11);
    TwoField h = random_bump_field(grid, rng, -3.0, 3.0);
    h.second.assign(grid.n, 0.0);
    const ModePair m = zero_modes(a, 0, 1.0, grid);
    remove_projections(h, {m.psi0, m.psi1});
    CHECK(std::abs(project(h, m.psi0)) <= 1e-10);
    CHECK(std::abs(project(h, m.psi1)) <= 1e-10);
    CHECK(quad_form_Q(a, 1.0, h, 0.05) > 0.0);
}

TEST_CASE("random fields are reproducible") {
    const UniformGrid grid = UniformGrid::covering(-10.0, 10.0, 0.05);
    std::mt19937_64 r1(5), r2(5), r3(6);
    const TwoField a = random_bump_field(grid, r1, -2.0, 2.0);
    const TwoField b = random_bump_field(grid, r2, -2.0, 2.0);
    const TwoField c = random_bump_field(grid, r3, -2.0, 2.0);
    CHECK(a.first == b.first);
    CHECK(a.second == b.second);
    CHECK(a.first != c.first);
}

TEST_CASE("coercivity sampling") {
    const UniformGrid grid = UniformGrid::covering(-25.0, 25.0, 0.02);
    for (double v : {0.0, 0.5}) {
        const MultikinkAnsatz a = make_ansatz(Potential::sine_gordon(), {0, 1}, {v}, {0.0});
        const CoercivityReport r = sample_coercivity(a, 0.0, grid, 100, 1, true);
        CHECK(r.samples == 100);
        CHECK(r.positive == 100);
        CHECK(r.min_ratio > 0.05);
        CHECK(r.max_projection_residual <= 1e-8);
    }
    const double v = 0.3, a = oracle::sg_two_soliton_shift(v);
    const MultikinkAnsatz two = make_ansatz(Potential::sine_gordon(), {0, 1, 2}, {-v, v}, {a, -a});
    const CoercivityReport r = sample_coercivity(two, 15.0, UniformGrid::covering(-35.0, 35.0, 0.02), 100, 2, false);
    CHECK(r.positive == 100);
    CHECK(r.min_ratio > 0.05);
}

}
