#include "doctest.h"

#include "oracles.hpp"

#include <multikink/errors.hpp>
#include <multikink/evolve.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace mk;
using doctest::Approx;

namespace {

MultikinkAnsatz make_ansatz(const Potential& W, std::vector<int> labels, std::vector<double> v,
                            std::vector<double> a) {
    VacuumTable table = find_vacua(W, W.search_interval());
    ChainOfVacua chain = validate_chain(table, labels);
    return MultikinkAnsatz(W, std::move(table), MultikinkParams::make(std::move(chain), std::move(v), std::move(a)));
}

EvolveConfig config(double dx, double dt, double x_lo, double x_hi, double t_end, std::size_t every = 0) {
    EvolveConfig c;
    c.dx = dx;
    c.dt = dt;
    c.x_min = x_lo;
    c.x_max = x_hi;
    c.t_end = t_end;
    c.snapshot_every = every;
    return c;
}

}  // namespace

TEST_SUITE("evolve") {

TEST_CASE("configuration checks") {
    CHECK_THROWS_AS(config(0.05, 0.046, -10, 10, 1).validate(), ConfigError);
    CHECK_NOTHROW(config(0.05, 0.045, -10, 10, 1).validate());
    CHECK_THROWS_AS(config(0.05, 0.04, 10, -10, 1).validate(), ConfigError);
}

TEST_CASE("static phi4 kink is stationary") {
    const MultikinkAnsatz a = make_ansatz(Potential::phi4(), {0, 1}, {0.0}, {0.0});
    // at dx = 0.05 the lattice relaxation alone is about 4e-4
    const EvolveConfig c = config(0.02, 0.016, -20, 20, 50);
    const FieldState s0 = multikink(a, 0.0, c.grid());
    const SpaceTimeSlab slab = evolve_nonlinear(s0, a.model(), c);
    CHECK(slab.t_last() == Approx(50.0));
    double d = 0.0;
    for (std::size_t i = 0; i < s0.grid.n; ++i) d = std::max(d, std::abs(slab.snapshots.back().phi[i] - s0.phi[i]));
    CHECK(d <= 1e-4);
}

TEST_CASE("vacuum stays constant") {
    const MultikinkAnsatz a = make_ansatz(Potential::sine_gordon(), {1}, {}, {});
    const EvolveConfig c = config(0.1, 0.08, -10, 10, 5);
    const SpaceTimeSlab slab = evolve_nonlinear(multikink(a, 0.0, c.grid()), a.model(), c);
    for (const FieldState& s : slab.snapshots)
        for (std::size_t i = 0; i < s.grid.n; ++i) {
            CHECK(std::abs(s.phi[i] - 2.0 * oracle::pi) <= 1e-14);
            CHECK(std::abs(s.phi_dot[i]) <= 1e-14);
        }
}

TEST_CASE("boosted sine-Gordon kink travels rigidly") {
    const double v = 0.5, g = 1.0 / std::sqrt(1.0 - v * v);
    const MultikinkAnsatz a = make_ansatz(Potential::sine_gordon(), {0, 1}, {v}, {0.0});
    const EvolveConfig c = config(0.02, 0.016, -20, 35, 20);
    const SpaceTimeSlab slab = evolve_nonlinear(multikink(a, 0.0, c.grid()), a.model(), c);
    double err = 0.0, center = 0.0;
    for (const FieldState& s : slab.snapshots) {
        std::size_t cross = 0;
        for (std::size_t i = 0; i < s.grid.n; ++i) {
            err = std::max(err, std::abs(s.phi[i] - oracle::sg_kink(g * (s.grid.x(i) - v * s.t)).h));
            if (i + 1 < s.grid.n && s.phi[i] < oracle::pi && s.phi[i + 1] >= oracle::pi) cross = i;
        }
        const double x0 = s.grid.x(cross), f0 = s.phi[cross] - oracle::pi, f1 = s.phi[cross + 1] - oracle::pi;
        center = std::max(center, std::abs(x0 - f0 * s.grid.dx / (f1 - f0) - v * s.t));
    }
    CHECK(err <= 2e-3);
    CHECK(center <= 1e-3);
}

TEST_CASE("backward integration and snapshot bookkeeping") {
    const MultikinkAnsatz a = make_ansatz(Potential::phi4(), {0, 1}, {0.3}, {0.0});
    const EvolveConfig c = config(0.05, 0.04, -20, 20, 0.0, 5);
    const SpaceTimeSlab slab = evolve_nonlinear(multikink(a, 4.0, c.grid()), a.model(), c);
    CHECK(slab.t_first() == Approx(0.0).scale(1.0));
    CHECK(slab.t_last() == Approx(4.0));
    for (std::size_t j = 1; j < slab.snapshots.size(); ++j) CHECK(slab.snapshots[j].t > slab.snapshots[j - 1].t);
    CHECK(slab.dt_snapshot == Approx(0.2));
    const FieldState exact = multikink(a, 0.0, c.grid());
    double d = 0.0;
    for (std::size_t i = 0; i < exact.grid.n; ++i) d = std::max(d, std::abs(slab.snapshots.front().phi[i] - exact.phi[i]));
    CHECK(d <= 2e-3);
    CHECK(slab.nearest(1.01) == 5);
}

TEST_CASE("instability is detected") {
    const MultikinkAnsatz a = make_ansatz(Potential::phi4(), {0, 1}, {0.0}, {0.0});
    const EvolveConfig c = config(0.05, 0.045, -10, 10, 20);
    FieldState s = multikink(a, 0.0, c.grid());
    for (std::size_t i = s.grid.n / 3; i < 2 * s.grid.n / 3; ++i) s.phi[i] = 300.0;
    CHECK_THROWS_AS((void)evolve_nonlinear(s, a.model(), c), InstabilityError);
}

TEST_CASE("space-time interpolation") {
    const double v = 0.4, g = 1.0 / std::sqrt(1.0 - v * v);
    const MultikinkAnsatz a = make_ansatz(Potential::sine_gordon(), {0, 1}, {v}, {0.0});
    const EvolveConfig c = config(0.02, 0.016, -20, 20, 4, 5);
    const SpaceTimeSlab slab = evolve_nonlinear(multikink(a, 0.0, c.grid()), a.model(), c);
    const SlabSample p = interpolate(slab, 2.013, 0.517);
    const oracle::Jet j = oracle::sg_kink(g * (0.517 - v * 2.013));
    CHECK(p.phi == Approx(j.h).epsilon(1e-4));
    CHECK(p.phi_x == Approx(g * j.dh).epsilon(1e-3));
    CHECK(p.phi_t == Approx(-g * v * j.dh).epsilon(1e-3));
    CHECK_THROWS_AS((void)interpolate(slab, 4.5, 0.0), CoverageError);
    CHECK_THROWS_AS((void)interpolate(slab, 1.0, 21.0), CoverageError);
}

TEST_CASE("linearized evolution") {
    const UniformGrid grid = UniformGrid::covering(-25, 25, 0.02);

    SUBCASE("zero stays zero") {
        const MultikinkAnsatz a = make_ansatz(Potential::phi4(), {0, 1}, {0.2}, {0.0});
        const SpaceTimeSlab s = evolve_linearized(TwoField::zeros(grid), 0.0, a, config(0.02, 0.016, -25, 25, 3));
        for (const FieldState& f : s.snapshots)
            for (double x : f.phi) CHECK(x == 0.0);
    }
    // both modes are exact only in the continuum; the lattice error is O(dx^2)
    SUBCASE("static translation mode is time independent") {
        const MultikinkAnsatz a = make_ansatz(Potential::phi4(), {0, 1}, {0.0}, {0.0});
        auto defect = [&](double dx) {
            const EvolveConfig c = config(dx, 0.8 * dx, -25, 25, 10);
            const ModePair m = zero_modes(a, 0, 0.0, c.grid());
            const SpaceTimeSlab s = evolve_linearized(m.Y0, 0.0, a, c);
            double d = 0.0;
            for (std::size_t i = 0; i < c.grid().n; ++i)
                d = std::max({d, std::abs(s.snapshots.back().phi[i] - m.Y0.first[i]),
                              std::abs(s.snapshots.back().phi_dot[i])});
            return d;
        };
        const double d1 = defect(0.04), d2 = defect(0.02);
        CHECK(d2 <= 3e-2);
        CHECK(d1 / d2 == Approx(4.0).epsilon(0.1));
    }
    SUBCASE("moving kink: velocity mode grows linearly along the translation mode") {
        const double v = 0.5, g = 1.0 / std::sqrt(1.0 - v * v);
        const MultikinkAnsatz a = make_ansatz(Potential::sine_gordon(), {0, 1}, {v}, {0.0});
        auto defect = [&](double dx) {
            const EvolveConfig c = config(dx, 0.8 * dx, -25, 25, 10);
            const ModePair m0 = zero_modes(a, 0, 0.0, c.grid());
            const SpaceTimeSlab s = evolve_linearized(m0.Y1, 0.0, a, c);
            double d = 0.0;
            for (const FieldState& f : s.snapshots) {
                const ModePair m = zero_modes(a, 0, f.t, c.grid());
                for (std::size_t i = 0; i < c.grid().n; ++i) {
                    d = std::max(d, std::abs(f.phi[i] - m.Y1.first[i] - f.t / g * m.Y0.first[i]));
                    d = std::max(d, std::abs(f.phi_dot[i] - m.Y1.second[i] - f.t / g * m.Y0.second[i]));
                }
            }
            return d;
        };
        const double d1 = defect(0.04), d2 = defect(0.02);
        CHECK(d2 <= 1e-2);
        CHECK(d1 / d2 == Approx(4.0).epsilon(0.1));
    }
    SUBCASE("linearity") {
        const MultikinkAnsatz a = make_ansatz(Potential::phi6(), {0, 1, 2}, {-0.3, 0.4}, {-4.0, 4.0});
        std::mt19937_64 rng(9);
        const TwoField h1 = random_bump_field(grid, rng, -5, 5), h2 = random_bump_field(grid, rng, -5, 5);
        TwoField mix = TwoField::zeros(grid);
        for (std::size_t i = 0; i < grid.n; ++i) {
            mix.first[i] = 2.0 * h1.first[i] - 0.5 * h2.first[i];
            mix.second[i] = 2.0 * h1.second[i] - 0.5 * h2.second[i];
        }
        const EvolveConfig c = config(0.02, 0.016, -25, 25, 2);
        const SpaceTimeSlab s1 = evolve_linearized(h1, 1.0, a, c), s2 = evolve_linearized(h2, 1.0, a, c);
        const SpaceTimeSlab sm = evolve_linearized(mix, 1.0, a, c);
        double d = 0.0, scale = 0.0;
        for (std::size_t j = 0; j < sm.snapshots.size(); ++j)
            for (std::size_t i = 0; i < grid.n; ++i) {
                const double lin = 2.0 * s1.snapshots[j].phi[i] - 0.5 * s2.snapshots[j].phi[i];
                d = std::max(d, std::abs(sm.snapshots[j].phi[i] - lin));
                scale = std::max(scale, std::abs(lin));
            }
        CHECK(d <= 1e-13 * scale);
    }
}

TEST_CASE("energies") {
    const UniformGrid grid = UniformGrid::covering(-30, 30, 0.01);
    const MultikinkAnsatz p4 = make_ansatz(Potential::phi4(), {0, 1}, {0.0}, {0.0});
    const Energies e = energy(multikink(p4, 0.0, grid), p4.model());
    CHECK(e.total == Approx(oracle::phi4_energy).epsilon(1e-8));
    CHECK(e.potential == Approx(oracle::phi4_energy).epsilon(1e-8));
    CHECK(e.kinetic == 0.0);

    const MultikinkAnsatz vac = make_ansatz(Potential::phi4(), {0}, {}, {});
    const Energies z = energy(multikink(vac, 0.0, grid), vac.model());
    CHECK(z.total == 0.0);
    CHECK(z.potential == 0.0);
    CHECK(z.kinetic == 0.0);

    for (double v : {0.3, 0.6}) {
        const MultikinkAnsatz sg = make_ansatz(Potential::sine_gordon(), {0, 1}, {v}, {0.0});
        CHECK(energy(multikink(sg, 0.0, grid), sg.model()).total ==
              Approx(8.0 / std::sqrt(1.0 - v * v)).epsilon(1e-6));
    }
}

TEST_CASE("energy drift is second order in dt") {
    const MultikinkAnsatz a = make_ansatz(Potential::sine_gordon(), {0, 1, 2}, {-0.4, 0.3}, {-6.0, 6.0});
    auto drift = [&](double dt) {
        const EvolveConfig c = config(0.05, dt, -40, 40, 10);
        const SpaceTimeSlab s = evolve_nonlinear(multikink(a, 0.0, c.grid()), a.model(), c);
        const double e0 = scheme_energy(s.snapshots.front(), a.model()).total;
        double d = 0.0;
        for (const FieldState& f : s.snapshots) d = std::max(d, std::abs(scheme_energy(f, a.model()).total - e0));
        return d;
    };
    const double d1 = drift(0.04), d2 = drift(0.02);
    CHECK(d1 < 1e-3);
    CHECK(d1 / d2 == Approx(4.0).epsilon(0.1));
}

TEST_CASE("sector detection") {
    const UniformGrid grid = UniformGrid::covering(-30, 30, 0.05);
    const MultikinkAnsatz p4 = make_ansatz(Potential::phi4(), {0, 1}, {0.0}, {0.0});
    const VacuumTable& t4 = p4.table();
    CHECK(detect_sector(multikink(p4, 0.0, grid), t4) == std::make_pair(0, 1));
    const MultikinkAnsatz anti = make_ansatz(Potential::phi4(), {1, 0}, {0.0}, {0.0});
    CHECK(detect_sector(multikink(anti, 0.0, grid), t4) == std::make_pair(1, 0));
    const MultikinkAnsatz sg = make_ansatz(Potential::sine_gordon(), {0, 1, 2}, {-0.3, 0.3}, {0.0, 0.0});
    CHECK(detect_sector(multikink(sg, 10.0, grid), sg.table()) == std::make_pair(0, 2));

    FieldState bad = multikink(p4, 0.0, grid);
    for (std::size_t i = 0; i < 10; ++i) bad.phi[i] = 0.3;
    CHECK_THROWS_AS((void)detect_sector(bad, t4), UnclassifiedSectorError);
}

TEST_CASE("Gamma inequality along an evolution") {
    const MultikinkAnsatz a = make_ansatz(Potential::phi4(), {0, 1, 0}, {-0.5, 0.5}, {-4.0, 4.0});
    const EvolveConfig c = config(0.05, 0.04, -30, 30, 12);
    const SpaceTimeSlab s = evolve_nonlinear(multikink(a, 0.0, c.grid()), a.model(), c);
    for (const FieldState& f : s.snapshots) {
        const GammaCheck g = gamma_inequality(f, a.model());
        CHECK(g.holds(1e-9));
        CHECK(g.potential_energy >= 2.0 * oracle::phi4_energy * 0.99);
    }
}

TEST_CASE("zero-mode pairings") {
    SUBCASE("static kink: psi0 pairing is conserved to second order") {
        const MultikinkAnsatz a = make_ansatz(Potential::sine_gordon(), {0, 1}, {0.0}, {0.0});
        auto drift = [&](double dx) {
            const EvolveConfig c = config(dx, 0.9 * dx, -25, 25, 10);
            std::mt19937_64 rng(3);
            const ZeroModeSeries z = zero_mode_drift(a, random_bump_field(c.grid(), rng, -5, 5), 0.0, c);
            double d = 0.0;
            for (double p : z.psi0[0]) d = std::max(d, std::abs(p - z.psi0[0][0]));
            return d / std::abs(z.psi0[0][0]);
        };
        const double d1 = drift(0.04), d2 = drift(0.02);
        CHECK(d1 < 5e-3);
        CHECK(d1 / d2 == Approx(4.0).epsilon(0.1));
    }
    SUBCASE("moving kink: d/dt <psi1, h> = -<psi0, h> / gamma") {
        const double v = 0.5, g = 1.0 / std::sqrt(1.0 - v * v);
        const MultikinkAnsatz a = make_ansatz(Potential::sine_gordon(), {0, 1}, {v}, {0.0});
        const EvolveConfig c = config(0.02, 0.018, -25, 25, 5, 1);
        std::mt19937_64 rng(4);
        const ZeroModeSeries z = zero_mode_drift(a, random_bump_field(c.grid(), rng, -5, 5), 0.0, c);
        double worst = 0.0, scale = 0.0;
        for (std::size_t j = 1; j + 1 < z.times.size(); ++j) {
            const double d = (z.psi1[0][j + 1] - z.psi1[0][j - 1]) / (z.times[j + 1] - z.times[j - 1]);
            worst = std::max(worst, std::abs(d + z.psi0[0][j] / g));
            scale = std::max(scale, std::abs(z.psi0[0][j]));
        }
        CHECK(worst <= 1e-4 * scale);
    }
    SUBCASE("two separated kinks: psi0 rates shrink as the kinks separate") {
        const MultikinkAnsatz a = make_ansatz(Potential::sine_gordon(), {0, 1, 2}, {-0.3, 0.3}, {0.0, 0.0});
        auto rate = [&](double t0) {
            const EvolveConfig c = config(0.05, 0.04, -20 - 0.3 * t0 - 15, 20 + 0.3 * t0 + 15, t0 + 2, 1);
            std::mt19937_64 rng(8);
            TwoField h = random_bump_field(c.grid(), rng, -0.3 * t0 - 3, 0.3 * t0 + 3);
            const ZeroModeSeries z = zero_mode_drift(a, h, t0, c);
            double r = 0.0;
            for (std::size_t k = 0; k < 2; ++k)
                for (std::size_t j = 1; j + 1 < z.times.size(); ++j)
                    r = std::max(r, std::abs(z.psi0[k][j + 1] - z.psi0[k][j - 1]) / (z.times[j + 1] - z.times[j - 1]));
            return r;
        };
        const double r10 = rate(10.0), r20 = rate(20.0), r30 = rate(30.0);
        CHECK(r20 < r10);
        CHECK(r30 < r20);
        CHECK(std::log(r10 / r30) / 20.0 > 0.1);
    }
}

TEST_CASE("slab export") {
    const MultikinkAnsatz a = make_ansatz(Potential::phi4(), {0, 1}, {0.1}, {0.0});
    const EvolveConfig c = config(0.1, 0.08, -10, 10, 1.6, 10);
    const SpaceTimeSlab s = evolve_nonlinear(multikink(a, 0.0, c.grid()), a.model(), c);
    const auto dir = std::filesystem::temp_directory_path() / "multikink_slab_test";
    std::filesystem::remove_all(dir);
    write_slab(s, dir.string(), "snap");
    CHECK(std::filesystem::exists(dir / "snap_manifest.csv"));
    CHECK(std::filesystem::exists(dir / "snap_00000.csv"));
    std::ifstream in(dir / "snap_00001.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "x,phi,phi_t");
    std::filesystem::remove_all(dir);
}

}
