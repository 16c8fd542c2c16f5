#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qlm/analyzers.hpp"
#include "qlm/errors.hpp"
#include "qlm/field_kernel.hpp"

#include <cmath>

using namespace qlm;

namespace {

GaussianFieldState single_gaussian(const ModeSpec& m, cplx a, cplx b) {
    GaussianFieldState g;
    g.modes = {m};
    g.b = {b};
    g.m = {a};
    g.normalize();
    return g;
}

} // namespace

TEST_CASE("coherent-state quadrature moments on both representations") {
    ModeSpec m{0.057, 0.0, 4.0, 0.01, 0.0};
    auto gg = GaussianFieldState::coherent({m});
    auto rep = quadrature_stats(gg, 0);
    CHECK(rep.mean_q == doctest::Approx(std::sqrt(8.0)).epsilon(1e-12));
    CHECK(rep.mean_p == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(rep.var_q == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(rep.var_p == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(rep.uncertainty_product() == doctest::Approx(0.25).epsilon(1e-12));

    auto grid = QuadratureGrid::for_mode(m);
    auto gs = coherent_state_grid(m, 0.0, grid);
    auto rep2 = quadrature_stats(gs, 0);
    CHECK(rep2.mean_q == doctest::Approx(rep.mean_q).epsilon(1e-6));
    CHECK(rep2.mean_p == doctest::Approx(rep.mean_p).epsilon(1e-6));
    CHECK(rep2.var_q == doctest::Approx(rep.var_q).epsilon(1e-6));
    CHECK(rep2.var_p == doctest::Approx(rep.var_p).epsilon(1e-6));
    CHECK(rep2.uncertainty_product() >= 0.25 - 1e-6);
}

TEST_CASE("squeezed Gaussian second moments") {
    ModeSpec m{0.1, 0.0, 0.0, 0.01, 0.0};
    auto g = single_gaussian(m, -1.0, 0.0);
    auto rep = quadrature_stats(g, 0);
    CHECK(rep.var_q == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(rep.var_p == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.uncertainty_product() >= 0.25 - 1e-6);
}

TEST_CASE("squeezing detection against the quadrature criterion") {
    ModeSpec m{0.1, 0.0, 2.0, 0.01, 0.0};
    auto boundary = squeezing_detect(single_gaussian(m, -0.5, m.center()));
    CHECK(!boundary[0].squeezed);
    CHECK(boundary[0].factor == doctest::Approx(1.0).epsilon(1e-12));

    auto squeezed = squeezing_detect(single_gaussian(m, -0.8, m.center()));
    CHECK(squeezed[0].squeezed);
    CHECK(squeezed[0].factor == doctest::Approx(0.625).epsilon(1e-12));
    CHECK(squeezed[0].principal_a == doctest::Approx(-0.8).epsilon(1e-12));

    // flag consistency with the variance criterion
    for (double a : {-0.45, -0.5, -0.55, -0.9}) {
        auto s = squeezing_detect(single_gaussian(m, a, 0.0));
        auto q = quadrature_stats(single_gaussian(m, a, 0.0), 0);
        CHECK(s[0].squeezed == (q.var_q < 0.5 - 1e-8));
    }
}

TEST_CASE("photon statistics of coherent and vacuum states") {
    ModeSpec m{0.057, 0.0, 10.0, 0.01, 0.0};
    auto grid = QuadratureGrid::for_mode(m);
    auto gs = coherent_state_grid(m, 0.0, grid);
    auto ps = photon_statistics(gs, 0);
    CHECK(ps.mean_n == doctest::Approx(10.0).epsilon(1e-6));
    CHECK(std::abs(ps.mandel_q) < 1e-4);

    auto pg = photon_statistics(GaussianFieldState::coherent({m}), 0);
    CHECK(pg.mean_n == doctest::Approx(10.0).epsilon(1e-10));
    CHECK(pg.var_n == doctest::Approx(10.0).epsilon(1e-10));
    CHECK(std::abs(pg.mandel_q) < 1e-10);
    CHECK(std::abs(ps.raw_mean - pg.raw_mean) < 1e-5);
    CHECK(std::abs(ps.var_n - pg.var_n) < 1e-4);

    ModeSpec vac{0.057, 0.0, 0.0, 0.01, 0.0};
    auto pv = photon_statistics(GaussianFieldState::coherent({vac}), 0);
    CHECK(pv.mean_n == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(pv.raw_mean == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("amplitude-squeezed state is sub-Poissonian") {
    ModeSpec m{0.1, 0.0, 10.0, 0.01, 0.0};
    // q-squeezed and displaced along q: photon-number noise below Poisson
    auto g = single_gaussian(m, -1.0, 4.0 * m.center());
    auto ps = photon_statistics(g, 0);
    CHECK(ps.mean_n > 1.0);
    CHECK(ps.mandel_q < 0.0);

    auto on_grid = g.to_grid({QuadratureGrid{m.center() * 2.0 - 8.0,
                                             m.center() * 2.0 + 8.0, 256}});
    on_grid.normalize();
    auto pg = photon_statistics(on_grid, 0);
    CHECK(pg.mean_n == doctest::Approx(ps.mean_n).epsilon(1e-6));
    CHECK(pg.var_n == doctest::Approx(ps.var_n).epsilon(1e-5));
}

TEST_CASE("product two-mode state is unentangled on both paths") {
    ModeSpec m1{0.057, 0.0, 2.0, 0.01, 0.0};
    ModeSpec m2{0.08, 0.0, 3.0, 0.01, 0.0};
    auto g = GaussianFieldState::coherent({m1, m2});
    auto rep = mode_entanglement(g);
    CHECK(rep.offdiag_d == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(rep.reduced_purity == doctest::Approx(1.0).epsilon(1e-8));

    std::vector<QuadratureGrid> grids{{m1.center() - 7.0, m1.center() + 7.0, 64},
                                      {m2.center() - 7.0, m2.center() + 7.0, 64}};
    auto gs = g.to_grid(grids);
    gs.normalize();
    auto rep2 = mode_entanglement(gs);
    CHECK(rep2.offdiag_d < 1e-8);
    CHECK(rep2.reduced_purity == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("cross-coupled Gaussian shows entanglement consistently") {
    ModeSpec m1{0.057, 0.0, 2.0, 0.01, 0.0};
    ModeSpec m2{0.08, 0.0, 3.0, 0.01, 0.0};
    GaussianFieldState g;
    g.modes = {m1, m2};
    g.b = {m1.center(), m2.center()};
    g.m = {-0.5, 0.1, 0.1, -0.5};
    g.normalize();

    auto rep = mode_entanglement(g);
    CHECK(rep.offdiag_d == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(rep.reduced_purity < 1.0 - 1e-4);

    auto mq = g.mean_q();
    std::vector<QuadratureGrid> grids{{mq[0] - 8.0, mq[0] + 8.0, 96},
                                      {mq[1] - 8.0, mq[1] + 8.0, 96}};
    auto gs = g.to_grid(grids);
    gs.normalize();
    auto rep2 = mode_entanglement(gs);
    CHECK(rep2.offdiag_d == doctest::Approx(rep.offdiag_d).epsilon(1e-6));
    CHECK(rep2.reduced_purity == doctest::Approx(rep.reduced_purity).epsilon(1e-6));

    CHECK_THROWS_AS(mode_entanglement(GaussianFieldState::coherent({m1})),
                    validation_error);
}

TEST_CASE("fidelity across representations and displacements") {
    ModeSpec m{0.057, 0.0, 2.0, 0.01, 0.0};
    auto g = GaussianFieldState::coherent({m});
    CHECK(fidelity(g, g) == doctest::Approx(1.0).epsilon(1e-12));

    auto shifted = g;
    shifted.b[0] += 10.0; // displaced coherent state, q-shift 10
    shifted.normalize();
    CHECK(fidelity(g, shifted) == doctest::Approx(std::exp(-25.0)).epsilon(1e-8));

    auto grid = QuadratureGrid::for_mode(m);
    auto gs = coherent_state_grid(m, 0.0, grid);
    CHECK(fidelity(gs, g) == doctest::Approx(1.0).epsilon(1e-8));

    auto other = gs;
    other.grids[0].q_max += 1.0;
    CHECK_THROWS_AS(fidelity(gs, other), validation_error);
}
