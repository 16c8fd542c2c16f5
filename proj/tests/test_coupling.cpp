#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qlm/constants.hpp"
#include "qlm/coupling.hpp"
#include "qlm/field_kernel.hpp"

#include <cmath>

using namespace qlm;

TEST_CASE("vector potential: direct substitution") {
    ParametricField pf{{ModeSpec{1.0, 0.0, 1e4, 0.01}}, {100.0}, false};
    CHECK(vector_potential(pf, 0.0).real() == doctest::Approx(1.0));
    CHECK(vector_potential(pf, 0.0).imag() == 0.0);
}

TEST_CASE("vector potential: sine contribution vanishes at the coherent center") {
    ModeSpec m{1.0, 0.3, 8.0, 0.02};
    ParametricField pf{{m}, {m.center()}, true};
    CHECK(vector_potential(pf, 1.1).imag() == doctest::Approx(0.0));
}

TEST_CASE("vector potential: zero mean over one period") {
    ModeSpec m{0.7, 0.4, 50.0, 0.05};
    ParametricField pf{{m}, {9.0}, false};
    auto cs = CosSum::from_parametric(pf);
    CHECK(std::abs(cs.integral(m.period())) < 1e-12);
}

TEST_CASE("vector potential matches <A> of the coherent state at the center") {
    ModeSpec m{1.0, 0.5, 6.0, 0.03};
    ParametricField pf{{m}, {m.center()}, false};
    for (double t : {0.0, 0.9, 2.8}) {
        double expect = m.amplitude() * std::cos(m.phase(t));
        CHECK(vector_potential(pf, t).real() == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("local substitution") {
    CHECK(local_substitution(ModeSpec{1.0, 0.0, 8.0, 1e-3}, 4.0) == doctest::Approx(0.0));
    CHECK(local_substitution(ModeSpec{1.0, 0.0, 0.0, 1e-3}, 1.0) == doctest::Approx(-1.0));
}

TEST_CASE("local substitution agrees with a finite-difference log derivative") {
    ModeSpec m{1.0, 0.0, 5.0, 1e-3};
    double c = m.center();
    double h = 1e-5;
    for (double q : {c - 2.0, c - 0.5, c + 0.1, c + 3.0}) {
        auto lng = [&](double x) { return -0.5 * (x - c) * (x - c); };
        double fd = (lng(q + h) - lng(q - h)) / (2.0 * h);
        CHECK(local_substitution(m, q) == doctest::Approx(fd).epsilon(1e-8));
    }
}

TEST_CASE("local substitution is linear with slope -1 and root at sqrt(2N)") {
    ModeSpec m{1.0, 0.0, 12.5, 1e-3};
    double r = m.center();
    CHECK(local_substitution(m, r) == doctest::Approx(0.0));
    CHECK(local_substitution(m, r + 1.0) - local_substitution(m, r) == doctest::Approx(-1.0));
}

TEST_CASE("interaction picture map: identity at t=0 with zero phase") {
    ModeSpec m{1.0, 0.0, 3.0, 1e-3};
    auto s = coherent_state_grid(m, 0.0, QuadratureGrid::for_mode_oscillating(m));
    auto r = interaction_picture_map(s, 0.0, PictureMap::to_interaction);
    for (std::size_t i = 0; i < s.size(); ++i)
        CHECK(std::abs(r.amplitudes[i] - s.amplitudes[i]) < 1e-12);
}

TEST_CASE("interaction picture map: coherent state becomes the static Gaussian") {
    ModeSpec m{1.2, 0.7, 6.0, 1e-3};
    auto g = QuadratureGrid::for_mode_oscillating(m);
    double t = 1.9;
    auto s = coherent_state_grid(m, t, g);
    auto r = interaction_picture_map(s, t, PictureMap::to_interaction);
    // expected: proportional to exp[-(q - sqrt(2N))^2 / 2]
    double c = m.center();
    cplx ratio{};
    bool have_ratio = false;
    for (int i = 0; i < g.n_points; ++i) {
        double q = g.q(i);
        double envelope = std::exp(-0.5 * (q - c) * (q - c));
        if (envelope < 1e-6) continue;
        cplx v = r.amplitudes[i] / envelope;
        if (!have_ratio) {
            ratio = v;
            have_ratio = true;
        }
        CHECK(std::abs(v - ratio) < 1e-6);
    }
    CHECK(have_ratio);
}

TEST_CASE("interaction picture map: round trip and unitarity") {
    ModeSpec m{0.8, 0.25, 4.0, 1e-3};
    auto g = QuadratureGrid::for_mode_oscillating(m);
    auto s = coherent_state_grid(m, 0.6, g);
    double t = 2.3;
    auto fwd = interaction_picture_map(s, t, PictureMap::to_interaction);
    CHECK(std::abs(fwd.norm() - 1.0) < 1e-8);
    auto back = interaction_picture_map(fwd, t, PictureMap::to_schroedinger);
    cplx ov = inner(s, back);
    CHECK(std::abs(ov) > 1.0 - 1e-10);
}

TEST_CASE("cosine-sum integrals agree with numeric quadrature") {
    CosSum cs;
    cs.terms = {{0.7, 1.3, 0.4}, {0.2, 2.1, -1.0}, {0.1, 1.3, 0.9}};
    double t_end = 5.0;
    int n = 400000;
    double h = t_end / n, ia = 0.0, ia2 = 0.0;
    for (int i = 0; i < n; ++i) {
        double tm = (i + 0.5) * h;
        double v = cs.value(tm);
        ia += v * h;
        ia2 += v * v * h;
    }
    CHECK(cs.integral(t_end) == doctest::Approx(ia).epsilon(1e-8));
    CHECK(cs.integral_sq(t_end) == doctest::Approx(ia2).epsilon(1e-8));
}
