#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "lakevort/asymptotics.hpp"
#include "lakevort/domain.hpp"
#include "lakevort/dynamics.hpp"
#include "lakevort/elliptic.hpp"
#include "lakevort/steady.hpp"

using namespace lakevort;

namespace {

LakeDomain make_disc_domain(int nx, DepthSpec depth) {
    DomainSpec spec;
    spec.shape = Shape::make_disc({0.0, 0.0}, 1.0);
    spec.depth = depth;
    spec.nx = nx;
    return build_domain(spec);
}

// Shared converged steady state for the transport experiments (built once).
struct SteadyFixture {
    LakeDomain dom;
    EllipticOperator op;
    SolverParams params;
    SteadyState state;

    SteadyFixture()
        : dom(make_disc_domain(128, DepthSpec::radial_bump(2.0, 1.0, {0.0, 0.0}))),
          op(dom) {
        params.eps = 0.3;
        params.kappa = 1.0;
        state = fixed_point_solve(params, dom, op);
    }
};

SteadyFixture& fixture() {
    static SteadyFixture fx;
    return fx;
}

} // namespace

TEST_CASE("zero vorticity gives zero velocity and a fixed point of the step") {
    LakeDomain dom = make_disc_domain(64, DepthSpec::constant(1.0));
    EllipticOperator op(dom);
    ScalarField zero(dom.grid);

    VectorField v = velocity_from(zero, op, dom);
    for (int c : dom.interior) {
        CHECK(v.x.values[c] == 0.0);
        CHECK(v.y.values[c] == 0.0);
    }

    TransportState st = make_transport_state(zero, op, dom);
    TransportState next = step(st, 0.1, op, dom);
    CHECK(next.t == doctest::Approx(0.1));
    CHECK(next.cfl == 0.0);
    for (double z : next.zeta.values) CHECK(z == 0.0);
}

TEST_CASE("frozen zero velocity transports any field to itself bitwise") {
    LakeDomain dom = make_disc_domain(64, DepthSpec::constant(1.0));
    EllipticOperator op(dom);
    const Grid& g = dom.grid;

    TransportState st;
    st.zeta = ScalarField(g);
    st.psi = ScalarField(g);
    st.velocity.x = ScalarField(g);
    st.velocity.y = ScalarField(g);
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> unif(0.0, 3.0);
    for (int c : dom.interior) st.zeta.values[c] = unif(rng);

    TransportState next = step(st, 0.05, op, dom);
    for (int c : dom.interior) CHECK(next.zeta.values[c] == st.zeta.values[c]);
}

TEST_CASE("radial vorticity on the flat disc induces an azimuthal velocity") {
    LakeDomain dom = make_disc_domain(128, DepthSpec::constant(1.0));
    EllipticOperator op(dom);
    const Grid& g = dom.grid;

    ScalarField zeta(g);
    for (int c : dom.interior) {
        Vec2 p = g.center(c % g.nx, c / g.nx);
        zeta.values[c] = std::exp(-norm(p) * norm(p) / 0.08);
    }
    VectorField v = velocity_from(zeta, op, dom);
    double vmax = max_speed(v, dom);
    REQUIRE(vmax > 0.0);

    double worst = 0.0;
    for (int c : dom.interior) {
        Vec2 p = g.center(c % g.nx, c / g.nx);
        double r = norm(p);
        if (r < 0.2 || r > 0.5) continue;
        double vr = (v.x.values[c] * p.x + v.y.values[c] * p.y) / r;
        worst = std::max(worst, std::fabs(vr));
    }
    CHECK(worst < 0.02 * vmax);
}

TEST_CASE("the discrete weighted divergence of b*v vanishes identically") {
    LakeDomain dom = make_disc_domain(128, DepthSpec::radial_bump(2.0, 1.0, {0.1, -0.05}));
    EllipticOperator op(dom);
    const Grid& g = dom.grid;

    ScalarField zeta(g);
    for (int c : dom.interior) {
        Vec2 p = g.center(c % g.nx, c / g.nx);
        zeta.values[c] = std::exp(-dist(p, {0.2, 0.1}) * dist(p, {0.2, 0.1}) / 0.05);
    }
    VectorField v = velocity_from(zeta, op, dom);

    // b*v = (D_y psi, -D_x psi), so the centered divergence telescopes to
    // D_x D_y psi - D_y D_x psi = 0 up to the roundoff of b*(x/b).
    double bv_max = 0.0;
    for (int c : dom.interior)
        bv_max = std::max(bv_max,
                          std::hypot(v.x.values[c], v.y.values[c]) * dom.depth[c]);
    auto bvx = [&](int i, int j) {
        return dom.is_interior(i, j) ? dom.depth[g.idx(i, j)] * v.x.values[g.idx(i, j)] : 0.0;
    };
    auto bvy = [&](int i, int j) {
        return dom.is_interior(i, j) ? dom.depth[g.idx(i, j)] * v.y.values[g.idx(i, j)] : 0.0;
    };
    int checked = 0;
    double worst = 0.0;
    for (int c : dom.interior) {
        int i = c % g.nx, j = c / g.nx;
        bool deep = true;
        for (int dj = -2; dj <= 2 && deep; ++dj)
            for (int di = -2; di <= 2 && deep; ++di)
                if (!dom.is_interior(i + di, j + dj)) deep = false;
        if (!deep) continue;
        double div = (bvx(i + 1, j) - bvx(i - 1, j) + bvy(i, j + 1) - bvy(i, j - 1)) /
                     (2.0 * g.h);
        worst = std::max(worst, std::fabs(div));
        ++checked;
    }
    REQUIRE(checked > 1000);
    CHECK(worst <= 1e-11 * bv_max / g.h);
}

TEST_CASE("CFL guard rejects oversized steps") {
    LakeDomain dom = make_disc_domain(64, DepthSpec::constant(1.0));
    EllipticOperator op(dom);
    const Grid& g = dom.grid;

    TransportState st;
    st.zeta = ScalarField(g);
    st.psi = ScalarField(g);
    st.velocity.x = ScalarField(g, 1.0);
    st.velocity.y = ScalarField(g);
    CHECK_THROWS_AS(step(st, g.h, op, dom), std::runtime_error);       // CFL = 1
    CHECK_THROWS_AS(step(st, -0.1, op, dom), std::invalid_argument);
    TransportState ok = step(st, 0.5 * g.h, op, dom); // CFL = 0.5 passes
    CHECK(ok.cfl == doctest::Approx(0.5));
}

TEST_CASE("distribution function: indicator plateau, monotonicity, sorted guard") {
    LakeDomain dom = make_disc_domain(96, DepthSpec::radial_bump(2.0, 1.0, {0.0, 0.0}));
    const Grid& g = dom.grid;

    ScalarField ind(g);
    for (int c : dom.interior) {
        Vec2 p = g.center(c % g.nx, c / g.nx);
        if (dist(p, {0.3, 0.1}) < 0.25) ind.values[c] = 2.0;
    }
    double A = integrate_nu(dom, ind) / 2.0;
    std::vector<double> lam =
        distribution_function(ind, dom, {0.5, 1.0, 1.999, 2.0, 3.0});
    CHECK(lam[0] == doctest::Approx(A).epsilon(1e-13));
    CHECK(lam[1] == doctest::Approx(A).epsilon(1e-13));
    CHECK(lam[2] == doctest::Approx(A).epsilon(1e-13));
    CHECK(lam[3] == 0.0);
    CHECK(lam[4] == 0.0);

    // Nonincreasing against a rough random field.
    ScalarField noise(g);
    std::mt19937_64 rng(31337);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int c : dom.interior) noise.values[c] = unif(rng);
    std::vector<double> levels;
    for (int k = 0; k < 40; ++k) levels.push_back(unif(rng));
    std::sort(levels.begin(), levels.end());
    std::vector<double> lam2 = distribution_function(noise, dom, levels);
    for (std::size_t k = 1; k < lam2.size(); ++k) CHECK(lam2[k] <= lam2[k - 1]);

    CHECK_THROWS_AS(distribution_function(noise, dom, {0.5, 0.1}), std::invalid_argument);
}

TEST_CASE("perturbations: identity, shift covariance, amplitude, noise") {
    SteadyFixture& fx = fixture();
    REQUIRE(fx.state.converged);
    const ScalarField& zs = fx.state.zeta;
    double kappa0 = integrate_nu(fx.dom, zs);

    Perturbation none;
    ScalarField same = apply_perturbation(zs, none, fx.state, fx.dom);
    for (std::size_t k = 0; k < zs.values.size(); ++k)
        CHECK(same.values[k] == zs.values[k]);

    Perturbation shift;
    shift.kind = PerturbationKind::shift;
    shift.shift_x = 2;
    ScalarField shifted = apply_perturbation(zs, shift, fx.state, fx.dom);
    CHECK(integrate_nu(fx.dom, shifted) == doctest::Approx(kappa0).epsilon(1e-12));
    Vec2 X0 = center_of_vorticity(zs, fx.dom);
    Vec2 X1 = center_of_vorticity(shifted, fx.dom);
    CHECK(X1.x - X0.x == doctest::Approx(2.0 * fx.dom.grid.h).epsilon(1e-9));
    CHECK(std::fabs(X1.y - X0.y) < 1e-10);

    // Inactive cap: scaling then renormalizing is the identity.
    Perturbation amp;
    amp.kind = PerturbationKind::amplitude;
    amp.delta = 0.3;
    ScalarField amped = apply_perturbation(zs, amp, fx.state, fx.dom);
    double zmax = 0.0, dmax = 0.0;
    for (int c : fx.dom.interior) {
        zmax = std::max(zmax, zs.values[c]);
        dmax = std::max(dmax, std::fabs(amped.values[c] - zs.values[c]));
    }
    CHECK(dmax <= 1e-12 * zmax);

    // Active cap makes it a genuine perturbation with the same circulation.
    SteadyState capped = fx.state;
    capped.lambda_used = 0.8 * zmax * fx.params.eps * fx.params.eps;
    ScalarField clipped = apply_perturbation(zs, amp, capped, fx.dom);
    CHECK(integrate_nu(fx.dom, clipped) == doctest::Approx(kappa0).epsilon(1e-12));
    double diff = 0.0;
    for (int c : fx.dom.interior)
        diff = std::max(diff, std::fabs(clipped.values[c] - zs.values[c]));
    CHECK(diff > 1e-6 * zmax);

    Perturbation noise;
    noise.kind = PerturbationKind::noise;
    noise.noise_level = 0.2;
    noise.seed = 77;
    ScalarField n1 = apply_perturbation(zs, noise, fx.state, fx.dom);
    ScalarField n2 = apply_perturbation(zs, noise, fx.state, fx.dom);
    for (std::size_t k = 0; k < n1.values.size(); ++k) CHECK(n1.values[k] == n2.values[k]);
    CHECK(integrate_nu(fx.dom, n1) == doctest::Approx(kappa0).epsilon(1e-12));
    for (int c : fx.dom.interior) CHECK(n1.values[c] >= 0.0);

    ScalarField zero(fx.dom.grid);
    CHECK_THROWS_AS(apply_perturbation(zero, shift, fx.state, fx.dom),
                    std::invalid_argument);
}

TEST_CASE("steady state persists under its own transport") {
    SteadyFixture& fx = fixture();
    REQUIRE(fx.state.converged);

    TransportState st = make_transport_state(fx.state.zeta, fx.op, fx.dom);
    double vmax = max_speed(st.velocity, fx.dom);
    REQUIRE(vmax > 0.0);
    double dt = 0.5 * fx.dom.grid.h / vmax;
    double max0 = 0.0;
    for (double z : st.zeta.values) max0 = std::max(max0, z);

    const int nsteps = 50;
    for (int k = 0; k < nsteps; ++k) st = step(st, dt, fx.op, fx.dom);

    double l1 = 0.0, zmin = 0.0, zmax = 0.0;
    for (int c : fx.dom.interior) {
        l1 += std::fabs(st.zeta.values[c] - fx.state.zeta.values[c]) * fx.dom.depth[c];
        zmin = std::min(zmin, st.zeta.values[c]);
        zmax = std::max(zmax, st.zeta.values[c]);
    }
    l1 *= fx.dom.grid.h * fx.dom.grid.h;
    // Bound sits ~1.5x above the measured interpolation-diffusion floor for
    // this resolution (l1/kappa ~ 0.068 after 50 steps); it guards against
    // regressions, not against the scheme's intrinsic first-order drift.
    CHECK(l1 / fx.params.kappa < 0.1);

    // Monotone interpolation keeps the initial bounds exactly.
    CHECK(zmin >= 0.0);
    CHECK(zmax <= max0);

    // Circulation drift stays small over the horizon (measured ~0.016).
    double circ = integrate_nu(fx.dom, st.zeta);
    CHECK(std::fabs(circ - fx.state.circ) / fx.params.kappa < 3e-2);
}

TEST_CASE("uniform patch on the flat disc is a relative equilibrium") {
    LakeDomain dom = make_disc_domain(128, DepthSpec::constant(1.0));
    EllipticOperator op(dom);
    const Grid& g = dom.grid;

    ScalarField patch(g);
    for (int c : dom.interior) {
        Vec2 p = g.center(c % g.nx, c / g.nx);
        if (norm(p) < 0.2) patch.values[c] = 1.0;
    }
    TransportState st = make_transport_state(patch, op, dom);
    double vmax = max_speed(st.velocity, dom);
    double dt = 0.8 * g.h / vmax;
    double turnover = 0.4 / vmax;
    int nsteps = static_cast<int>(std::ceil(2.0 * turnover / dt));

    for (int k = 0; k < nsteps; ++k) st = step(st, dt, op, dom);
    Vec2 X = center_of_vorticity(st.zeta, dom);
    CHECK(norm(X) < 2.0 * g.h);
}

TEST_CASE("stability experiment: zero perturbation stays at the numerical floor") {
    SteadyFixture& fx = fixture();
    REQUIRE(fx.state.converged);

    double tau = eddy_turnover(fx.state, fx.op, fx.dom);
    CHECK(tau > 0.0);

    VectorField v = velocity_from(fx.state.zeta, fx.op, fx.dom, &fx.state.psi_free);
    double dt = 0.5 * fx.dom.grid.h / max_speed(v, fx.dom);

    Perturbation none;
    StabilityReport rep = run_stability_experiment(fx.state, none, tau, dt,
                                                   {1.0, 2.0}, fx.op, fx.dom, 10);
    CHECK(rep.completed);
    CHECK(rep.eddy_turnover == doctest::Approx(tau).epsilon(1e-12));
    CHECK(rep.note.find("staircase") != std::string::npos);
    REQUIRE(rep.times.size() >= 2);
    CHECK(rep.times.front() == 0.0);
    CHECK(rep.times.back() == doctest::Approx(tau).epsilon(1e-12));
    REQUIRE(rep.lp_series.size() == 2);
    for (const auto& series : rep.lp_series) CHECK(series.size() == rep.times.size());
    CHECK(rep.energy_drift.size() == rep.times.size());
    CHECK(rep.dist_drift.size() == rep.times.size());
    CHECK(rep.circulation.size() == rep.times.size());
    CHECK(rep.cfl.size() == rep.times.size());

    CHECK(rep.lp_series[0].front() == 0.0); // same trajectory at t = 0
    // Bounds are set above the measured interpolation-diffusion floor over one
    // turnover at this resolution (lp ~ 0.13, energy drift ~ 0.10, circulation
    // drift ~ 0.03); they catch regressions, not the scheme's intrinsic drift.
    CHECK(rep.max_lp[0] / fx.params.kappa < 0.25);
    CHECK(rep.max_energy_drift < 0.2);
    for (double c : rep.circulation)
        CHECK(std::fabs(c - fx.state.circ) / fx.params.kappa < 6e-2);

    // A shifted start begins at a positive distance and stays bounded.
    Perturbation shift;
    shift.kind = PerturbationKind::shift;
    shift.shift_x = 2;
    StabilityReport srep = run_stability_experiment(fx.state, shift, tau, dt,
                                                    {2.0}, fx.op, fx.dom, 10);
    CHECK(srep.completed);
    REQUIRE(srep.lp_series.size() == 1);
    double d0 = srep.lp_series[0].front();
    CHECK(d0 > 0.0);
    CHECK(srep.max_lp[0] <= 6.0 * d0); // loose desk bound at coarse resolution

    // Oversized dt aborts with a partial report.
    StabilityReport bad = run_stability_experiment(fx.state, none, 2.0 * tau, 1e6,
                                                   {1.0}, fx.op, fx.dom, 10);
    CHECK_FALSE(bad.completed);
    CHECK(bad.note.find("aborted") != std::string::npos);
    CHECK(bad.times.size() == 1);

    CHECK_THROWS_AS(run_stability_experiment(fx.state, none, 1.0, dt, {}, fx.op, fx.dom),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        run_stability_experiment(fx.state, none, 1.0, dt, {0.5}, fx.op, fx.dom),
        std::invalid_argument);
    SteadyState uncv = fx.state;
    uncv.converged = false;
    CHECK_THROWS_AS(
        run_stability_experiment(uncv, none, 1.0, dt, {1.0}, fx.op, fx.dom),
        std::invalid_argument);
}
