#include "lakevort/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "lakevort/asymptotics.hpp"

namespace lakevort {

namespace {

double read_or_zero(const ScalarField& f, const Grid& g, int i, int j) {
    return g.in_bounds(i, j) ? f.values[g.idx(i, j)] : 0.0;
}

// Bilinear interpolation on cell-centered data, reading 0 beyond the grid.
// The result is a convex combination of the four stencil values, and is
// clamped to their range besides, so no new extrema can appear.
double bilinear(const ScalarField& f, const Grid& g, Vec2 p) {
    double fx = (p.x - g.origin.x) / g.h - 0.5;
    double fy = (p.y - g.origin.y) / g.h - 0.5;
    int i0 = static_cast<int>(std::floor(fx));
    int j0 = static_cast<int>(std::floor(fy));
    double wx = fx - i0, wy = fy - j0;
    double v00 = read_or_zero(f, g, i0, j0);
    double v10 = read_or_zero(f, g, i0 + 1, j0);
    double v01 = read_or_zero(f, g, i0, j0 + 1);
    double v11 = read_or_zero(f, g, i0 + 1, j0 + 1);
    double v = (1.0 - wx) * (1.0 - wy) * v00 + wx * (1.0 - wy) * v10 +
               (1.0 - wx) * wy * v01 + wx * wy * v11;
    double lo = std::min(std::min(v00, v10), std::min(v01, v11));
    double hi = std::max(std::max(v00, v10), std::max(v01, v11));
    return std::min(std::max(v, lo), hi);
}

double lp_distance(const ScalarField& a, const ScalarField& b, double p,
                   const LakeDomain& dom) {
    double s = 0.0;
    for (int c : dom.interior) {
        double d = std::fabs(a.values[c] - b.values[c]);
        double m = p == 1.0 ? d : (p == 2.0 ? d * d : std::pow(d, p));
        s += m * dom.depth[c];
    }
    s *= dom.grid.h * dom.grid.h;
    return p == 1.0 ? s : std::pow(s, 1.0 / p);
}

} // namespace

VectorField velocity_from(const ScalarField& zeta, const EllipticOperator& op,
                          const LakeDomain& dom, const ScalarField* psi_guess,
                          ScalarField* psi_out) {
    const Grid& g = dom.grid;
    ScalarField psi = op.apply_K(zeta, {}, psi_guess);
    VectorField v;
    v.x = ScalarField(g);
    v.y = ScalarField(g);
    const double inv2h = 1.0 / (2.0 * g.h);
    for (int c : dom.interior) {
        int i = c % g.nx, j = c / g.nx;
        double dpx = (read_or_zero(psi, g, i + 1, j) - read_or_zero(psi, g, i - 1, j)) * inv2h;
        double dpy = (read_or_zero(psi, g, i, j + 1) - read_or_zero(psi, g, i, j - 1)) * inv2h;
        v.x.values[c] = dpy / dom.depth[c];
        v.y.values[c] = -dpx / dom.depth[c];
    }
    if (psi_out) *psi_out = std::move(psi);
    return v;
}

double max_speed(const VectorField& v, const LakeDomain& dom) {
    double m = 0.0;
    for (int c : dom.interior)
        m = std::max(m, std::hypot(v.x.values[c], v.y.values[c]));
    return m;
}

TransportState make_transport_state(const ScalarField& zeta0, const EllipticOperator& op,
                                    const LakeDomain& dom) {
    TransportState st;
    st.t = 0.0;
    st.zeta = zeta0;
    st.velocity = velocity_from(zeta0, op, dom, nullptr, &st.psi);
    return st;
}

TransportState step(const TransportState& state, double dt, const EllipticOperator& op,
                    const LakeDomain& dom) {
    if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
    const Grid& g = dom.grid;
    double vmax = max_speed(state.velocity, dom);
    double cfl = dt * vmax / g.h;
    if (cfl > 0.9 * (1.0 + 1e-12))
        throw std::runtime_error("step: advective CFL number " + std::to_string(cfl) +
                                 " exceeds 0.9; shrink dt");

    TransportState next;
    next.t = state.t + dt;
    next.cfl = cfl;
    next.zeta = ScalarField(g);
    for (int c : dom.interior) {
        int i = c % g.nx, j = c / g.nx;
        Vec2 p = g.center(i, j);
        // Backward midpoint trace in the frozen velocity field.
        Vec2 pm{p.x - 0.5 * dt * state.velocity.x.values[c],
                p.y - 0.5 * dt * state.velocity.y.values[c]};
        double vmx = bilinear(state.velocity.x, g, pm);
        double vmy = bilinear(state.velocity.y, g, pm);
        Vec2 pd{p.x - dt * vmx, p.y - dt * vmy};
        next.zeta.values[c] = bilinear(state.zeta, g, pd);
    }
    next.velocity = velocity_from(next.zeta, op, dom, &state.psi, &next.psi);
    return next;
}

std::vector<double> distribution_function(const ScalarField& zeta, const LakeDomain& dom,
                                          const std::vector<double>& levels) {
    for (std::size_t k = 1; k < levels.size(); ++k)
        if (levels[k] < levels[k - 1])
            throw std::invalid_argument("distribution_function: levels must be sorted");
    std::vector<double> lambda(levels.size(), 0.0);
    for (int c : dom.interior) {
        double z = zeta.values[c];
        // Count nu-measure into every level below z.
        auto it = std::lower_bound(levels.begin(), levels.end(), z);
        std::size_t n_below = static_cast<std::size_t>(it - levels.begin());
        for (std::size_t k = 0; k < n_below; ++k) lambda[k] += dom.depth[c];
    }
    double h2 = dom.grid.h * dom.grid.h;
    for (double& l : lambda) l *= h2;
    return lambda;
}

ScalarField apply_perturbation(const ScalarField& zeta, const Perturbation& pert,
                               const SteadyState& steady, const LakeDomain& dom) {
    if (!zeta.grid.same_layout(dom.grid))
        throw std::invalid_argument("apply_perturbation: field grid does not match domain");
    if (pert.kind == PerturbationKind::none) return zeta;

    const Grid& g = dom.grid;
    double kappa0 = integrate_nu(dom, zeta);
    if (!(kappa0 > 0.0))
        throw std::invalid_argument("apply_perturbation: field has no circulation");

    ScalarField out(g);
    switch (pert.kind) {
    case PerturbationKind::shift:
        for (int c : dom.interior) {
            int i = c % g.nx, j = c / g.nx;
            out.values[c] = read_or_zero(zeta, g, i - pert.shift_x, j - pert.shift_y);
        }
        break;
    case PerturbationKind::amplitude: {
        double cap = steady.lambda_used > 0.0 && steady.eps > 0.0
                         ? steady.lambda_used / (steady.eps * steady.eps)
                         : 0.0;
        for (int c : dom.interior) {
            double v = (1.0 + pert.delta) * zeta.values[c];
            if (cap > 0.0) v = std::min(v, cap);
            out.values[c] = v;
        }
        break;
    }
    case PerturbationKind::noise: {
        std::mt19937_64 rng(pert.seed);
        std::uniform_real_distribution<double> unif(1.0 - pert.noise_level,
                                                    1.0 + pert.noise_level);
        for (int c : dom.interior) out.values[c] = zeta.values[c] * unif(rng);
        break;
    }
    case PerturbationKind::none:
        break;
    }

    double circ = integrate_nu(dom, out);
    if (!(circ > 0.0))
        throw std::invalid_argument("apply_perturbation: perturbation removed all circulation");
    double scale = kappa0 / circ;
    for (int c : dom.interior) out.values[c] *= scale;
    return out;
}

double eddy_turnover(const SteadyState& steady, const EllipticOperator& op,
                     const LakeDomain& dom) {
    VectorField v = velocity_from(steady.zeta, op, dom, &steady.psi_free);
    double vmax = max_speed(v, dom);
    if (!(vmax > 0.0)) throw std::invalid_argument("eddy_turnover: zero velocity field");
    return support_diameter(steady.zeta, dom) / vmax;
}

StabilityReport run_stability_experiment(const SteadyState& steady, const Perturbation& pert,
                                         double horizon_T, double dt,
                                         const std::vector<double>& p_list,
                                         const EllipticOperator& op, const LakeDomain& dom,
                                         int record_every) {
    if (!steady.converged)
        throw std::invalid_argument("run_stability_experiment: steady state not converged");
    if (!(horizon_T > 0.0) || !(dt > 0.0))
        throw std::invalid_argument("run_stability_experiment: horizon and dt must be positive");
    if (p_list.empty())
        throw std::invalid_argument("run_stability_experiment: empty norm list");
    for (double p : p_list)
        if (p < 1.0)
            throw std::invalid_argument("run_stability_experiment: norms need p >= 1");
    if (record_every < 1)
        throw std::invalid_argument("run_stability_experiment: record_every must be >= 1");

    StabilityReport rep;
    rep.p_list = p_list;
    rep.lp_series.resize(p_list.size());
    rep.note = "staircase geometry: smooth-boundary and smooth-depth hypotheses are "
               "approximated on the masked grid";
    rep.eddy_turnover = eddy_turnover(steady, op, dom);

    int nsteps = static_cast<int>(std::ceil(horizon_T / dt));
    rep.dt = horizon_T / nsteps;

    ScalarField zeta0 = apply_perturbation(steady.zeta, pert, steady, dom);
    TransportState state;
    state.zeta = zeta0;
    state.velocity = velocity_from(zeta0, op, dom, &steady.psi_free, &state.psi);

    double E0 = energy(dom, zeta0, state.psi);
    double Eref = std::fabs(E0) > 0.0 ? std::fabs(E0) : 1.0;
    double max0 = 0.0;
    for (int c : dom.interior) max0 = std::max(max0, zeta0.values[c]);
    std::vector<double> levels;
    for (int k = 1; k <= 31; ++k) levels.push_back(max0 * k / 32.0);
    std::vector<double> lambda0 = distribution_function(zeta0, dom, levels);

    auto record = [&](const TransportState& st) {
        rep.times.push_back(st.t);
        for (std::size_t k = 0; k < p_list.size(); ++k)
            rep.lp_series[k].push_back(lp_distance(st.zeta, steady.zeta, p_list[k], dom));
        rep.energy_drift.push_back(std::fabs(energy(dom, st.zeta, st.psi) - E0) / Eref);
        std::vector<double> lam = distribution_function(st.zeta, dom, levels);
        double dd = 0.0;
        for (std::size_t k = 0; k < lam.size(); ++k)
            dd = std::max(dd, std::fabs(lam[k] - lambda0[k]));
        rep.dist_drift.push_back(dd);
        rep.circulation.push_back(integrate_nu(dom, st.zeta));
        rep.cfl.push_back(st.cfl);
    };

    record(state);
    rep.completed = true;
    for (int k = 1; k <= nsteps; ++k) {
        try {
            state = step(state, rep.dt, op, dom);
        } catch (const std::exception& e) {
            rep.completed = false;
            rep.note += std::string("; aborted at t = ") + std::to_string(state.t) + ": " +
                        e.what();
            break;
        }
        rep.steps_taken = k;
        if (k % record_every == 0 || k == nsteps) record(state);
    }

    rep.final_zeta = state.zeta;
    rep.max_lp.assign(p_list.size(), 0.0);
    for (std::size_t k = 0; k < p_list.size(); ++k)
        for (double v : rep.lp_series[k]) rep.max_lp[k] = std::max(rep.max_lp[k], v);
    for (double v : rep.energy_drift) rep.max_energy_drift = std::max(rep.max_energy_drift, v);
    for (double v : rep.dist_drift) rep.max_dist_drift = std::max(rep.max_dist_drift, v);
    return rep;
}

} // namespace lakevort
