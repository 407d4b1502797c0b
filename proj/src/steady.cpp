#include "lakevort/steady.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lakevort {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

void validate(const SolverParams& p) {
    if (!(p.eps > 0.0)) throw std::invalid_argument("solver: eps must be positive");
    if (!(p.kappa > 0.0)) throw std::invalid_argument("solver: kappa must be positive");
    if (!(p.tol_fix > 0.0)) throw std::invalid_argument("solver: tol_fix must be positive");
    if (!(p.tol_circ > 0.0)) throw std::invalid_argument("solver: tol_circ must be positive");
    if (!(p.damping > 0.0) || p.damping > 1.0)
        throw std::invalid_argument("solver: damping must lie in (0, 1]");
    if (p.max_iter < 1) throw std::invalid_argument("solver: max_iter must be at least 1");
}

// f extended past a tabulated range by its terminal value; identical to f for
// the closed-form kinds.  The profile map only sees this through min(., cap),
// so the extension never changes an admissible profile.
double f_capped(const VorticityFunction& vf, double s) {
    if (vf.kind() == ProfileKind::tabulated && s > vf.s_max()) return vf.value_max();
    return vf.f(s);
}

double f_inv_capped(const VorticityFunction& vf, double t) {
    if (vf.kind() == ProfileKind::tabulated && t > vf.value_max())
        return vf.s_max();
    return vf.f_inv(t);
}

} // namespace

double resolved_lambda(const SolverParams& params, const LakeDomain& dom) {
    validate(params);
    // Below kappa*eps^2/|D|_nu the constraint set is empty; an explicit cap
    // only has to clear that bar (a tight cap is the deliberately clipped
    // regime).  The automatic cap stays far above it.
    const double degenerate = params.kappa * params.eps * params.eps / dom.area_nu;
    if (params.lambda_cap > 0.0) {
        if (!(params.lambda_cap > degenerate))
            throw std::invalid_argument(
                "solver: lambda_cap must exceed kappa*eps^2/|D|_nu = " +
                std::to_string(degenerate));
        return params.lambda_cap;
    }
    const double psi_scale =
        params.kappa * dom.sup_depth / kTwoPi * std::log(1.0 / params.eps);
    double lam = psi_scale > 0.0 ? 50.0 * f_capped(params.vf, psi_scale) : 0.0;
    return std::max(lam, 2.0 * std::max(1.0, degenerate));
}

ScalarField bathtub_profile(const ScalarField& psi_free, double mu, const SolverParams& params,
                            const LakeDomain& dom, double lambda) {
    if (!psi_free.grid.same_layout(dom.grid))
        throw std::invalid_argument("bathtub_profile: field grid does not match domain");
    if (lambda <= 0.0) lambda = resolved_lambda(params, dom);
    const double inv_e2 = 1.0 / (params.eps * params.eps);
    ScalarField zeta(dom.grid, 0.0);
    for (int c : dom.interior) {
        double s = psi_free.values[c] - mu;
        if (s > 0.0) zeta.values[c] = inv_e2 * std::min(f_capped(params.vf, s), lambda);
    }
    return zeta;
}

double profile_circulation(const ScalarField& psi_free, double mu, const SolverParams& params,
                           const LakeDomain& dom, double lambda) {
    if (lambda <= 0.0) lambda = resolved_lambda(params, dom);
    const double inv_e2 = 1.0 / (params.eps * params.eps);
    double s = 0.0;
    for (int c : dom.interior) {
        double a = psi_free.values[c] - mu;
        if (a > 0.0) s += std::min(f_capped(params.vf, a), lambda) * inv_e2 * dom.depth[c];
    }
    return s * dom.grid.h * dom.grid.h;
}

double solve_multiplier(const ScalarField& psi_free, const SolverParams& params,
                        const LakeDomain& dom, double lambda, int* steps) {
    if (!psi_free.grid.same_layout(dom.grid))
        throw std::invalid_argument("solve_multiplier: field grid does not match domain");
    if (lambda <= 0.0) lambda = resolved_lambda(params, dom);

    double psi_min = 1e300, psi_max = -1e300;
    for (int c : dom.interior) {
        psi_min = std::min(psi_min, psi_free.values[c]);
        psi_max = std::max(psi_max, psi_free.values[c]);
    }
    const double target = params.kappa;
    const double t_deg = params.kappa * params.eps * params.eps / dom.area_nu;
    double lo = psi_min - f_inv_capped(params.vf, t_deg) - 1.0;
    double hi = psi_max;

    double c_lo = profile_circulation(psi_free, lo, params, dom, lambda);
    if (c_lo < target)
        throw std::runtime_error(
            "solve_multiplier: bracket failure, maximal circulation " + std::to_string(c_lo) +
            " below kappa = " + std::to_string(target) +
            " (eps too large for this domain and cap)");

    const double tol = params.tol_circ * target;
    for (int k = 1; k <= 200; ++k) {
        double mid = 0.5 * (lo + hi);
        double c = profile_circulation(psi_free, mid, params, dom, lambda);
        if (std::fabs(c - target) <= tol) {
            if (steps) *steps = k;
            return mid;
        }
        if (c > target)
            lo = mid;
        else
            hi = mid;
    }
    throw std::runtime_error("solve_multiplier: bisection failed to meet the circulation "
                             "tolerance in 200 steps");
}

namespace {

// Uniform patch of circulation kappa. Expands the radius when the cap would be
// exceeded, so the start is always admissible.
ScalarField initial_patch(const SolverParams& params, const LakeDomain& dom, double lambda) {
    const Grid& g = dom.grid;
    Vec2 center = params.init.center;
    if (std::isnan(center.x) || std::isnan(center.y)) {
        DeepSet ds = deep_set(dom);
        Vec2 centroid{0.0, 0.0};
        for (const Vec2& p : ds.points) centroid = centroid + p;
        centroid = (1.0 / static_cast<double>(ds.points.size())) * centroid;
        double best = 1e300;
        for (const Vec2& p : ds.points) {
            double d = dist(p, centroid);
            if (d < best) {
                best = d;
                center = p;
            }
        }
    }

    double r = params.init.radius;
    if (r <= 0.0) {
        int ci, cj;
        g.locate(center, ci, cj);
        double b_c = dom.is_interior(ci, cj) ? dom.depth[g.idx(ci, cj)] : dom.sup_depth;
        double r_a = 4.0 * params.eps * std::sqrt(params.kappa / (3.14159265358979323846 * b_c));
        double b_inf = b_c;
        for (int c : dom.interior) {
            Vec2 p = g.center(c % g.nx, c / g.nx);
            if (dist(p, center) <= r_a) b_inf = std::min(b_inf, dom.depth[c]);
        }
        r = 4.0 * params.eps * std::sqrt(params.kappa / (3.14159265358979323846 * b_inf));
    }

    const double cap = lambda / (params.eps * params.eps);
    for (;;) {
        std::vector<int> patch;
        for (int c : dom.interior) {
            Vec2 p = g.center(c % g.nx, c / g.nx);
            if (dist(p, center) <= r) patch.push_back(c);
        }
        if (patch.empty()) {
            // Radius below the grid scale: take the nearest interior cell.
            double best = 1e300;
            int best_c = dom.interior.front();
            for (int c : dom.interior) {
                double d = dist(g.center(c % g.nx, c / g.nx), center);
                if (d < best) {
                    best = d;
                    best_c = c;
                }
            }
            patch.push_back(best_c);
        }
        double nu_patch = 0.0;
        for (int c : patch) nu_patch += dom.depth[c];
        nu_patch *= g.h * g.h;
        double val = params.kappa / nu_patch;
        if (val <= cap) {
            ScalarField zeta(g, 0.0);
            for (int c : patch) zeta.values[c] = val;
            return zeta;
        }
        if (r > dom.diameter)
            throw std::runtime_error("initial_patch: cannot build an admissible start "
                                     "(cap too tight for this domain)");
        r *= 1.5;
    }
}

} // namespace

SteadyState fixed_point_solve(const SolverParams& params, const LakeDomain& dom,
                              const EllipticOperator& op) {
    validate(params);
    if (!op.domain().grid.same_layout(dom.grid))
        throw std::invalid_argument("fixed_point_solve: operator assembled on another grid");
    const double lambda = resolved_lambda(params, dom);
    const double kappa = params.kappa;

    SteadyState st;
    st.eps = params.eps;
    st.lambda_used = lambda;
    if (!params.init_zeta.values.empty()) {
        if (!params.init_zeta.grid.same_layout(dom.grid))
            throw std::invalid_argument("fixed_point_solve: init_zeta grid mismatch");
        st.zeta = params.init_zeta;
    } else {
        st.zeta = initial_patch(params, dom, lambda);
    }

    ScalarField psi_free;
    bool have_psi = false;
    double e_prev = 0.0;
    bool have_e = false;
    double res = 0.0;
    int iters = 0;
    bool converged = false;

    for (int it = 1; it <= params.max_iter; ++it) {
        iters = it;
        psi_free = op.apply_K(st.zeta, {params.tol_pcg, 0}, have_psi ? &psi_free : nullptr);
        have_psi = true;
        double mu = solve_multiplier(psi_free, params, dom, lambda);

        double e_kin = energy(dom, st.zeta, psi_free);
        double e_pen = penalty(params.vf, st.zeta, params.eps, dom);
        double e_tot = e_kin - e_pen;

        ScalarField znew = bathtub_profile(psi_free, mu, params, dom, lambda);
        if (params.damping < 1.0) {
            const double th = params.damping;
            for (int c : dom.interior)
                znew.values[c] = (1.0 - th) * st.zeta.values[c] + th * znew.values[c];
        }

        double l1 = 0.0;
        for (int c : dom.interior)
            l1 += std::fabs(znew.values[c] - st.zeta.values[c]) * dom.depth[c];
        l1 *= dom.grid.h * dom.grid.h;
        res = l1;

        double circ_new = integrate_nu(dom, znew);
        st.history.push_back({it, mu, e_kin, e_pen, e_tot, l1, circ_new});

        bool e_flat = have_e && std::fabs(e_tot - e_prev) <= 1e-8 * std::max(std::fabs(e_tot), 1e-300);
        bool done = l1 <= params.tol_fix * kappa && (l1 == 0.0 || e_flat);
        e_prev = e_tot;
        have_e = true;
        st.mu = mu;
        st.zeta = std::move(znew);
        if (done) {
            converged = true;
            break;
        }
    }

    // Close the state consistently on the final iterate: recompute the stream
    // function and multiplier for the returned zeta (a no-op at an exact fixed
    // point thanks to the warm-started solve).
    st.psi_free = op.apply_K(st.zeta, {params.tol_pcg, 0}, have_psi ? &psi_free : nullptr);
    st.mu = solve_multiplier(st.psi_free, params, dom, lambda);
    st.psi = ScalarField(dom.grid, 0.0);
    for (int c : dom.interior) st.psi.values[c] = st.psi_free.values[c] - st.mu;

    st.energy_E = energy(dom, st.zeta, st.psi_free);
    st.penalty_F = penalty(params.vf, st.zeta, params.eps, dom);
    st.energy_total = st.energy_E - st.penalty_F;
    st.circ = integrate_nu(dom, st.zeta);
    st.iterations = iters;
    st.fix_residual = res;
    st.converged = converged;
    st.kkt_max_violation = kkt_residual(st, params, dom);
    return st;
}

double patch_measure(const SteadyState& state, const SolverParams& params, const LakeDomain& dom) {
    const double lambda =
        state.lambda_used > 0.0 ? state.lambda_used : resolved_lambda(params, dom);
    const double thresh = (1.0 - 1e-9) * lambda / (params.eps * params.eps);
    double s = 0.0;
    for (int c : dom.interior)
        if (state.zeta.values[c] >= thresh) s += dom.depth[c];
    return s * dom.grid.h * dom.grid.h;
}

double kkt_residual(const SteadyState& state, const SolverParams& params, const LakeDomain& dom) {
    const double lambda =
        state.lambda_used > 0.0 ? state.lambda_used : resolved_lambda(params, dom);
    const double e2 = params.eps * params.eps;
    const double cap = lambda / e2;
    const double thresh = (1.0 - 1e-9) * cap;
    const double s_cap = f_inv_capped(params.vf, lambda);
    double worst = 0.0;
    for (int c : dom.interior) {
        double z = state.zeta.values[c];
        double p = state.psi.values[c];
        double v;
        if (z <= 0.0)
            v = std::max(0.0, p);
        else if (z >= thresh)
            v = std::max(0.0, s_cap - p);
        else
            v = std::fabs(p - f_inv_capped(params.vf, e2 * z));
        worst = std::max(worst, v);
    }
    return worst;
}

} // namespace lakevort
