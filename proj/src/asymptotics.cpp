#include "lakevort/asymptotics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace lakevort {

namespace {

double field_max(const ScalarField& zeta, const LakeDomain& dom) {
    double m = 0.0;
    for (int c : dom.interior) m = std::max(m, zeta.values[c]);
    return m;
}

double active_threshold(const ScalarField& zeta, const LakeDomain& dom, double threshold_rel) {
    if (threshold_rel < 0.0 || threshold_rel >= 1.0)
        throw std::invalid_argument("support threshold must lie in [0, 1)");
    return threshold_rel * field_max(zeta, dom);
}

// Least squares for y ~ sum_k coef[k]*regressors[k] via column-pivoted QR.
Eigen::VectorXd least_squares(const std::vector<std::vector<double>>& regressors,
                              const std::vector<double>& y) {
    const int n = static_cast<int>(y.size());
    const int k = static_cast<int>(regressors.size());
    Eigen::MatrixXd A(n, k);
    Eigen::VectorXd b(n);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < k; ++c) A(r, c) = regressors[c][r];
        b(r) = y[r];
    }
    return A.colPivHouseholderQr().solve(b);
}

void check_sweep(const std::vector<SweepRecord>& records, std::size_t min_count,
                 const char* what) {
    if (records.size() < min_count)
        throw std::invalid_argument(std::string(what) + ": needs at least " +
                                    std::to_string(min_count) + " sweep records");
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (!(records[i].eps > 0.0))
            throw std::invalid_argument(std::string(what) + ": eps must be positive");
        for (std::size_t j = i + 1; j < records.size(); ++j)
            if (records[i].eps == records[j].eps)
                throw std::invalid_argument(std::string(what) + ": eps values must be distinct");
    }
}

// Shared least-squares machinery for the multiplier and energy growth laws:
// two-parameter fit y = a*ln(1/eps) + c, plus a three-parameter variant with an
// extra ln(ln(1/eps)) regressor when every eps is below 1 (so the inner log is
// defined) and the sweep is long enough to leave a residual degree of freedom.
ScalingFit fit_scaling(const std::vector<SweepRecord>& records, double target_slope,
                       double (*value)(const SweepRecord&), const char* what) {
    check_sweep(records, 4, what);
    const int n = static_cast<int>(records.size());
    std::vector<double> lx(n), y(n), ones(n, 1.0);
    for (int i = 0; i < n; ++i) {
        lx[i] = std::log(1.0 / records[i].eps);
        y[i] = value(records[i]);
    }

    ScalingFit fit;
    fit.target_slope = target_slope;
    Eigen::VectorXd c2 = least_squares({lx, ones}, y);
    fit.slope = c2(0);
    fit.intercept = c2(1);
    for (int i = 0; i < n; ++i)
        fit.max_residual =
            std::max(fit.max_residual, std::fabs(fit.slope * lx[i] + fit.intercept - y[i]));
    fit.rel_slope_dev = target_slope != 0.0
                            ? std::fabs(fit.slope - target_slope) / std::fabs(target_slope)
                            : std::fabs(fit.slope);

    bool lnln_ok = n >= 4;
    for (int i = 0; i < n; ++i)
        if (lx[i] <= 0.0) lnln_ok = false;
    if (lnln_ok) {
        std::vector<double> llx(n);
        for (int i = 0; i < n; ++i) llx[i] = std::log(lx[i]);
        Eigen::VectorXd c3 = least_squares({lx, llx, ones}, y);
        fit.lnln_slope = c3(0);
        fit.lnln_c1 = c3(1);
        fit.lnln_c0 = c3(2);
        for (int i = 0; i < n; ++i)
            fit.lnln_max_residual = std::max(
                fit.lnln_max_residual,
                std::fabs(c3(0) * lx[i] + c3(1) * llx[i] + c3(2) - y[i]));
    }
    return fit;
}

} // namespace

Vec2 center_of_vorticity(const ScalarField& zeta, const LakeDomain& dom) {
    if (!zeta.grid.same_layout(dom.grid))
        throw std::invalid_argument("center_of_vorticity: field grid does not match domain");
    const Grid& g = dom.grid;
    double mass = 0.0, mx = 0.0, my = 0.0;
    for (int c : dom.interior) {
        double v = zeta.values[c];
        Vec2 p = g.center(c % g.nx, c / g.nx);
        mass += v;
        mx += v * p.x;
        my += v * p.y;
    }
    if (!(mass > 0.0))
        throw std::invalid_argument("center_of_vorticity: field has zero total mass");
    return {mx / mass, my / mass};
}

double support_diameter(const ScalarField& zeta, const LakeDomain& dom, double threshold_rel) {
    if (!zeta.grid.same_layout(dom.grid))
        throw std::invalid_argument("support_diameter: field grid does not match domain");
    double thr = active_threshold(zeta, dom, threshold_rel);
    const Grid& g = dom.grid;
    std::vector<Vec2> pts;
    for (int c : dom.interior)
        if (zeta.values[c] > thr) pts.push_back(g.center(c % g.nx, c / g.nx));
    if (pts.empty()) throw std::invalid_argument("support_diameter: empty support");
    return point_set_diameter(pts);
}

double support_boundary_distance(const ScalarField& zeta, const LakeDomain& dom,
                                 double threshold_rel) {
    if (!zeta.grid.same_layout(dom.grid))
        throw std::invalid_argument("support_boundary_distance: field grid does not match domain");
    double thr = active_threshold(zeta, dom, threshold_rel);
    double d = -1.0;
    for (int c : dom.interior)
        if (zeta.values[c] > thr) d = d < 0.0 ? dom.bdist[c] : std::min(d, dom.bdist[c]);
    if (d < 0.0) throw std::invalid_argument("support_boundary_distance: empty support");
    return d;
}

RescaledProfile rescale_profile(const SteadyState& state, const LakeDomain& dom) {
    if (!(state.eps > 0.0))
        throw std::invalid_argument("rescale_profile: state carries no positive eps");
    const Grid& g = dom.grid;
    const double eps = state.eps;
    Vec2 X = center_of_vorticity(state.zeta, dom);
    double diam = support_diameter(state.zeta, dom);
    double radius = 2.0 * std::max(diam / eps, 4.0); // rescaled window radius

    // Anchor the local lattice on the cell containing X so every local node
    // coincides with an original cell center: resampling then copies values
    // exactly and preserves the total mass bitwise.
    int i0 = 0, j0 = 0;
    g.locate(X, i0, j0);
    if (!g.in_bounds(i0, j0))
        throw std::runtime_error("rescale_profile: vorticity center left the grid");

    double thr = active_threshold(state.zeta, dom, 1e-12);
    int reach = static_cast<int>(std::ceil(radius * eps / g.h));
    for (int c : dom.interior)
        if (state.zeta.values[c] > thr) {
            int ci = c % g.nx, cj = c / g.nx;
            reach = std::max({reach, std::abs(ci - i0), std::abs(cj - j0)});
        }

    const int n = 2 * reach + 1;
    Grid local;
    local.nx = n;
    local.ny = n;
    local.h = g.h / eps;
    local.origin = {-(reach + 0.5) * local.h, -(reach + 0.5) * local.h};

    RescaledProfile prof;
    prof.grid = local;
    prof.eps = eps;
    prof.xi = ScalarField(local);
    prof.radial = ScalarField(local);
    Vec2 anchor = g.center(i0, j0);
    prof.center_offset = {(X.x - anchor.x) / eps, (X.y - anchor.y) / eps};

    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            int gi = i0 + i - reach, gj = j0 + j - reach;
            if (dom.is_interior(gi, gj))
                prof.xi.values[local.idx(i, j)] = eps * eps * state.zeta.values[g.idx(gi, gj)];
        }

    for (int c : dom.interior)
        if (state.zeta.values[c] > thr) {
            int ci = c % g.nx, cj = c / g.nx;
            if (std::abs(ci - i0) > reach || std::abs(cj - j0) > reach)
                throw std::runtime_error("rescale_profile: support escapes the window");
        }

    // Symmetric decreasing rearrangement: local cells all carry the same
    // m-measure, so ranking them by distance from the (exact, sub-cell) center
    // and handing out the values in descending order realizes the equal-area
    // annulus construction; the result is a permutation of xi's values.
    std::vector<int> order(static_cast<std::size_t>(n) * n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> r2(order.size());
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            Vec2 p = local.center(i, j);
            double dx = p.x - prof.center_offset.x, dy = p.y - prof.center_offset.y;
            r2[local.idx(i, j)] = dx * dx + dy * dy;
        }
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (r2[a] != r2[b]) return r2[a] < r2[b];
        return a < b;
    });
    std::vector<double> vals = prof.xi.values;
    std::sort(vals.begin(), vals.end(), std::greater<double>());
    for (std::size_t k = 0; k < order.size(); ++k) prof.radial.values[order[k]] = vals[k];
    return prof;
}

double radial_monotonicity_gap(const RescaledProfile& profile) {
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < profile.xi.values.size(); ++k) {
        double d = profile.xi.values[k] - profile.radial.values[k];
        num += d * d;
        den += profile.xi.values[k] * profile.xi.values[k];
    }
    if (!(den > 0.0)) throw std::invalid_argument("radial_monotonicity_gap: zero profile");
    return std::sqrt(num / den);
}

SweepRecord make_sweep_record(const SteadyState& state, const SolverParams& params,
                              const LakeDomain& dom, const DeepSet& ds) {
    SweepRecord rec;
    rec.eps = params.eps;
    rec.mu = state.mu;
    rec.energy_E = state.energy_E;
    rec.energy_total = state.energy_total;
    rec.center = center_of_vorticity(state.zeta, dom);
    rec.diam_supp = support_diameter(state.zeta, dom);
    rec.dist_center_to_S = ds.distance_to(rec.center);
    rec.dist_supp_to_boundary = support_boundary_distance(state.zeta, dom);
    rec.patch_measure = patch_measure(state, params, dom);
    rec.rearrangement_gap = radial_monotonicity_gap(rescale_profile(state, dom));
    rec.iterations = state.iterations;
    rec.converged = state.converged;
    rec.kkt = state.kkt_max_violation;
    return rec;
}

ScalingFit fit_mu_scaling(const std::vector<SweepRecord>& records, const LakeDomain& dom,
                          double kappa) {
    return fit_scaling(records, kappa * dom.sup_depth / (2.0 * M_PI),
                       [](const SweepRecord& r) { return r.mu; }, "fit_mu_scaling");
}

ScalingFit fit_energy_scaling(const std::vector<SweepRecord>& records, const LakeDomain& dom,
                              double kappa) {
    return fit_scaling(records, kappa * kappa * dom.sup_depth / (4.0 * M_PI),
                       [](const SweepRecord& r) { return r.energy_total; },
                       "fit_energy_scaling");
}

DiameterReport diameter_law(const std::vector<SweepRecord>& records) {
    check_sweep(records, 3, "diameter_law");
    DiameterReport rep;
    rep.ratio_min = records.front().diam_supp / records.front().eps;
    rep.ratio_max = rep.ratio_min;
    for (const SweepRecord& r : records) {
        double ratio = r.diam_supp / r.eps;
        rep.ratio_min = std::min(rep.ratio_min, ratio);
        rep.ratio_max = std::max(rep.ratio_max, ratio);
        rep.exponents.push_back(r.diam_supp > 0.0 && r.eps != 1.0
                                    ? std::log(r.diam_supp) / std::log(r.eps)
                                    : 0.0);
    }
    rep.L0 = rep.ratio_max;
    return rep;
}

ConcentrationReport concentration_check(const std::vector<SweepRecord>& records,
                                        const DeepSet& ds, bool boundary) {
    check_sweep(records, 1, "concentration_check");
    ConcentrationReport rep;
    rep.applicable = !ds.covers_domain;
    rep.boundary = boundary;
    rep.eta = records.front().dist_supp_to_boundary;
    for (const SweepRecord& r : records) rep.eta = std::min(rep.eta, r.dist_supp_to_boundary);
    rep.first_dist_center_to_S = records.front().dist_center_to_S;
    rep.final_dist_center_to_S = records.back().dist_center_to_S;
    rep.center_trend_ok = rep.final_dist_center_to_S <= rep.first_dist_center_to_S + 1e-12;

    if (boundary && records.size() >= 2) {
        // dist ~ C1 / (ln 1/eps)^gamma1, fitted in log-log form.
        std::vector<double> x, y;
        for (const SweepRecord& r : records) {
            double l = std::log(1.0 / r.eps);
            if (l <= 0.0 || r.dist_supp_to_boundary <= 0.0) continue;
            x.push_back(std::log(l));
            y.push_back(std::log(r.dist_supp_to_boundary));
        }
        if (x.size() >= 2) {
            std::vector<double> ones(x.size(), 1.0);
            Eigen::VectorXd c = least_squares({x, ones}, y);
            rep.gamma1 = -c(0);
            rep.C1 = std::exp(c(1));
            for (std::size_t i = 0; i < x.size(); ++i)
                rep.fit_max_residual =
                    std::max(rep.fit_max_residual, std::fabs(c(0) * x[i] + c(1) - y[i]));
        }
    }
    return rep;
}

} // namespace lakevort
