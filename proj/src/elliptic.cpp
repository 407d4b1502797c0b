#include "lakevort/elliptic.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace lakevort {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

EllipticOperator::EllipticOperator(const LakeDomain& dom) : dom_(&dom) {
    const Grid& g = dom.grid;
    const int n = static_cast<int>(dom.interior.size());
    if (n == 0) throw std::invalid_argument("EllipticOperator: empty interior");

    unit_depth_ = true;
    for (int c : dom.interior)
        if (dom.depth[c] != 1.0) {
            unit_depth_ = false;
            break;
        }

    const double inv_h2 = 1.0 / (g.h * g.h);
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(n) * 5);
    const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
    for (int r = 0; r < n; ++r) {
        int c = dom.interior[r];
        int i = c % g.nx, j = c / g.nx;
        double diag = 0.0;
        for (int k = 0; k < 4; ++k) {
            int ii = i + di[k], jj = j + dj[k];
            double sigma;
            if (dom.is_interior(ii, jj)) {
                // harmonic mean of 1/b across the face
                sigma = 2.0 / (dom.depth[c] + dom.depth[g.idx(ii, jj)]);
                trips.emplace_back(r, dom.cell_to_interior[g.idx(ii, jj)], -sigma * inv_h2);
            } else {
                // Dirichlet value at the mirrored neighbour center
                sigma = 1.0 / dom.depth[c];
            }
            diag += sigma * inv_h2;
        }
        trips.emplace_back(r, r, diag);
    }
    A_.resize(n, n);
    A_.setFromTriplets(trips.begin(), trips.end());
    A_.makeCompressed();
    ic_.compute(A_);
    if (ic_.info() != Eigen::Success)
        throw std::runtime_error("EllipticOperator: incomplete-Cholesky factorization failed");
}

Eigen::VectorXd EllipticOperator::restrict_interior(const ScalarField& f) const {
    const int n = static_cast<int>(dom_->interior.size());
    Eigen::VectorXd v(n);
    for (int r = 0; r < n; ++r) v[r] = f.values[dom_->interior[r]];
    return v;
}

ScalarField EllipticOperator::extend_zero(const Eigen::VectorXd& v) const {
    ScalarField f(dom_->grid, 0.0);
    const int n = static_cast<int>(dom_->interior.size());
    for (int r = 0; r < n; ++r) f.values[dom_->interior[r]] = v[r];
    return f;
}

ScalarField EllipticOperator::apply_K(const ScalarField& zeta, SolverOptions opt,
                                      const ScalarField* guess, SolveStats* stats) const {
    if (!zeta.grid.same_layout(dom_->grid))
        throw std::invalid_argument("apply_K: field grid does not match operator grid");
    if (!(opt.tol > 0.0)) throw std::invalid_argument("apply_K: tol must be positive");

    const int n = static_cast<int>(dom_->interior.size());
    Eigen::VectorXd rhs(n);
    for (int r = 0; r < n; ++r) {
        int c = dom_->interior[r];
        rhs[r] = dom_->depth[c] * zeta.values[c];
    }
    const double bnorm = rhs.norm();
    if (bnorm == 0.0) {
        if (stats) *stats = {0, 0.0};
        return ScalarField(dom_->grid, 0.0);
    }

    Eigen::VectorXd x;
    Eigen::VectorXd r;
    if (guess) {
        x = restrict_interior(*guess);
        r = rhs - A_ * x;
    } else {
        x = Eigen::VectorXd::Zero(n);
        r = rhs;
    }
    double rnorm = r.norm();
    if (rnorm <= opt.tol * bnorm) {
        if (stats) *stats = {0, rnorm / bnorm};
        return guess ? *guess : extend_zero(x);
    }

    const int cap = opt.max_iter > 0 ? opt.max_iter : 20 * (dom_->grid.nx + dom_->grid.ny);
    Eigen::VectorXd z = ic_.solve(r);
    Eigen::VectorXd p = z;
    Eigen::VectorXd q(n);
    double rz = r.dot(z);
    for (int k = 1; k <= cap; ++k) {
        q.noalias() = A_ * p;
        const double alpha = rz / p.dot(q);
        x += alpha * p;
        r -= alpha * q;
        rnorm = r.norm();
        if (rnorm <= opt.tol * bnorm) {
            if (stats) *stats = {k, rnorm / bnorm};
            return extend_zero(x);
        }
        z = ic_.solve(r);
        const double rz_next = r.dot(z);
        p = z + (rz_next / rz) * p;
        rz = rz_next;
    }
    throw std::runtime_error("apply_K: no convergence in " + std::to_string(cap) +
                             " iterations, relative residual " + std::to_string(rnorm / bnorm));
}

GreenEval green_function(const EllipticOperator& op, Vec2 y, SolverOptions opt) {
    if (!op.unit_depth())
        throw std::invalid_argument("green_function: operator must be assembled with unit depth");
    const LakeDomain& dom = op.domain();
    const Grid& g = dom.grid;
    int i, j;
    g.locate(y, i, j);
    if (!dom.is_interior(i, j))
        throw std::invalid_argument("green_function: source point outside D");

    GreenEval ge;
    ge.source = y;
    ge.source_cell = g.center(i, j);

    ScalarField delta(g, 0.0);
    delta(i, j) = 1.0 / (g.h * g.h);
    ge.g = op.apply_K(delta, opt, nullptr, &ge.stats);

    ge.h_corr = ScalarField(g, 0.0);
    for (int c : dom.interior) {
        Vec2 x = g.center(c % g.nx, c / g.nx);
        double r = std::max(dist(x, ge.source_cell), 0.5 * g.h);
        ge.h_corr.values[c] = std::log(dom.diameter / r) / kTwoPi - ge.g.values[c];
    }
    return ge;
}

RobinCheckResult robin_bounds_check(const GreenEval& ge, const LakeDomain& dom,
                                    double slack_coeff, int stride) {
    if (stride < 1) stride = 1;
    const Grid& g = dom.grid;
    int si, sj;
    g.locate(ge.source_cell, si, sj);
    const double dy = dom.bdist[g.idx(si, sj)];

    RobinCheckResult res;
    res.max_h = -1e300;
    res.min_h = 1e300;
    bool any = false;
    for (std::size_t k = 0; k < dom.interior.size(); k += stride) {
        int c = dom.interior[k];
        Vec2 x = g.center(c % g.nx, c / g.nx);
        double r = dist(x, ge.source_cell);
        double dx = dom.bdist[c];
        if (r < 3.0 * g.h || dx < 3.0 * g.h) continue;
        double hval = ge.h_corr.values[c];
        double upper = std::log(dom.diameter / std::max(r, std::max(dx, dy))) / kTwoPi;
        double lower = std::log(dom.diameter / (r + 2.0 * std::max(dx, dy))) / kTwoPi;
        double slack = slack_coeff * g.h / std::min(r, std::min(dx, dy));
        double margin = std::min(upper + slack - hval, hval - lower + slack);
        ++res.samples;
        any = true;
        res.max_h = std::max(res.max_h, hval);
        res.min_h = std::min(res.min_h, hval);
        if (margin < 0.0) {
            ++res.violations;
            res.worst_margin = std::min(res.worst_margin, margin);
        }
    }
    if (!any) {
        res.max_h = 0.0;
        res.min_h = 0.0;
    }
    return res;
}

double energy(const LakeDomain& dom, const ScalarField& zeta, const ScalarField& psi) {
    if (!zeta.grid.same_layout(dom.grid) || !psi.grid.same_layout(dom.grid))
        throw std::invalid_argument("energy: field grid does not match domain grid");
    double s = 0.0;
    for (int c : dom.interior) s += zeta.values[c] * psi.values[c] * dom.depth[c];
    return 0.5 * s * dom.grid.h * dom.grid.h;
}

double disc_green_exact(Vec2 x, Vec2 y, Vec2 center, double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("disc_green_exact: radius must be positive");
    Vec2 xs = (1.0 / radius) * (x - center);
    Vec2 ys = (1.0 / radius) * (y - center);
    if (norm(xs) >= 1.0 || norm(ys) >= 1.0)
        throw std::invalid_argument("disc_green_exact: points must lie inside the disc");
    double r = dist(xs, ys);
    if (r == 0.0) throw std::invalid_argument("disc_green_exact: coincident points");
    double ay = norm(ys);
    if (ay < 1e-14) return std::log(1.0 / norm(xs)) / kTwoPi;
    Vec2 y_star{ys.x / (ay * ay), ys.y / (ay * ay)};
    return std::log(ay * dist(xs, y_star) / r) / kTwoPi;
}

} // namespace lakevort
