#pragma once

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>

#include "lakevort/domain.hpp"

namespace lakevort {

struct SolveStats {
    int iterations = 0;
    double rel_residual = 0.0;
};

struct SolverOptions {
    double tol = 1e-10; // relative residual target
    int max_iter = 0;   // 0 selects 20*(nx+ny)
};

// Finite-volume form of psi -> -div((1/b) grad psi) with psi = 0 on masked-out
// neighbours. Face conductivities are harmonic means of 1/b on the adjacent
// cells (a masked-out side mirrors the interior cell). Unknowns are the
// interior cells in ascending index order; the matrix is SPD.
// The domain must outlive the operator.
class EllipticOperator {
public:
    explicit EllipticOperator(const LakeDomain& dom);

    const LakeDomain& domain() const { return *dom_; }
    bool unit_depth() const { return unit_depth_; }
    const Eigen::SparseMatrix<double>& matrix() const { return A_; }

    // Solves op*psi = b*zeta by preconditioned conjugate gradients. Warm start
    // from *guess when given; a guess already below tolerance is returned
    // unchanged (required for bitwise-idempotent solver restarts).
    ScalarField apply_K(const ScalarField& zeta, SolverOptions opt = {},
                        const ScalarField* guess = nullptr, SolveStats* stats = nullptr) const;

    Eigen::VectorXd restrict_interior(const ScalarField& f) const;
    ScalarField extend_zero(const Eigen::VectorXd& v) const;

private:
    const LakeDomain* dom_;
    Eigen::SparseMatrix<double> A_;
    Eigen::IncompleteCholesky<double, Eigen::Lower, Eigen::NaturalOrdering<int>> ic_;
    bool unit_depth_ = false;
};

struct GreenEval {
    Vec2 source;           // requested source point
    Vec2 source_cell;      // center of the cell carrying the discrete delta
    ScalarField g;         // G(., y)
    ScalarField h_corr;    // H(., y) = ln(diam/|x-y|)/2pi - G(x, y)
    SolveStats stats;
};

// Discrete Green's function of -Laplace with Dirichlet data: requires an
// operator assembled over unit depth; y must fall in an interior cell.
GreenEval green_function(const EllipticOperator& op, Vec2 y, SolverOptions opt = {});

struct RobinCheckResult {
    int samples = 0;
    int violations = 0;
    double worst_margin = 0.0; // most negative slack margin observed (0 if clean)
    double max_h = 0.0, min_h = 0.0;
};

// Two-sided distance-envelope bounds on H at cells farther than 3h from the
// source and from the boundary; slack = coeff*h/min(|x-y|, d(x), d(y)).
RobinCheckResult robin_bounds_check(const GreenEval& ge, const LakeDomain& dom,
                                    double slack_coeff = 4.0, int stride = 1);

// Method-of-images value of the zero-boundary kernel of -Laplace on the disc
// of the given center and radius; x must differ from y and both must lie
// strictly inside the disc.
double disc_green_exact(Vec2 x, Vec2 y, Vec2 center = {0.0, 0.0}, double radius = 1.0);

// E = (1/2) integrate_nu(zeta*psi); callers pass psi = apply_K(zeta).
double energy(const LakeDomain& dom, const ScalarField& zeta, const ScalarField& psi);

} // namespace lakevort
