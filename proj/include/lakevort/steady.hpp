#pragma once

#include <limits>
#include <vector>

#include "lakevort/domain.hpp"
#include "lakevort/elliptic.hpp"
#include "lakevort/grid.hpp"
#include "lakevort/vorticity.hpp"

namespace lakevort {

// Initial condition for the fixed-point iteration: a uniform patch of the
// requested circulation.  A NaN center selects the deep-set representative
// closest to the deep set's centroid; a nonpositive radius selects
// 4*eps*sqrt(kappa/(pi*inf b)) with inf taken over the patch region.
struct PatchInit {
    Vec2 center{std::numeric_limits<double>::quiet_NaN(),
                std::numeric_limits<double>::quiet_NaN()};
    double radius = 0.0;
};

struct SolverParams {
    double eps = 0.1;        // concentration parameter, > 0
    double lambda_cap = 0.0; // cap for eps^2*zeta; <= 0 selects the automatic cap
    double kappa = 1.0;      // prescribed circulation in the weighted measure
    VorticityFunction vf = VorticityFunction::make_power(1.0);
    PatchInit init;
    // When non-empty, used verbatim as the starting iterate instead of the
    // uniform patch (restart and perturbation studies).
    ScalarField init_zeta;
    double tol_fix = 1e-8;   // relative L1 stopping threshold for the iteration
    double tol_circ = 1e-10; // relative circulation tolerance for the bisection
    double tol_pcg = 1e-10;  // relative residual target for the elliptic solves
    // The update contracts geometrically but slowly at small eps (ratio near
    // 0.99), so reaching tol_fix can take a few thousand rounds.
    int max_iter = 3000;
    double damping = 1.0; // update fraction in (0, 1]; 1 = undamped
};

// One row of the per-iteration log.
struct IterRow {
    int iter = 0;
    double mu = 0.0;
    double energy_E = 0.0;     // kinetic part, 1/2 integral of zeta*psi_free d(nu)
    double penalty_F = 0.0;    // penalty functional
    double energy_total = 0.0; // E - F
    double l1_change = 0.0;    // L1(nu) distance between consecutive iterates
    double circ = 0.0;         // circulation of the new iterate
};

struct SteadyState {
    ScalarField zeta;     // the vorticity potential (transported scalar)
    ScalarField psi_free; // weak inverse applied to zeta (zero Dirichlet data)
    ScalarField psi;      // psi_free - mu on interior cells, 0 outside
    double eps = 0.0;     // concentration parameter the state was solved at
    double mu = 0.0;
    double energy_E = 0.0;
    double penalty_F = 0.0;
    double energy_total = 0.0;
    int iterations = 0;
    double fix_residual = 0.0;
    double circ = 0.0;
    double kkt_max_violation = 0.0;
    bool converged = false;
    double lambda_used = 0.0;
    std::vector<IterRow> history;
};

// The cap actually used: the explicit value when positive (validated against
// the degeneracy bar kappa eps^2 / |D|_nu), else 50*f(psi_scale) with
// psi_scale = (kappa sup b / 2 pi) ln(1/eps), floored at twice
// max(1, kappa eps^2 / |D|_nu) so the automatic choice is never tight.
double resolved_lambda(const SolverParams& params, const LakeDomain& dom);

// Pointwise profile map: zeta = eps^-2 * min(f(psi_free - mu), lambda), zero
// where the argument is nonpositive.  lambda <= 0 resolves the cap from params.
ScalarField bathtub_profile(const ScalarField& psi_free, double mu, const SolverParams& params,
                            const LakeDomain& dom, double lambda = 0.0);

// Circulation of the profile at multiplier mu (monotone nonincreasing in mu).
double profile_circulation(const ScalarField& psi_free, double mu, const SolverParams& params,
                           const LakeDomain& dom, double lambda = 0.0);

// Bisection for the multiplier: returns mu with |circulation - kappa| within
// tol_circ*kappa.  Bracket: [min psi - f_inv(kappa eps^2/|D|_nu) - 1, max psi].
// Throws when even the lower end cannot reach kappa (eps too large for the
// domain and cap).  steps, when given, receives the bisection count.
double solve_multiplier(const ScalarField& psi_free, const SolverParams& params,
                        const LakeDomain& dom, double lambda = 0.0, int* steps = nullptr);

// Fixed-point iteration zeta -> profile(K zeta, mu(K zeta)) from the uniform
// patch start, with the multiplier re-solved every step.  Stops when the
// relative L1(nu) change is within tol_fix*kappa and the total energy is flat
// to 1e-8 relative (an exactly unchanged iterate stops immediately); non-
// convergence within max_iter returns the last iterate with converged = false.
SteadyState fixed_point_solve(const SolverParams& params, const LakeDomain& dom,
                              const EllipticOperator& op);

// nu-measure of the cells sitting at the cap (within 1e-9 relative).
double patch_measure(const SteadyState& state, const SolverParams& params, const LakeDomain& dom);

// Maximum pointwise violation of the optimality trichotomy:
//   zeta = 0        requires psi <= 0,
//   0 < zeta < cap  requires psi = f_inv(eps^2 zeta),
//   zeta = cap      requires psi >= f_inv(lambda).
double kkt_residual(const SteadyState& state, const SolverParams& params, const LakeDomain& dom);

} // namespace lakevort
