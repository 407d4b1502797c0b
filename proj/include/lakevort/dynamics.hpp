#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lakevort/domain.hpp"
#include "lakevort/elliptic.hpp"
#include "lakevort/grid.hpp"
#include "lakevort/steady.hpp"

namespace lakevort {

// Advected scalar with its cached stream function and velocity.
struct TransportState {
    double t = 0.0;
    ScalarField zeta;
    ScalarField psi;
    VectorField velocity;
    double cfl = 0.0; // dt * max|v| / h of the last step taken
};

enum class PerturbationKind { none, shift, amplitude, noise };

struct Perturbation {
    PerturbationKind kind = PerturbationKind::none;
    int shift_x = 0, shift_y = 0;  // cells, for shift
    double delta = 0.0;            // relative amplitude, for amplitude
    double noise_level = 0.0;      // multiplicative half-width, for noise
    std::uint64_t seed = 20260822; // noise reproducibility
};

// Time series of distances to the reference steady state plus drift
// diagnostics; series share one length (the number of records).
struct StabilityReport {
    std::vector<double> times;
    std::vector<double> p_list;
    std::vector<std::vector<double>> lp_series; // [k][record] for p_list[k]
    std::vector<double> energy_drift;           // |E(t) - E(0)| / |E(0)|
    std::vector<double> dist_drift; // sup over levels of |nu{zeta(t)>s} - nu{zeta0>s}|
    std::vector<double> circulation;
    std::vector<double> cfl;
    std::vector<double> max_lp; // max over time per tracked p
    double max_energy_drift = 0.0;
    double max_dist_drift = 0.0;
    double eddy_turnover = 0.0;
    double dt = 0.0;
    int steps_taken = 0;
    bool completed = false;
    std::string note; // geometry caveat; appended with the abort reason on failure
    ScalarField final_zeta; // last computed iterate (the abort point on failure)
};

// v = (D_y psi / b, -D_x psi / b) with psi = K zeta and centered differences
// reading 0 outside the interior; no-penetration is enforced weakly through
// the zero Dirichlet data.  psi_guess warm-starts the elliptic solve, and the
// computed psi is written to *psi_out when given.
VectorField velocity_from(const ScalarField& zeta, const EllipticOperator& op,
                          const LakeDomain& dom, const ScalarField* psi_guess = nullptr,
                          ScalarField* psi_out = nullptr);

double max_speed(const VectorField& v, const LakeDomain& dom);

// Initial state at t = 0 with cached stream function and velocity.
TransportState make_transport_state(const ScalarField& zeta0, const EllipticOperator& op,
                                    const LakeDomain& dom);

// One semi-Lagrangian step: characteristics traced backward with a midpoint
// integrator in the frozen velocity, bilinear interpolation clamped to the
// local stencil range (values stay inside the initial bounds), departure
// points outside D read 0.  Throws when dt * max|v| / h exceeds 0.9.
TransportState step(const TransportState& state, double dt, const EllipticOperator& op,
                    const LakeDomain& dom);

// lambda(s) = nu{zeta > s} for each level; levels must be sorted ascending.
std::vector<double> distribution_function(const ScalarField& zeta, const LakeDomain& dom,
                                          const std::vector<double>& levels);

// Support diameter of the steady vorticity divided by its peak speed.
double eddy_turnover(const SteadyState& steady, const EllipticOperator& op,
                     const LakeDomain& dom);

// Builds the perturbed initial condition: shift translates by whole cells
// (mass pushed outside the interior is dropped), amplitude scales by (1+delta)
// and clips at the cap the steady state was solved with, noise multiplies by
// iid uniform [1-l, 1+l].  All kinds except none renormalize the weighted
// circulation back to its input value so comparisons stay in one constraint
// class.  kind == none returns the field unchanged.
ScalarField apply_perturbation(const ScalarField& zeta, const Perturbation& pert,
                               const SteadyState& steady, const LakeDomain& dom);

// Integrates the perturbed state to time horizon_T, recording distances to the
// steady state every record_every steps (plus the first and last step).  A
// step or solver failure ends the run early with completed = false and the
// partial series intact.
StabilityReport run_stability_experiment(const SteadyState& steady, const Perturbation& pert,
                                         double horizon_T, double dt,
                                         const std::vector<double>& p_list,
                                         const EllipticOperator& op, const LakeDomain& dom,
                                         int record_every = 10);

} // namespace lakevort
