#pragma once

#include <vector>

#include "lakevort/domain.hpp"
#include "lakevort/grid.hpp"
#include "lakevort/steady.hpp"

namespace lakevort {

// One row of an eps-sweep: the concentration diagnostics of a converged state.
struct SweepRecord {
    double eps = 0.0;
    double mu = 0.0;
    double energy_E = 0.0;
    double energy_total = 0.0;
    double diam_supp = 0.0;
    Vec2 center;                       // Lebesgue-weighted first moment of zeta
    double dist_center_to_S = 0.0;     // distance from center to the deep set
    double dist_supp_to_boundary = 0.0;
    double patch_measure = 0.0;
    double rearrangement_gap = 0.0; // relative L2 distance to the radial rearrangement
    int iterations = 0;
    bool converged = false;
    double kkt = 0.0;
};

// Blow-up of zeta around the vorticity center: values eps^2 * zeta(X + eps x)
// on a local grid of spacing h/eps whose nodes coincide with original cell
// centers (so resampling moves no mass), plus the symmetric-decreasing
// rearrangement of those values about the exact rescaled center offset.
struct RescaledProfile {
    Grid grid;          // local rescaled grid, origin centered on the anchor cell
    ScalarField xi;     // rescaled profile
    ScalarField radial; // equal-area-annuli rearrangement of xi (it is a
                        // permutation of xi's values, so exactly equimeasurable)
    Vec2 center_offset; // exact rescaled center relative to the anchor cell
    double eps = 0.0;
};

// Least-squares fit y = slope*ln(1/eps) + intercept over a sweep, with the
// predicted slope and a three-parameter variant adding a ln(ln(1/eps)) term
// for shore-concentration regimes.
struct ScalingFit {
    double slope = 0.0;
    double intercept = 0.0;
    double target_slope = 0.0;
    double rel_slope_dev = 0.0; // |slope - target| / target
    double max_residual = 0.0;
    // three-parameter variant: y = lnln_slope*ln(1/eps) + c1*lnln(1/eps) + c0
    double lnln_slope = 0.0;
    double lnln_c1 = 0.0;
    double lnln_c0 = 0.0;
    double lnln_max_residual = 0.0;
};

struct DiameterReport {
    double L0 = 0.0;        // max over records of diam/eps
    double ratio_min = 0.0; // spread of diam/eps across the sweep
    double ratio_max = 0.0;
    std::vector<double> exponents; // ln(diam)/ln(eps) per record
};

struct ConcentrationReport {
    bool applicable = true; // false when the deep set is the whole domain
    bool boundary = false;
    double eta = 0.0; // min over records of dist_supp_to_boundary (interior mode)
    double first_dist_center_to_S = 0.0;
    double final_dist_center_to_S = 0.0;
    bool center_trend_ok = false; // final distance not above the first
    // boundary mode: dist_supp_to_boundary ~ C1 / (ln 1/eps)^gamma1
    double C1 = 0.0;
    double gamma1 = 0.0;
    double fit_max_residual = 0.0; // residual of the log-log fit
};

// Lebesgue-weighted center of mass of a nonnegative field; throws on zero mass.
Vec2 center_of_vorticity(const ScalarField& zeta, const LakeDomain& dom);

// Diameter of {zeta > threshold_rel * max zeta} via the convex hull of active
// cell centers; throws on empty support.  threshold_rel in [0, 1), default 1e-12.
double support_diameter(const ScalarField& zeta, const LakeDomain& dom,
                        double threshold_rel = 1e-12);

// Minimum distance from the active cells to the domain boundary.
double support_boundary_distance(const ScalarField& zeta, const LakeDomain& dom,
                                 double threshold_rel = 1e-12);

RescaledProfile rescale_profile(const SteadyState& state, const LakeDomain& dom);

// ||xi - radial||_L2 / ||xi||_L2 on the local window; throws on zero profile.
double radial_monotonicity_gap(const RescaledProfile& profile);

// Assemble the sweep row for a converged state (also computes the profile gap).
SweepRecord make_sweep_record(const SteadyState& state, const SolverParams& params,
                              const LakeDomain& dom, const DeepSet& ds);

// Fits for the multiplier and energy growth laws; need >= 4 distinct eps.
ScalingFit fit_mu_scaling(const std::vector<SweepRecord>& records, const LakeDomain& dom,
                          double kappa);
ScalingFit fit_energy_scaling(const std::vector<SweepRecord>& records, const LakeDomain& dom,
                              double kappa);

DiameterReport diameter_law(const std::vector<SweepRecord>& records);

ConcentrationReport concentration_check(const std::vector<SweepRecord>& records,
                                        const DeepSet& ds, bool boundary);

} // namespace lakevort
