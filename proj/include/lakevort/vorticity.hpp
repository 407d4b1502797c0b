#pragma once

#include <string>
#include <vector>

#include "lakevort/domain.hpp"
#include "lakevort/grid.hpp"

namespace lakevort {

// Profile nonlinearity used by the steady-state construction.  The catalog:
//   power:         f(s) = max(s,0)^p,              p > 0
//   shifted_power: f(s) = max(s - s0, 0)^p,        p > 0, s0 >= 0
//   tabulated:     monotone piecewise-linear spline through (s_i, f_i) knots
//                  on [0, s_max]; implicitly anchored at (0, 0)
// All kinds vanish on s <= 0.  The inverse is the functional inverse on the
// increasing branch and 0 at or below f(0+); the primitives are
//   F(s)  = integral of f from 0 to s,
//   Fstar(t) = integral of the inverse from 0 to t  (convex conjugate of F).
enum class ProfileKind { power, shifted_power, tabulated };

struct TailSample {
    double tau = 0.0;
    double max_value = 0.0; // max of f(s) exp(-tau s) over the sampled range
    double arg_max = 0.0;
    bool decaying = true; // false when the max sits at the right end of the range
};

// Report produced by sampling the structural hypotheses on the nonlinearity:
// theta0 = sup F(s)/(s f(s)) must be < 1, theta1 = inf Fstar(t)/(t f_inv(t)),
// strict monotonicity on the positive axis, and exponential-tail domination.
struct HypothesisReport {
    double theta0 = 0.0;
    double theta1 = 0.0;
    bool theta0_ok = true;       // theta0 < 1
    bool strictly_monotone = true; // no plateau detected on (0, s_max)
    std::vector<TailSample> tails;
    bool tails_ok = true;
};

class VorticityFunction {
public:
    static VorticityFunction make_power(double p);
    static VorticityFunction make_shifted_power(double p, double s0);
    // Knots must have strictly increasing s with s[0] >= 0 and nondecreasing
    // values; a (0,0) anchor is prepended when absent.  Plateaus are accepted
    // here and reported by check_hypotheses.
    static VorticityFunction make_tabulated(std::vector<double> s, std::vector<double> v);
    // Two-column CSV "s,f(s)"; requires strictly increasing values in both
    // columns (no plateaus via this path).  '#' starts a comment line.
    static VorticityFunction load_tabulated_csv(const std::string& path);

    ProfileKind kind() const { return kind_; }
    double exponent() const { return p_; }
    double shift() const { return s0_; }
    // Upper end of the tabulated range (infinity for closed-form kinds).
    double s_max() const;
    double value_max() const; // f(s_max)

    double f(double s) const;
    double f_inv(double t) const;
    double F(double s) const;
    double F_star(double t) const;

    // Cached estimate of sup F(s)/(s f(s)); exact 1/(p+1) for power kind.
    double theta0() const { return theta0_; }

    HypothesisReport check_hypotheses(double s_min, double s_max,
                                      const std::vector<double>& taus) const;

private:
    VorticityFunction() = default;
    void finish_tabulated();
    void estimate_theta0();

    ProfileKind kind_ = ProfileKind::power;
    double p_ = 1.0;
    double s0_ = 0.0;
    double theta0_ = 0.5;
    // Tabulated data: knots_/vals_ strictly increasing in knots_, nondecreasing
    // in vals_; cum_f_/cum_finv_ are exact integrals of the linear spline up to
    // each knot (for F) and up to each value (for Fstar).
    std::vector<double> knots_, vals_, cum_f_, cum_finv_;
};

// Penalty functional: (1/eps^2) * integral of Fstar(eps^2 zeta) d(nu).
// Rejects fields with negative entries beyond -1e-14 times the max entry.
double penalty(const VorticityFunction& vf, const ScalarField& zeta, double eps,
               const LakeDomain& dom);

} // namespace lakevort
