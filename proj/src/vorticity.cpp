#include "lakevort/vorticity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace lakevort {

namespace {

// Integral of a linear segment of g between abscissae a < b with endpoint
// values ga, gb (trapezoid, exact for the linear spline).
double seg_integral(double a, double b, double ga, double gb) {
    return 0.5 * (b - a) * (ga + gb);
}

// Piecewise-linear evaluation on knots x (strictly increasing) with values y.
// Caller guarantees x.front() <= s <= x.back().
double pl_eval(const std::vector<double>& x, const std::vector<double>& y, double s) {
    auto it = std::upper_bound(x.begin(), x.end(), s);
    if (it == x.begin()) return y.front();
    if (it == x.end()) return y.back();
    std::size_t k = static_cast<std::size_t>(it - x.begin());
    double t = (s - x[k - 1]) / (x[k] - x[k - 1]);
    return y[k - 1] + t * (y[k] - y[k - 1]);
}

} // namespace

VorticityFunction VorticityFunction::make_power(double p) {
    if (!(p > 0.0)) throw std::invalid_argument("power profile requires p > 0");
    VorticityFunction vf;
    vf.kind_ = ProfileKind::power;
    vf.p_ = p;
    vf.theta0_ = 1.0 / (p + 1.0);
    return vf;
}

VorticityFunction VorticityFunction::make_shifted_power(double p, double s0) {
    if (!(p > 0.0)) throw std::invalid_argument("shifted power profile requires p > 0");
    if (!(s0 >= 0.0)) throw std::invalid_argument("shifted power profile requires s0 >= 0");
    VorticityFunction vf;
    vf.kind_ = ProfileKind::shifted_power;
    vf.p_ = p;
    vf.s0_ = s0;
    vf.estimate_theta0();
    return vf;
}

VorticityFunction VorticityFunction::make_tabulated(std::vector<double> s, std::vector<double> v) {
    if (s.size() != v.size()) throw std::invalid_argument("tabulated profile: column length mismatch");
    if (s.size() < 2) throw std::invalid_argument("tabulated profile: need at least two knots");
    if (!(s.front() >= 0.0)) throw std::invalid_argument("tabulated profile: knots must start at s >= 0");
    for (std::size_t i = 1; i < s.size(); ++i) {
        if (!(s[i] > s[i - 1]))
            throw std::invalid_argument("tabulated profile: knots must be strictly increasing");
        if (v[i] < v[i - 1])
            throw std::invalid_argument("tabulated profile: values must be nondecreasing");
    }
    if (!(v.front() >= 0.0)) throw std::invalid_argument("tabulated profile: values must be nonnegative");
    VorticityFunction vf;
    vf.kind_ = ProfileKind::tabulated;
    vf.knots_ = std::move(s);
    vf.vals_ = std::move(v);
    if (vf.knots_.front() == 0.0) {
        if (vf.vals_.front() != 0.0)
            throw std::invalid_argument("tabulated profile: value at s = 0 must be 0");
    } else {
        vf.knots_.insert(vf.knots_.begin(), 0.0);
        vf.vals_.insert(vf.vals_.begin(), 0.0);
    }
    vf.finish_tabulated();
    vf.estimate_theta0();
    return vf;
}

VorticityFunction VorticityFunction::load_tabulated_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open profile table: " + path);
    std::vector<double> s, v;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t pos = line.find('#');
        if (pos != std::string::npos) line.erase(pos);
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        double a, b;
        if (!(row >> a >> b))
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected two numeric columns");
        s.push_back(a);
        v.push_back(b);
    }
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] > v[i - 1]))
            throw std::runtime_error(path + ": second column must be strictly increasing");
    return make_tabulated(std::move(s), std::move(v));
}

void VorticityFunction::finish_tabulated() {
    const std::size_t n = knots_.size();
    cum_f_.assign(n, 0.0);
    cum_finv_.assign(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        cum_f_[i] = cum_f_[i - 1] + seg_integral(knots_[i - 1], knots_[i], vals_[i - 1], vals_[i]);
        // Integral of the inverse over the value interval [v_{i-1}, v_i];
        // plateaus (zero-width value interval) contribute nothing.
        cum_finv_[i] =
            cum_finv_[i - 1] + seg_integral(vals_[i - 1], vals_[i], knots_[i - 1], knots_[i]);
    }
}

double VorticityFunction::s_max() const {
    return kind_ == ProfileKind::tabulated ? knots_.back()
                                           : std::numeric_limits<double>::infinity();
}

double VorticityFunction::value_max() const {
    return kind_ == ProfileKind::tabulated ? vals_.back()
                                           : std::numeric_limits<double>::infinity();
}

double VorticityFunction::f(double s) const {
    switch (kind_) {
    case ProfileKind::power:
        if (s <= 0.0) return 0.0;
        if (p_ == 1.0) return s;
        if (p_ == 2.0) return s * s;
        return std::pow(s, p_);
    case ProfileKind::shifted_power:
        if (s <= s0_) return 0.0;
        if (p_ == 1.0) return s - s0_;
        return std::pow(s - s0_, p_);
    case ProfileKind::tabulated:
        if (s <= 0.0) return 0.0;
        if (s > knots_.back())
            throw std::domain_error("tabulated profile evaluated beyond s_max");
        return pl_eval(knots_, vals_, s);
    }
    return 0.0;
}

double VorticityFunction::f_inv(double t) const {
    if (t <= 0.0) return 0.0;
    switch (kind_) {
    case ProfileKind::power:
        if (p_ == 1.0) return t;
        if (p_ == 2.0) return std::sqrt(t);
        return std::pow(t, 1.0 / p_);
    case ProfileKind::shifted_power:
        if (p_ == 1.0) return s0_ + t;
        return s0_ + std::pow(t, 1.0 / p_);
    case ProfileKind::tabulated: {
        if (t > vals_.back())
            throw std::domain_error("tabulated profile inverse evaluated beyond f(s_max)");
        // Inverse of the linear spline: locate the value interval, invert the
        // segment.  upper_bound skips zero-width (plateau) intervals.
        auto it = std::upper_bound(vals_.begin(), vals_.end(), t);
        std::size_t k = static_cast<std::size_t>(it - vals_.begin());
        if (k == 0) return knots_.front();
        if (k == vals_.size()) return knots_.back();
        double dv = vals_[k] - vals_[k - 1];
        if (dv == 0.0) return knots_[k - 1];
        double u = (t - vals_[k - 1]) / dv;
        return knots_[k - 1] + u * (knots_[k] - knots_[k - 1]);
    }
    }
    return 0.0;
}

double VorticityFunction::F(double s) const {
    switch (kind_) {
    case ProfileKind::power:
        return s > 0.0 ? std::pow(s, p_ + 1.0) / (p_ + 1.0) : 0.0;
    case ProfileKind::shifted_power:
        return s > s0_ ? std::pow(s - s0_, p_ + 1.0) / (p_ + 1.0) : 0.0;
    case ProfileKind::tabulated: {
        if (s <= 0.0) return 0.0;
        if (s > knots_.back())
            throw std::domain_error("tabulated profile primitive evaluated beyond s_max");
        auto it = std::upper_bound(knots_.begin(), knots_.end(), s);
        std::size_t k = static_cast<std::size_t>(it - knots_.begin());
        if (k == 0) return 0.0;
        if (k == knots_.size()) return cum_f_.back();
        double fs = pl_eval(knots_, vals_, s);
        return cum_f_[k - 1] + seg_integral(knots_[k - 1], s, vals_[k - 1], fs);
    }
    }
    return 0.0;
}

double VorticityFunction::F_star(double t) const {
    if (t <= 0.0) return 0.0;
    switch (kind_) {
    case ProfileKind::power:
        return p_ / (p_ + 1.0) * std::pow(t, 1.0 + 1.0 / p_);
    case ProfileKind::shifted_power:
        return s0_ * t + p_ / (p_ + 1.0) * std::pow(t, 1.0 + 1.0 / p_);
    case ProfileKind::tabulated: {
        if (t > vals_.back())
            throw std::domain_error("tabulated profile conjugate evaluated beyond f(s_max)");
        auto it = std::upper_bound(vals_.begin(), vals_.end(), t);
        std::size_t k = static_cast<std::size_t>(it - vals_.begin());
        if (k == 0) return 0.0;
        if (k == vals_.size()) return cum_finv_.back();
        double st = f_inv(t);
        return cum_finv_[k - 1] + seg_integral(vals_[k - 1], t, knots_[k - 1], st);
    }
    }
    return 0.0;
}

void VorticityFunction::estimate_theta0() {
    // Sample sup F(s)/(s f(s)) on a log grid, 1e4 points per decade; for the
    // closed-form kinds the ratio is monotone so the range [1e-4, 1e6] around
    // the shift suffices, for tables the range is the table itself.
    double lo, hi;
    if (kind_ == ProfileKind::tabulated) {
        lo = knots_[1] * 1e-2;
        hi = knots_.back();
    } else {
        lo = 1e-4;
        hi = 1e6 * std::max(1.0, s0_);
    }
    const double decades = std::log10(hi / lo);
    const int n = std::max(2, static_cast<int>(decades * 1e4));
    double sup = 0.0;
    for (int i = 0; i <= n; ++i) {
        double s = lo * std::pow(hi / lo, static_cast<double>(i) / n);
        double fs = f(s);
        if (fs <= 0.0) continue;
        sup = std::max(sup, F(s) / (s * fs));
    }
    theta0_ = sup;
}

HypothesisReport VorticityFunction::check_hypotheses(double s_min, double s_max,
                                                     const std::vector<double>& taus) const {
    if (!(s_min > 0.0) || !(s_max > s_min))
        throw std::invalid_argument("check_hypotheses: need 0 < s_min < s_max");
    if (kind_ == ProfileKind::tabulated) s_max = std::min(s_max, knots_.back());

    HypothesisReport rep;
    const double decades = std::log10(s_max / s_min);
    const int n = std::max(2, static_cast<int>(decades * 1e4));
    auto sample = [&](int i) { return s_min * std::pow(s_max / s_min, static_cast<double>(i) / n); };

    double theta0 = 0.0;
    double theta1 = std::numeric_limits<double>::infinity();
    double prev_f = -1.0;
    for (int i = 0; i <= n; ++i) {
        double s = sample(i);
        double fs = f(s);
        if (fs > 0.0) {
            theta0 = std::max(theta0, F(s) / (s * fs));
            if (prev_f >= 0.0 && fs <= prev_f) rep.strictly_monotone = false;
            prev_f = fs;
        }
        double t = std::min(fs, value_max());
        if (t > 0.0) {
            double fi = f_inv(t);
            if (fi > 0.0) theta1 = std::min(theta1, F_star(t) / (t * fi));
        }
    }
    rep.theta0 = theta0;
    rep.theta1 = std::isfinite(theta1) ? theta1 : 0.0;
    rep.theta0_ok = theta0 < 1.0;

    for (double tau : taus) {
        TailSample ts;
        ts.tau = tau;
        int argmax = 0;
        for (int i = 0; i <= n; ++i) {
            double s = sample(i);
            double val = f(s) * std::exp(-tau * s);
            if (val > ts.max_value) {
                ts.max_value = val;
                ts.arg_max = s;
                argmax = i;
            }
        }
        ts.decaying = argmax < n;
        if (!ts.decaying) rep.tails_ok = false;
        rep.tails.push_back(ts);
    }
    return rep;
}

double penalty(const VorticityFunction& vf, const ScalarField& zeta, double eps,
               const LakeDomain& dom) {
    if (!zeta.grid.same_layout(dom.grid))
        throw std::invalid_argument("penalty: field grid does not match domain grid");
    if (!(eps > 0.0)) throw std::invalid_argument("penalty: eps must be positive");
    double zmax = 0.0;
    for (int c : dom.interior) zmax = std::max(zmax, zeta.values[c]);
    const double neg_tol = -1e-14 * zmax;
    for (int c : dom.interior)
        if (zeta.values[c] < neg_tol)
            throw std::invalid_argument("penalty: field has negative entries");
    const double e2 = eps * eps;
    ScalarField g(dom.grid, 0.0);
    for (int c : dom.interior) g.values[c] = vf.F_star(e2 * zeta.values[c]);
    return integrate_nu(dom, g) / e2;
}

} // namespace lakevort
