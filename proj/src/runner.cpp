#include "lakevort/runner.hpp"

#include <atomic>
#include <limits>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <optional>
#include <thread>

#include "lakevort/elliptic.hpp"
#include "lakevort/io.hpp"

namespace lakevort {

const char* lakevort_version() { return "1.0.0"; }

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Failure that knows which stage raised it.
struct StageError : std::runtime_error {
    std::string stage;
    StageError(std::string st, const std::string& msg) : std::runtime_error(msg), stage(std::move(st)) {}
};

struct Artifact {
    std::string name;
    std::uint64_t checksum = 0;
    std::size_t bytes = 0;
};

std::string eps_label(double e) {
    char b[32];
    std::snprintf(b, sizeof b, "%g", e);
    return b;
}

std::string fmt9(double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.9g", v);
    return b;
}

std::string yesno(bool v) { return v ? "yes" : "no"; }

SolverParams params_for(const RunConfig& c, double eps, const VorticityFunction& vf) {
    SolverParams p;
    p.eps = eps;
    p.lambda_cap = c.lambda;
    p.kappa = c.kappa;
    p.vf = vf;
    p.tol_fix = c.tol_fix;
    p.tol_circ = c.tol_circ;
    p.tol_pcg = c.tol_pcg;
    p.max_iter = c.max_iter;
    p.damping = c.damping;
    return p;
}

std::string iters_csv(const SteadyState& st) {
    std::string s = csv_row({"iter", "mu", "energy_E", "penalty_F", "energy_total", "l1_change",
                             "circ"});
    for (const IterRow& r : st.history)
        s += csv_row({std::to_string(r.iter), format_g17(r.mu), format_g17(r.energy_E),
                      format_g17(r.penalty_F), format_g17(r.energy_total),
                      format_g17(r.l1_change), format_g17(r.circ)});
    return s;
}

const std::vector<std::string> kRecordHeader = {
    "eps", "mu", "energy_E", "energy_total", "diam_supp", "center_x", "center_y",
    "dist_center_to_S", "dist_supp_to_boundary", "patch_measure", "rearrangement_gap",
    "iterations", "converged", "kkt_residual"};

std::vector<std::string> record_cells(const SweepRecord& r) {
    return {format_g17(r.eps),
            format_g17(r.mu),
            format_g17(r.energy_E),
            format_g17(r.energy_total),
            format_g17(r.diam_supp),
            format_g17(r.center.x),
            format_g17(r.center.y),
            format_g17(r.dist_center_to_S),
            format_g17(r.dist_supp_to_boundary),
            format_g17(r.patch_measure),
            format_g17(r.rearrangement_gap),
            std::to_string(r.iterations),
            r.converged ? "1" : "0",
            format_g17(r.kkt)};
}

std::string fits_report(const RunResult& res, const RunConfig& c, std::size_t converged_count) {
    std::string s;
    s += "scaling fits (least squares against ln(1/eps))\n";
    s += "converged solves: " + std::to_string(converged_count) + " of " +
         std::to_string(c.eps_schedule.size()) + "\n\n";
    if (res.fits_available) {
        s += "multiplier law: mu ~ slope * ln(1/eps) + intercept\n";
        s += "  slope         = " + fmt9(res.mu_fit.slope) + "\n";
        s += "  intercept     = " + fmt9(res.mu_fit.intercept) + "\n";
        s += "  target_slope  = " + fmt9(res.mu_fit.target_slope) +
             "  (kappa * sup depth / 2pi)\n";
        s += "  rel_slope_dev = " + fmt9(res.mu_fit.rel_slope_dev) + "\n";
        s += "  max_residual  = " + fmt9(res.mu_fit.max_residual) + "\n";
        s += "  with ln(ln(1/eps)) term: slope = " + fmt9(res.mu_fit.lnln_slope) +
             ", c1 = " + fmt9(res.mu_fit.lnln_c1) + ", c0 = " + fmt9(res.mu_fit.lnln_c0) +
             ", max_residual = " + fmt9(res.mu_fit.lnln_max_residual) + "\n\n";
        s += "energy law: E ~ slope * ln(1/eps) + intercept\n";
        s += "  slope         = " + fmt9(res.energy_fit.slope) + "\n";
        s += "  intercept     = " + fmt9(res.energy_fit.intercept) + "\n";
        s += "  target_slope  = " + fmt9(res.energy_fit.target_slope) +
             "  (kappa^2 * sup depth / 4pi)\n";
        s += "  rel_slope_dev = " + fmt9(res.energy_fit.rel_slope_dev) + "\n";
        s += "  max_residual  = " + fmt9(res.energy_fit.max_residual) + "\n\n";
    } else {
        s += "multiplier/energy fits: skipped (need >= 4 converged solves with distinct eps)\n\n";
    }
    if (!res.diameter.exponents.empty()) {
        s += "support diameter\n";
        s += "  L0 (max diam/eps)   = " + fmt9(res.diameter.L0) + "\n";
        s += "  diam/eps range      = [" + fmt9(res.diameter.ratio_min) + ", " +
             fmt9(res.diameter.ratio_max) + "]\n";
        s += "  ln(diam)/ln(eps)    =";
        for (double e : res.diameter.exponents) s += " " + fmt9(e);
        s += "\n\n";
    } else {
        s += "support diameter report: skipped (need >= 3 converged solves)\n\n";
    }
    const ConcentrationReport& cr = res.concentration;
    s += "concentration\n";
    s += "  deep-set check applicable = " + yesno(cr.applicable) + "\n";
    if (cr.applicable) {
        s += "  dist(center, deep set): first = " + fmt9(cr.first_dist_center_to_S) +
             ", final = " + fmt9(cr.final_dist_center_to_S) +
             ", trend ok = " + yesno(cr.center_trend_ok) + "\n";
    }
    if (cr.boundary) {
        s += "  shore-distance fit: dist ~ C1 / (ln 1/eps)^gamma1\n";
        s += "    C1           = " + fmt9(cr.C1) + "\n";
        s += "    gamma1       = " + fmt9(cr.gamma1) + "\n";
        s += "    max_residual = " + fmt9(cr.fit_max_residual) + "\n";
    } else {
        s += "  support-to-boundary margin eta = " + fmt9(cr.eta) + "\n";
    }
    s += "\nfit inputs are the converged rows of sweep.csv; see that file for the raw sweep.\n";
    return s;
}

} // namespace

RunResult run_experiment(const RunConfig& c, const RunOptions& opt) {
    RunResult res;
    res.out_dir = opt.out_dir.empty() ? c.out_dir : opt.out_dir;

    std::vector<Artifact> arts;
    std::vector<std::pair<std::string, double>> walls;
    std::string stage = "setup";

    std::optional<LakeDomain> dom;
    std::optional<VorticityFunction> vf;
    std::optional<EllipticOperator> op;
    std::optional<DeepSet> ds;
    double lambda_resolved = std::numeric_limits<double>::quiet_NaN();

    const auto t_now = [] { return std::chrono::steady_clock::now(); };
    const auto secs_since = [](std::chrono::steady_clock::time_point t0) {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };
    const auto note = [&](const std::string& msg) {
        if (!opt.quiet) std::cout << "[lakevort] " << msg << std::endl;
    };

    const auto emit_text = [&](const std::string& name, const std::string& content) {
        write_text_atomic(res.out_dir + "/" + name, content);
        arts.push_back({name, fnv1a64(content), content.size()});
    };
    const auto emit_field = [&](const std::string& name, const ScalarField& f,
                                const std::string& label, double eps_val) {
        std::vector<std::uint8_t> bytes = field_lvf_bytes(f);
        write_field_lvf(res.out_dir + "/" + name, f);
        std::uint64_t sum = fnv1a64(bytes.data(), bytes.size());
        arts.push_back({name, sum, bytes.size()});
        std::string m;
        m += "file: " + name + "\n";
        m += "field: " + label + "\n";
        m += "nx: " + std::to_string(f.grid.nx) + "\n";
        m += "ny: " + std::to_string(f.grid.ny) + "\n";
        m += "h: " + format_g17(f.grid.h) + "\n";
        m += "origin: " + format_g17(f.grid.origin.x) + " " + format_g17(f.grid.origin.y) + "\n";
        m += "eps: " + format_g17(eps_val) + "\n";
        m += "kappa: " + format_g17(c.kappa) + "\n";
        m += "payload_fnv1a: " + to_hex16(sum) + "\n";
        emit_text(name + ".meta", m);
    };

    // Solve one eps and attach its per-eps artifacts (caller order fixes bytes).
    const auto solve_artifacts = [&](const SteadyState& st) {
        std::string lbl = eps_label(st.eps);
        emit_text("iters_" + lbl + ".csv", iters_csv(st));
        emit_field("zeta_" + lbl + ".lvf", st.zeta, "zeta", st.eps);
    };

    try {
        std::filesystem::create_directories(res.out_dir);

        stage = "config-validate";
        const bool single_eps = c.eps_schedule.size() == 1;
        if (c.experiment == ExperimentKind::steady && !single_eps)
            throw std::invalid_argument("steady runs take a single eps; use sweep for schedules");
        if (c.experiment == ExperimentKind::stability && !single_eps)
            throw std::invalid_argument("stability runs take a single eps");
        if (c.experiment == ExperimentKind::greens_check) {
            if (c.shape.kind != ShapeKind::disc ||
                c.depth.kind != DepthKind::constant || c.depth.a != 1.0)
                throw std::invalid_argument(
                    "greens-check needs the disc with constant depth 1 (the image oracle)");
        }

        {
            stage = "domain";
            auto t0 = t_now();
            DomainSpec spec;
            spec.shape = c.shape;
            spec.depth = c.depth;
            spec.nx = c.nx;
            spec.depth_floor = c.depth_floor;
            dom = build_domain(spec);
            ds = deep_set(*dom);
            walls.emplace_back(stage, secs_since(t0));
        }
        {
            stage = "profile";
            auto t0 = t_now();
            vf = make_profile(c.profile);
            walls.emplace_back(stage, secs_since(t0));
        }
        lambda_resolved = resolved_lambda(params_for(c, c.eps_schedule.front(), *vf), *dom);
        if (c.experiment != ExperimentKind::profile_check) {
            stage = "operator";
            auto t0 = t_now();
            op.emplace(*dom);
            walls.emplace_back(stage, secs_since(t0));
            note("operator assembled: nx=" + std::to_string(dom->grid.nx) +
                 " interior=" + std::to_string(dom->interior.size()));
        }

        switch (c.experiment) {
        case ExperimentKind::steady: {
            double eps = c.eps_schedule.front();
            SolverParams p = params_for(c, eps, *vf);
            stage = "solve_eps_" + eps_label(eps);
            auto t0 = t_now();
            SteadyState st = fixed_point_solve(p, *dom, *op);
            walls.emplace_back(stage, secs_since(t0));
            note("solve eps=" + eps_label(eps) + ": iterations=" + std::to_string(st.iterations) +
                 " converged=" + yesno(st.converged));

            std::string solve_stage = stage;
            stage = "io";
            SweepRecord rec = make_sweep_record(st, p, *dom, *ds);
            res.states.push_back(st);
            res.records.push_back(rec);
            solve_artifacts(st);
            emit_field("psi_free_" + eps_label(eps) + ".lvf", st.psi_free, "psi_free", eps);
            std::string csv = csv_row(kRecordHeader);
            csv += csv_row(record_cells(rec));
            emit_text("steady.csv", csv);
            if (!st.converged)
                throw StageError(solve_stage,
                                 "fixed-point iteration did not converge within " +
                                     std::to_string(p.max_iter) + " rounds");
            break;
        }
        case ExperimentKind::sweep: {
            const auto& sched = c.eps_schedule;
            std::vector<SteadyState> states(sched.size());
            std::vector<double> solve_secs(sched.size());
            std::vector<std::exception_ptr> errors(sched.size());
            int nthreads = std::max(1, std::min<int>(opt.threads,
                                                     static_cast<int>(sched.size())));
            stage = "solve-sweep";
            std::atomic<std::size_t> cursor{0};
            std::mutex log_mx;
            auto worker = [&] {
                while (true) {
                    std::size_t k = cursor.fetch_add(1);
                    if (k >= sched.size()) break;
                    auto t0 = t_now();
                    try {
                        states[k] = fixed_point_solve(params_for(c, sched[k], *vf), *dom, *op);
                    } catch (...) {
                        errors[k] = std::current_exception();
                    }
                    solve_secs[k] = secs_since(t0);
                    std::lock_guard<std::mutex> lock(log_mx);
                    note("solve eps=" + eps_label(sched[k]) + ": iterations=" +
                         std::to_string(states[k].iterations) + " converged=" +
                         yesno(states[k].converged) + " (" + fmt9(solve_secs[k]) + " s)");
                }
            };
            if (nthreads == 1) {
                worker();
            } else {
                std::vector<std::thread> pool;
                for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
                for (auto& th : pool) th.join();
            }
            for (std::size_t k = 0; k < sched.size(); ++k) {
                walls.emplace_back("solve_eps_" + eps_label(sched[k]), solve_secs[k]);
                if (errors[k]) {
                    try {
                        std::rethrow_exception(errors[k]);
                    } catch (const std::exception& e) {
                        throw StageError("solve_eps_" + eps_label(sched[k]), e.what());
                    }
                }
            }

            stage = "io";
            std::string csv = csv_row(kRecordHeader);
            std::vector<SweepRecord> converged;
            for (std::size_t k = 0; k < sched.size(); ++k) {
                SweepRecord rec = make_sweep_record(states[k], params_for(c, sched[k], *vf),
                                                    *dom, *ds);
                csv += csv_row(record_cells(rec));
                solve_artifacts(states[k]);
                res.states.push_back(states[k]);
                res.records.push_back(rec);
                if (rec.converged) converged.push_back(rec);
            }
            emit_text("sweep.csv", csv);

            stage = "fits";
            auto t0 = t_now();
            if (converged.size() >= 4) {
                res.mu_fit = fit_mu_scaling(converged, *dom, c.kappa);
                res.energy_fit = fit_energy_scaling(converged, *dom, c.kappa);
                res.fits_available = true;
            }
            if (converged.size() >= 3) res.diameter = diameter_law(converged);
            if (!converged.empty())
                res.concentration =
                    concentration_check(converged, *ds, c.regime == Regime::boundary);
            walls.emplace_back(stage, secs_since(t0));
            emit_text("fits.txt", fits_report(res, c, converged.size()));
            break;
        }
        case ExperimentKind::greens_check: {
            const double R = c.shape.radius;
            const Vec2 cc = c.shape.center;
            const std::vector<Vec2> sources = {cc + R * Vec2{0.3, 0.2},
                                               cc + R * Vec2{-0.4, 0.1},
                                               cc + R * Vec2{0.25, -0.35}};
            std::string csv = csv_row({"source_x", "source_y", "cell_x", "cell_y", "samples",
                                       "max_rel_err", "robin_samples", "violations",
                                       "worst_margin", "min_h", "max_h", "pcg_iterations"});
            std::string txt = "zero-boundary kernel check on the disc image oracle\n\n";
            double worst_err = 0.0;
            int total_violations = 0;
            for (std::size_t si = 0; si < sources.size(); ++si) {
                stage = "greens_source_" + std::to_string(si);
                auto t0 = t_now();
                GreenEval ge = green_function(*op, sources[si], {c.tol_pcg, 0});
                const Grid& g = dom->grid;
                double max_rel = 0.0;
                int samples = 0;
                for (int cell : dom->interior) {
                    Vec2 x = g.center(cell % g.nx, cell / g.nx);
                    if (dist(x, ge.source_cell) < 0.15 * R) continue;
                    if (dom->bdist[cell] < 0.2 * R) continue;
                    double oracle = disc_green_exact(x, ge.source_cell, cc, R);
                    double rel = std::fabs(ge.g.values[cell] - oracle) / std::fabs(oracle);
                    max_rel = std::max(max_rel, rel);
                    ++samples;
                }
                RobinCheckResult rb = robin_bounds_check(ge, *dom);
                walls.emplace_back(stage, secs_since(t0));
                worst_err = std::max(worst_err, max_rel);
                total_violations += rb.violations;
                csv += csv_row({format_g17(sources[si].x), format_g17(sources[si].y),
                                format_g17(ge.source_cell.x), format_g17(ge.source_cell.y),
                                std::to_string(samples), format_g17(max_rel),
                                std::to_string(rb.samples), std::to_string(rb.violations),
                                format_g17(rb.worst_margin), format_g17(rb.min_h),
                                format_g17(rb.max_h), std::to_string(ge.stats.iterations)});
                txt += "source (" + fmt9(sources[si].x) + ", " + fmt9(sources[si].y) + ")\n";
                txt += "  image-oracle max rel err = " + fmt9(max_rel) + " over " +
                       std::to_string(samples) + " cells (0.15R from source, 0.2R from shore)\n";
                txt += "  regular-part bound violations = " + std::to_string(rb.violations) +
                       " of " + std::to_string(rb.samples) +
                       ", worst margin = " + fmt9(rb.worst_margin) + "\n";
                txt += "  regular part range = [" + fmt9(rb.min_h) + ", " + fmt9(rb.max_h) +
                       "]\n";
                note("kernel source " + std::to_string(si) + ": max rel err " + fmt9(max_rel) +
                     ", violations " + std::to_string(rb.violations));
            }
            stage = "io";
            txt += "\noverall: max rel err = " + fmt9(worst_err) +
                   ", total bound violations = " + std::to_string(total_violations) + "\n";
            emit_text("greens.csv", csv);
            emit_text("greens.txt", txt);
            break;
        }
        case ExperimentKind::profile_check: {
            stage = "hypotheses";
            auto t0 = t_now();
            double eps_min = c.eps_schedule.back();
            double psi_scale =
                c.kappa * dom->sup_depth / kTwoPi * std::log(1.0 / std::min(eps_min, 0.99));
            // The range must reach well past 1/tau_min so exponential
            // domination shows its turnover instead of a range artifact.
            std::vector<double> taus = {0.5, 1.0, 2.0, 4.0};
            double s_max = std::max(32.0, 2.0 * psi_scale);
            HypothesisReport hr = vf->check_hypotheses(1e-4 * s_max, s_max, taus);
            walls.emplace_back(stage, secs_since(t0));

            stage = "io";
            std::string csv = csv_row({"tau", "max_value", "arg_max", "decaying"});
            for (const TailSample& t : hr.tails)
                csv += csv_row({format_g17(t.tau), format_g17(t.max_value),
                                format_g17(t.arg_max), t.decaying ? "1" : "0"});
            emit_text("profile.csv", csv);
            bool ok = hr.theta0_ok && hr.strictly_monotone && hr.tails_ok;
            std::string txt;
            txt += "profile hypothesis report (sampled on (0, " + fmt9(s_max) + "])\n\n";
            txt += "theta0 (sup F(s)/(s f(s)))      = " + fmt9(hr.theta0) + "  (< 1: " +
                   yesno(hr.theta0_ok) + ")\n";
            txt += "theta1 (inf Fstar(t)/(t finv))  = " + fmt9(hr.theta1) + "\n";
            txt += "strictly increasing on (0, s_max]: " + yesno(hr.strictly_monotone) + "\n";
            txt += "exponential tails dominated:       " + yesno(hr.tails_ok) + "\n";
            txt += "\nhypotheses satisfied: " + yesno(ok) + "\n";
            emit_text("profile.txt", txt);
            note("profile hypotheses: " + yesno(ok));
            break;
        }
        case ExperimentKind::stability: {
            double eps = c.eps_schedule.front();
            SolverParams p = params_for(c, eps, *vf);
            stage = "solve_eps_" + eps_label(eps);
            auto t0 = t_now();
            SteadyState st = fixed_point_solve(p, *dom, *op);
            walls.emplace_back(stage, secs_since(t0));
            note("solve eps=" + eps_label(eps) + ": iterations=" + std::to_string(st.iterations) +
                 " converged=" + yesno(st.converged));
            SweepRecord rec = make_sweep_record(st, p, *dom, *ds);
            res.states.push_back(st);
            res.records.push_back(rec);
            solve_artifacts(st);
            if (!st.converged)
                throw StageError(stage, "fixed-point iteration did not converge within " +
                                            std::to_string(p.max_iter) + " rounds");

            stage = "perturb";
            Perturbation pert;
            pert.kind = c.stability.perturbation;
            pert.shift_x = c.stability.shift_x;
            pert.shift_y = c.stability.shift_y;
            pert.delta = c.stability.delta;
            pert.noise_level = c.stability.noise_level;
            pert.seed = c.seed;
            ScalarField zeta0 = apply_perturbation(st.zeta, pert, st, *dom);
            emit_field("zeta_perturbed.lvf", zeta0, "zeta_perturbed", eps);

            stage = "transport";
            t0 = t_now();
            VectorField v0 = velocity_from(st.zeta, *op, *dom, &st.psi_free);
            double vmax = max_speed(v0, *dom);
            if (!(vmax > 0.0))
                throw std::runtime_error("steady state induces no motion; no turnover scale");
            double dt = c.stability.cfl * dom->grid.h / vmax;
            double tau = eddy_turnover(st, *op, *dom);
            double horizon = c.stability.turnovers * tau;
            StabilityReport rep = run_stability_experiment(st, pert, horizon, dt,
                                                           c.stability.p_list, *op, *dom,
                                                           c.stability.record_every);
            walls.emplace_back(stage, secs_since(t0));
            res.stability = rep;

            stage = "io";
            std::vector<std::string> head = {"t", "cfl"};
            for (double pe : c.stability.p_list) head.push_back("lp_" + eps_label(pe));
            head.insert(head.end(), {"energy_drift", "dist_drift", "circulation"});
            std::string csv = csv_row(head);
            for (std::size_t r = 0; r < rep.times.size(); ++r) {
                std::vector<std::string> row = {format_g17(rep.times[r]),
                                                format_g17(rep.cfl[r])};
                for (std::size_t k = 0; k < rep.lp_series.size(); ++k)
                    row.push_back(format_g17(rep.lp_series[k][r]));
                row.push_back(format_g17(rep.energy_drift[r]));
                row.push_back(format_g17(rep.dist_drift[r]));
                row.push_back(format_g17(rep.circulation[r]));
                csv += csv_row(row);
            }
            emit_text("series.csv", csv);
            emit_field("zeta_final.lvf", rep.final_zeta, "zeta_final", eps);

            double circ_drift = 0.0;
            for (double cv : rep.circulation)
                circ_drift = std::max(circ_drift, std::fabs(cv - st.circ));
            std::string txt;
            txt += "transport stability report\n\n";
            txt += "perturbation:      " + std::string(pert.kind == PerturbationKind::none
                                                           ? "none"
                                                       : pert.kind == PerturbationKind::shift
                                                           ? "shift"
                                                       : pert.kind == PerturbationKind::amplitude
                                                           ? "amplitude"
                                                           : "noise") +
                   "\n";
            txt += "eddy turnover:     " + fmt9(rep.eddy_turnover) + "\n";
            txt += "time step:         " + fmt9(rep.dt) + " (cfl " + fmt9(c.stability.cfl) +
                   ")\n";
            txt += "horizon:           " + fmt9(horizon) + " (" + fmt9(c.stability.turnovers) +
                   " turnovers, " + std::to_string(rep.steps_taken) + " steps taken)\n";
            txt += "completed:         " + yesno(rep.completed) + "\n";
            for (std::size_t k = 0; k < rep.p_list.size(); ++k)
                txt += "max Lp(nu) dist p=" + eps_label(rep.p_list[k]) + ":  " +
                       fmt9(rep.max_lp[k]) + "\n";
            txt += "max energy drift:  " + fmt9(rep.max_energy_drift) + " (relative)\n";
            txt += "max circ drift:    " + fmt9(circ_drift) + " (absolute)\n";
            txt += "max distro drift:  " + fmt9(rep.max_dist_drift) + "\n";
            txt += "note: " + rep.note + "\n";
            emit_text("stability.txt", txt);
            note("transport: steps=" + std::to_string(rep.steps_taken) + " completed=" +
                 yesno(rep.completed));
            if (!rep.completed)
                throw StageError("transport", "transport aborted early: " + rep.note);
            break;
        }
        }
    } catch (const StageError& e) {
        res.exit_code = 1;
        res.failed_stage = e.stage;
        res.error = e.what();
    } catch (const std::exception& e) {
        res.exit_code = 1;
        res.failed_stage = stage;
        res.error = e.what();
    }

    // Manifest, written last and atomically; reruns differ only in wall times.
    std::string man;
    man += "lakevort run manifest\n";
    man += "version: " + std::string(lakevort_version()) + "\n";
    if (res.exit_code == 0) {
        man += "status: ok\n";
    } else {
        man += "status: failed at stage '" + res.failed_stage + "'\n";
        std::string one_line = res.error;
        for (char& ch : one_line)
            if (ch == '\n') ch = ' ';
        man += "error: " + one_line + "\n";
    }
    man += "experiment: " + std::string(experiment_name(c.experiment)) + "\n";
    man += "out_dir: " + res.out_dir + "\n";
    man += "threads: " + std::to_string(opt.threads) + "\n";
    man += std::string("deterministic: ") + (opt.deterministic ? "true" : "false") + "\n";
    man += "seed: " + std::to_string(c.seed) + "\n";
    if (dom) {
        man += "grid: nx=" + std::to_string(dom->grid.nx) + " ny=" +
               std::to_string(dom->grid.ny) + " h=" + format_g17(dom->grid.h) +
               " interior_cells=" + std::to_string(dom->interior.size()) + "\n";
        man += "depth: sup=" + format_g17(dom->sup_depth) + " inf=" +
               format_g17(dom->inf_depth) + " floor=" + format_g17(dom->depth_floor) +
               " holder_alpha=" + format_g17(dom->holder_alpha) + "\n";
    }
    man += "tolerances: tol_fix=" + format_g17(c.tol_fix) + " tol_circ=" +
           format_g17(c.tol_circ) + " tol_pcg=" + format_g17(c.tol_pcg) + " max_iter=" +
           std::to_string(c.max_iter) + " damping=" + format_g17(c.damping) + "\n";
    if (c.lambda > 0.0) {
        man += "lambda_policy: fixed " + format_g17(c.lambda) + "\n";
    } else if (!std::isnan(lambda_resolved)) {
        man += "lambda_policy: auto (resolved " + format_g17(lambda_resolved) + " at eps=" +
               eps_label(c.eps_schedule.front()) + ")\n";
    } else {
        man += "lambda_policy: auto\n";
    }
    man += "wall_times_s:\n";
    for (const auto& [name, t] : walls) {
        char b[64];
        std::snprintf(b, sizeof b, "%.3f", t);
        man += "  " + name + ": " + b + "\n";
    }
    man += "files:\n";
    for (const Artifact& a : arts)
        man += "  " + a.name + " fnv1a=" + to_hex16(a.checksum) + " bytes=" +
               std::to_string(a.bytes) + "\n";
    man += "--- config ---\n";
    man += config_echo(c);
    man += "--- end config ---\n";
    try {
        write_text_atomic(res.out_dir + "/manifest.txt", man);
    } catch (const std::exception& e) {
        if (res.exit_code == 0) {
            res.exit_code = 1;
            res.failed_stage = "manifest";
            res.error = e.what();
        }
    }
    for (const Artifact& a : arts) res.files.push_back(a.name);
    res.files.push_back("manifest.txt");

    note(res.exit_code == 0
             ? "run complete: " + std::to_string(res.files.size()) + " files in " + res.out_dir
             : "run FAILED at stage '" + res.failed_stage + "': " + res.error);
    return res;
}

} // namespace lakevort
