#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <random>

#include <json.hpp>
#include <prf.h>

#include "config.hpp"
#include "output.hpp"

namespace prfcli {

namespace {

using nlohmann::json;

const double kPi = 3.14159265358979323846;

struct MetricDeleter {
    void operator()(prf_metric* p) const { prf_metric_destroy(p); }
};
struct BoundaryDeleter {
    void operator()(prf_boundary* p) const { prf_boundary_destroy(p); }
};
struct StationaryDeleter {
    void operator()(prf_stationary* p) const { prf_stationary_destroy(p); }
};
struct TrajectoryDeleter {
    void operator()(prf_trajectory* p) const { prf_trajectory_destroy(p); }
};
struct CurvatureDeleter {
    void operator()(prf_curvature* p) const { prf_curvature_destroy(p); }
};

using MetricPtr = std::unique_ptr<prf_metric, MetricDeleter>;
using BoundaryPtr = std::unique_ptr<prf_boundary, BoundaryDeleter>;
using StationaryPtr = std::unique_ptr<prf_stationary, StationaryDeleter>;
using TrajectoryPtr = std::unique_ptr<prf_trajectory, TrajectoryDeleter>;
using CurvaturePtr = std::unique_ptr<prf_curvature, CurvatureDeleter>;

void check(prf_status status, const std::string& context) {
    if (status != PRF_OK)
        throw ComputationError(context + ": " + prf_status_name(status) + " (" +
                               prf_last_error_message() + ")");
}

struct Problem {
    double phi_param = 0.0;
    double l = 1.0;
    int n = 1;
};

Problem read_problem(const Config& cfg) {
    Problem p;
    p.l = cfg.get_double("problem.l", 1.0);
    if (!(p.l > 0.0)) throw ConfigError("problem.l must be positive");
    p.n = cfg.get_int("problem.n", 1);
    if (p.n < 1) throw ConfigError("problem.n must be >= 1");
    const bool has_abs = cfg.has("problem.phi");
    const bool has_rel = cfg.has("problem.phi_over_pi_l2");
    if (has_abs && has_rel)
        throw ConfigError("give problem.phi or problem.phi_over_pi_l2, not both");
    if (has_rel) {
        p.phi_param = cfg.get_double("problem.phi_over_pi_l2", 0.0) * (kPi / p.l) * (kPi / p.l);
    } else {
        p.phi_param = cfg.get_double("problem.phi", 0.0);
    }
    return p;
}

BoundaryPtr make_boundary(const Config& cfg) {
    const std::string fam0 = cfg.get_string("boundary0.family", "constant");
    const std::string fam1 = cfg.get_string("boundary1.family", "constant");
    const auto known = [](const std::string& f) {
        return f == "constant" || f == "exponential" || f == "tabulated";
    };
    if (!known(fam0) || !known(fam1))
        throw ConfigError("boundary family must be constant, exponential or tabulated");
    prf_boundary* raw = nullptr;
    if (fam0 == "tabulated" || fam1 == "tabulated") {
        if (fam0 != fam1)
            throw ConfigError("tabulated boundaries must be tabulated at both endpoints");
        const std::vector<double> times = cfg.get_list("boundary0.times");
        const std::vector<double> v0 = cfg.get_list("boundary0.values");
        const std::vector<double> v1 = cfg.get_list("boundary1.values");
        if (times.size() < 3 || times.size() != v0.size() || times.size() != v1.size())
            throw ConfigError("tabulated boundaries need matching times/values lists");
        check(prf_boundary_tabulated(times.data(), v0.data(), v1.data(),
                                     static_cast<int>(times.size()), &raw),
              "boundary");
        return BoundaryPtr(raw);
    }
    if (fam0 == "constant" && fam1 == "constant") {
        check(prf_boundary_constant(cfg.get_double("boundary0.mu_tilde", 0.0),
                                    cfg.get_double("boundary1.mu_tilde", 0.0), &raw),
              "boundary");
        return BoundaryPtr(raw);
    }
    // Mixed constant/exponential endpoints: a constant endpoint is an
    // exponential with zero offset.
    const auto endpoint = [&cfg](const std::string& section, const std::string& family,
                                 double* mu, double* delta, double* rate) {
        *mu = cfg.get_double(section + ".mu_tilde", 0.0);
        if (family == "constant") {
            *delta = 0.0;
            *rate = 1.0;
        } else {
            *delta = cfg.get_double(section + ".delta", 0.0);
            *rate = cfg.get_double(section + ".rate", 1.0);
        }
    };
    double mu0, d0, r0, mu1, d1, r1;
    endpoint("boundary0", fam0, &mu0, &d0, &r0);
    endpoint("boundary1", fam1, &mu1, &d1, &r1);
    check(prf_boundary_exponential(mu0, d0, r0, mu1, d1, r1, &raw), "boundary");
    return BoundaryPtr(raw);
}

StationaryPtr solve_stationary(const Config& cfg, const Problem& p,
                               const prf_boundary* bd) {
    double mu0 = 0.0, mu1 = 0.0;
    check(prf_boundary_mu_tilde(bd, 0, &mu0), "mu_tilde");
    check(prf_boundary_mu_tilde(bd, 1, &mu1), "mu_tilde");
    const bool has_c = cfg.has("stationary.family_c");
    const double c = cfg.get_double("stationary.family_c", 0.0);
    prf_stationary* raw = nullptr;
    check(prf_stationary_solve(p.phi_param, p.l, mu0, mu1, has_c ? 1 : 0, c, &raw),
          "stationary");
    return StationaryPtr(raw);
}

std::vector<double> build_initial(const Config& cfg, const Problem& p, const prf_boundary* bd,
                                  int m) {
    const std::string kind = cfg.get_string("initial.kind", "stationary");
    std::vector<double> init(static_cast<size_t>(m) + 1, 0.0);
    if (kind == "sine") {
        const int mode = cfg.get_int("initial.mode", 1);
        const double amp = cfg.get_double("initial.amplitude", 1.0);
        for (int i = 0; i <= m; ++i)
            init[static_cast<size_t>(i)] = amp * std::sin(kPi * mode * i / double(m));
    } else if (kind == "stationary") {
        const StationaryPtr st = solve_stationary(cfg, p, bd);
        int solvable = 0;
        check(prf_stationary_has_solution(st.get(), &solvable), "stationary");
        if (!solvable)
            throw ComputationError("stationary: ResonanceUnsolvable (no reference profile)");
        check(prf_stationary_sample(st.get(), m, init.data()), "stationary sample");
    } else if (kind == "lift") {
        double mu0 = 0.0, mu1 = 0.0;
        check(prf_boundary_mu(bd, 0, 0.0, &mu0), "mu");
        check(prf_boundary_mu(bd, 1, 0.0, &mu1), "mu");
        for (int i = 0; i <= m; ++i) {
            const double x = p.l * i / m;
            init[static_cast<size_t>(i)] = mu0 * (p.l - x) / p.l + mu1 * x / p.l;
        }
    } else if (kind != "zero") {
        throw ConfigError("initial.kind must be sine, stationary, lift or zero");
    }
    const double parabola = cfg.get_double("initial.parabola", 0.0);
    if (parabola != 0.0) {
        for (int i = 0; i <= m; ++i) {
            const double x = p.l * i / m;
            init[static_cast<size_t>(i)] += parabola * x * (p.l - x);
        }
    }
    if (cfg.get_bool("initial.add_lift", false)) {
        for (int i = 0; i <= m; ++i) {
            double u = 0.0;
            check(prf_lift(bd, 0.0, p.l * i / m, p.l, &u), "lift");
            init[static_cast<size_t>(i)] += u;
        }
    }
    return init;
}

bool is_resonant(double phi_param, double l) {
    const double crit = (kPi / l) * (kPi / l);
    return std::abs(phi_param - crit) <= 1e-12 * crit;
}

std::vector<double> resolve_thetas(const Options& opt, const Config& cfg) {
    if (!opt.thetas.empty()) return opt.thetas;
    std::vector<double> from_cfg = cfg.get_list("checks.theta");
    if (!from_cfg.empty()) return from_cfg;
    return {0.25, 0.5, 0.75};
}

struct BackendSelection {
    bool fd = true;
    bool spectral = false;
};

BackendSelection resolve_backend(const Options& opt, const Config& cfg) {
    std::string token = opt.backend.empty() ? cfg.get_string("flow.backend", "fd")
                                            : opt.backend;
    BackendSelection sel;
    if (token == "fd") {
        sel.fd = true;
        sel.spectral = false;
    } else if (token == "spectral") {
        sel.fd = false;
        sel.spectral = true;
    } else if (token == "both") {
        sel.fd = sel.spectral = true;
    } else {
        throw ConfigError("backend must be fd, spectral or both");
    }
    return sel;
}

void write_trajectory_csv(RunDirectory& run, const std::string& name,
                          const prf_trajectory* traj, double l) {
    const int m = prf_trajectory_grid_intervals(traj);
    const int count = prf_trajectory_snapshot_count(traj);
    CsvWriter csv(run.file(name), "prf-trajectory-v1", {"t", "x", "phi"});
    std::vector<double> phi(static_cast<size_t>(m) + 1);
    for (int k = 0; k < count; ++k) {
        double t = 0.0;
        check(prf_trajectory_time(traj, k, &t), "trajectory time");
        check(prf_trajectory_values(traj, k, phi.data()), "trajectory values");
        for (int i = 0; i <= m; ++i)
            csv.row({t, l * i / m, phi[static_cast<size_t>(i)]});
    }
    csv.close();
}

void write_curvature_csv(RunDirectory& run, const std::string& name,
                         const prf_trajectory* traj, double l, int fiber_dim) {
    const int m = prf_trajectory_grid_intervals(traj);
    const int count = prf_trajectory_snapshot_count(traj);
    CsvWriter csv(run.file(name), "prf-curvature-v1",
                  {"t", "x", "a", "rho", "tau1", "ric_n"});
    std::vector<double> phi(static_cast<size_t>(m) + 1);
    std::vector<double> a(phi.size()), rho(phi.size()), tau1(phi.size()), ric(phi.size());
    for (int k = 0; k < count; ++k) {
        double t = 0.0;
        check(prf_trajectory_time(traj, k, &t), "trajectory time");
        check(prf_trajectory_values(traj, k, phi.data()), "trajectory values");
        prf_metric* metric = nullptr;
        check(prf_metric_create(l, fiber_dim, phi.data(), m + 1, &metric), "metric");
        const MetricPtr guard(metric);
        prf_curvature* curv = nullptr;
        check(prf_curvature_eval(metric, &curv), "curvature");
        const CurvaturePtr cguard(curv);
        check(prf_curvature_get(curv, a.data(), rho.data(), tau1.data(), ric.data(), nullptr,
                                nullptr, nullptr),
              "curvature data");
        for (int i = 0; i <= m; ++i)
            csv.row({t, l * i / m, a[static_cast<size_t>(i)], rho[static_cast<size_t>(i)],
                     tau1[static_cast<size_t>(i)], ric[static_cast<size_t>(i)]});
    }
    csv.close();
}

json identity_report(const prf_trajectory* traj, const Problem& p, double quotient_cap,
                     double l, int m) {
    json out;
    // Riccati on the final snapshot.
    std::vector<double> phi(static_cast<size_t>(m) + 1);
    const int count = prf_trajectory_snapshot_count(traj);
    check(prf_trajectory_values(traj, count - 1, phi.data()), "trajectory values");
    prf_metric* metric = nullptr;
    check(prf_metric_create(l, p.n, phi.data(), m + 1, &metric), "metric");
    const MetricPtr guard(metric);
    prf_residual_report rep{};
    check(prf_check_riccati(metric, quotient_cap, &rep), "riccati");
    out["riccati"] = {{"max", rep.max_residual}, {"rms", rep.rms_residual},
                      {"points", rep.points}};

    check(prf_check_a_evolution(traj, p.phi_param, quotient_cap, &rep), "a evolution");
    out["a_evolution"] = {{"max", rep.max_residual}, {"rms", rep.rms_residual},
                          {"points", rep.points}};
    double gap = 0.0;
    check(prf_check_tau1_evolution(traj, p.n, quotient_cap, &rep, &gap), "tau1 evolution");
    out["tau1_evolution"] = {{"max", rep.max_residual}, {"rms", rep.rms_residual},
                             {"form_gap", gap}, {"points", rep.points}};
    check(prf_check_rn_evolution(traj, quotient_cap, &rep), "rn evolution");
    out["rn_evolution"] = {{"max", rep.max_residual}, {"rms", rep.rms_residual},
                           {"points", rep.points}};
    return out;
}

// Reference the run converges to, when one exists: the resonance limit profile
// or the stationary solution.
std::optional<std::vector<double>> reference_profile(const Config& cfg, const Problem& p,
                                                     const prf_boundary* bd,
                                                     const std::vector<double>& init, int m) {
    if (is_resonant(p.phi_param, p.l)) {
        double mu0 = 0.0, mu1 = 0.0;
        check(prf_boundary_mu_tilde(bd, 0, &mu0), "mu_tilde");
        check(prf_boundary_mu_tilde(bd, 1, &mu1), "mu_tilde");
        if (mu0 != 0.0 || mu1 != 0.0) return std::nullopt; // non-stabilizing case
        prf_metric* metric = nullptr;
        check(prf_metric_create(p.l, p.n, init.data(), m + 1, &metric), "metric");
        const MetricPtr guard(metric);
        double coeff = 0.0;
        check(prf_limit_profile_resonance(metric, bd, p.l, &coeff), "limit profile");
        std::vector<double> ref(static_cast<size_t>(m) + 1);
        for (int i = 0; i <= m; ++i)
            ref[static_cast<size_t>(i)] = coeff * std::sin(kPi * i / double(m));
        return ref;
    }
    const StationaryPtr st = solve_stationary(cfg, p, bd);
    int solvable = 0;
    check(prf_stationary_has_solution(st.get(), &solvable), "stationary");
    if (!solvable) return std::nullopt;
    std::vector<double> ref(static_cast<size_t>(m) + 1);
    check(prf_stationary_sample(st.get(), m, ref.data()), "stationary sample");
    return ref;
}

double sup_gap(const prf_trajectory* traj, int snapshot, const std::vector<double>& ref) {
    std::vector<double> phi(ref.size());
    check(prf_trajectory_values(traj, snapshot, phi.data()), "trajectory values");
    double out = 0.0;
    for (size_t i = 0; i < ref.size(); ++i) out = std::max(out, std::abs(phi[i] - ref[i]));
    return out;
}

void write_plot_script(RunDirectory& run, bool have_bounds, bool have_spectral) {
    std::string script;
    script += "set datafile separator ','\n";
    script += "set grid\n";
    script += "set key left top\n";
    script += "set term pngcairo size 1000,700\n";
    script += "set output 'profiles.png'\n";
    script += "set xlabel 'x'\nset ylabel 'phi'\n";
    script += "plot 'profiles.csv' using 1:2 with lines title 'phi(0)', \\\n";
    script += "     'profiles.csv' using 1:3 with lines title 'phi(t_end)'";
    if (have_spectral) script += ", \\\n     'profiles.csv' using 1:4 with lines title 'spectral(t_end)'";
    script += "\n";
    if (have_bounds) {
        script += "set output 'bounds.png'\n";
        script += "set logscale y\n";
        script += "set xlabel 't'\nset ylabel 'sup deviation'\n";
        script += "plot 'bounds.csv' using 1:3 with points title 'observed', \\\n";
        script += "     'bounds.csv' using 1:4 with lines title 'bound'\n";
    }
    const std::filesystem::path path = run.file("plot.gp");
    std::ofstream out(path, std::ios::binary);
    out << script;
}

// Shared by evolve and sweep: runs the configured backends and fills in the
// artifacts + manifest entries. Returns the fd (or only) trajectory.
struct EvolveArtifacts {
    TrajectoryPtr primary;
    json checks;
    bool diverged = false;
};

EvolveArtifacts run_evolve(const Options& opt, const Config& cfg, RunDirectory& run) {
    const Problem p = read_problem(cfg);
    const BoundaryPtr bd = make_boundary(cfg);
    const int m = cfg.get_int("flow.m", 200);

    prf_flow_config flow{};
    flow.phi_param = p.phi_param;
    flow.t_end = cfg.get_double("flow.t_end", 1.0);
    flow.dt = cfg.get_double("flow.dt", 1e-4);
    flow.m = m;
    flow.series_terms = cfg.get_int("flow.series_terms", 0);
    flow.snapshot_stride = cfg.get_int("flow.snapshot_stride", 100);

    const std::vector<double> init = build_initial(cfg, p, bd.get(), m);
    prf_metric* metric_raw = nullptr;
    check(prf_metric_create(p.l, p.n, init.data(), m + 1, &metric_raw), "initial metric");
    const MetricPtr metric(metric_raw);

    const BackendSelection sel = resolve_backend(opt, cfg);
    TrajectoryPtr fd, spectral;
    if (sel.fd) {
        flow.backend = PRF_BACKEND_FINITE_DIFFERENCE;
        prf_trajectory* t = nullptr;
        check(prf_evolve(metric.get(), bd.get(), &flow, &t), "evolve (fd)");
        fd.reset(t);
        write_trajectory_csv(run, "trajectory_fd.csv", fd.get(), p.l);
        write_curvature_csv(run, "curvature_fd.csv", fd.get(), p.l, p.n);
    }
    if (sel.spectral) {
        flow.backend = PRF_BACKEND_SPECTRAL;
        prf_trajectory* t = nullptr;
        check(prf_evolve(metric.get(), bd.get(), &flow, &t), "evolve (spectral)");
        spectral.reset(t);
        write_trajectory_csv(run, "trajectory_spectral.csv", spectral.get(), p.l);
        write_curvature_csv(run, "curvature_spectral.csv", spectral.get(), p.l, p.n);
    }
    prf_trajectory* primary = fd ? fd.get() : spectral.get();

    json& manifest = run.manifest();
    manifest["parameters"] = {{"phi", p.phi_param}, {"l", p.l},   {"n", p.n},
                              {"m", m},             {"t_end", flow.t_end},
                              {"dt", flow.dt},      {"snapshot_stride", flow.snapshot_stride}};
    manifest["config"] = cfg.entries(); // full resolved key-value view

    int diverged = 0;
    double t_div = 0.0;
    check(prf_trajectory_divergence(primary, &diverged, &t_div), "divergence flag");
    manifest["divergence_detected"] = diverged != 0;
    if (diverged) manifest["divergence_time"] = t_div;

    if (fd && spectral) {
        double dist = 0.0;
        check(prf_trajectory_distance(fd.get(), spectral.get(), &dist), "backend distance");
        manifest["backend_sup_distance"] = dist;
    }

    json checks;
    const double quotient_cap = cfg.get_double("checks.quotient_cap", 0.0);
    if (cfg.get_bool("checks.identities", true) && !diverged) {
        if (fd) checks["identities_fd"] = identity_report(fd.get(), p, quotient_cap, p.l, m);
        if (spectral)
            checks["identities_spectral"] =
                identity_report(spectral.get(), p, quotient_cap, p.l, m);
        std::ofstream out(run.file("identities.json"), std::ios::binary);
        out << checks.dump(2) << "\n";
    }

    const double envelope_c = cfg.get_double("checks.envelope_c", 0.0);
    if (envelope_c > 0.0 && !diverged) {
        int holds = 0;
        check(prf_check_rn_envelope(primary, envelope_c, &holds), "envelope");
        checks["envelope"] = {{"c_bound", envelope_c}, {"holds", holds != 0}};
    }

    // Deviation from the limiting reference plus the requested bound report.
    std::string bound_kind = cfg.get_string("checks.bound", "auto");
    if (bound_kind == "auto")
        bound_kind = is_resonant(p.phi_param, p.l)
                         ? "resonance"
                         : (p.phi_param < (kPi / p.l) * (kPi / p.l) ? "subcritical" : "none");
    const std::optional<std::vector<double>> reference =
        diverged ? std::nullopt : reference_profile(cfg, p, bd.get(), init, m);
    if (reference) {
        const int count = prf_trajectory_snapshot_count(primary);
        manifest["final_sup_deviation"] = sup_gap(primary, count - 1, *reference);
    }
    bool wrote_bounds = false;
    if ((bound_kind == "subcritical" || bound_kind == "resonance") && !diverged) {
        const std::vector<double> thetas = resolve_thetas(opt, cfg);
        CsvWriter csv(run.file("bounds.csv"), "prf-bounds-v1",
                      {"t", "theta", "observed", "bound", "margin", "truncation_tail"});
        double min_margin = std::numeric_limits<double>::infinity();
        const int count = prf_trajectory_snapshot_count(primary);
        for (int k = 0; k < count; ++k) {
            double t = 0.0;
            check(prf_trajectory_time(primary, k, &t), "trajectory time");
            if (t < 0.1) continue; // series constants diverge as t -> 0+
            for (double theta : thetas) {
                prf_bound_entry entry{};
                if (bound_kind == "subcritical")
                    check(prf_subcritical_bound(primary, bd.get(), p.phi_param, theta, t,
                                                &entry),
                          "subcritical bound");
                else
                    check(prf_resonance_bound(primary, bd.get(), theta, t, &entry),
                          "resonance bound");
                csv.row({entry.t, entry.theta, entry.observed, entry.bound, entry.margin,
                         entry.truncation_tail});
                min_margin = std::min(min_margin, entry.margin);
            }
        }
        csv.close();
        wrote_bounds = true;
        checks["bound"] = {{"kind", bound_kind}, {"min_margin", min_margin}};
    }

    if (cfg.get_bool("checks.growth", false)) {
        int kind = 0;
        double rate = 0.0, slope = 0.0;
        const prf_status st = prf_divergence_rate(primary, &kind, &rate, &slope);
        if (st == PRF_OK) {
            checks["growth"] = {{"kind", kind == 0 ? "none"
                                         : kind == 1 ? "exponential" : "linear"},
                                {"rate", rate},
                                {"slope", slope}};
        } else {
            // A truncated divergent run may not leave enough snapshots to fit;
            // record the reason rather than failing the whole run.
            checks["growth"] = {{"error", prf_status_name(st)}};
        }
    }
    manifest["checks"] = checks;

    // Profile slices for plotting / quick inspection.
    {
        const int count = prf_trajectory_snapshot_count(primary);
        std::vector<double> first(static_cast<size_t>(m) + 1), last(first.size());
        check(prf_trajectory_values(primary, 0, first.data()), "trajectory values");
        check(prf_trajectory_values(primary, count - 1, last.data()), "trajectory values");
        std::vector<double> sp_last;
        if (fd && spectral) {
            sp_last.resize(first.size());
            check(prf_trajectory_values(spectral.get(),
                                        prf_trajectory_snapshot_count(spectral.get()) - 1,
                                        sp_last.data()),
                  "trajectory values");
        }
        CsvWriter csv(run.file("profiles.csv"), "prf-profiles-v1",
                      fd && spectral
                          ? std::vector<std::string>{"x", "phi_first", "phi_last",
                                                     "phi_last_spectral"}
                          : std::vector<std::string>{"x", "phi_first", "phi_last"});
        for (int i = 0; i <= m; ++i) {
            std::vector<double> row = {p.l * i / m, first[static_cast<size_t>(i)],
                                       last[static_cast<size_t>(i)]};
            if (!sp_last.empty()) row.push_back(sp_last[static_cast<size_t>(i)]);
            csv.row(row);
        }
        csv.close();
    }
    if (cfg.get_bool("output.plot", false)) write_plot_script(run, wrote_bounds, sel.spectral);

    EvolveArtifacts out;
    out.primary = fd ? std::move(fd) : std::move(spectral);
    out.checks = checks;
    out.diverged = diverged != 0;
    return out;
}

} // namespace

int cmd_stationary(const Options& opt) {
    const auto start = std::chrono::steady_clock::now();
    const Config cfg = Config::parse_file(opt.config_path);
    const Problem p = read_problem(cfg);
    const BoundaryPtr bd = make_boundary(cfg);
    const StationaryPtr st = solve_stationary(cfg, p, bd.get());

    prf_regime regime{};
    check(prf_stationary_regime(st.get(), &regime), "regime");
    int solvable = 0;
    check(prf_stationary_has_solution(st.get(), &solvable), "has_solution");
    if (regime == PRF_REGIME_RESONANCE_UNSOLVABLE)
        throw ComputationError("stationary: ResonanceUnsolvable (mu_tilde_1 != -mu_tilde_0)");
    if (!solvable)
        throw ComputationError(
            "stationary: resonance family needs stationary.family_c for a concrete profile");

    RunDirectory run(opt.out_dir, opt.run_id, opt.force);
    const int m = cfg.get_int("flow.m", 200);
    std::vector<double> samples(static_cast<size_t>(m) + 1);
    check(prf_stationary_sample(st.get(), m, samples.data()), "sample");
    {
        CsvWriter csv(run.file("stationary.csv"), "prf-stationary-v1", {"x", "phi_tilde"});
        for (int i = 0; i <= m; ++i)
            csv.row({p.l * i / m, samples[static_cast<size_t>(i)]});
        csv.close();
    }
    double residual = 0.0;
    check(prf_stationary_residual(st.get(), p.phi_param, m, &residual), "residual");
    int stable = 0;
    check(prf_stationary_stable(st.get(), &stable), "stable");

    static const char* kRegimeNames[] = {"SubcriticalTrig",  "Zero",
                                         "Negative",         "ResonanceFamily",
                                         "ResonanceUnsolvable", "Supercritical"};
    json& manifest = run.manifest();
    manifest["parameters"] = {{"phi", p.phi_param}, {"l", p.l}, {"m", m}};
    manifest["checks"] = {{"regime", kRegimeNames[regime]},
                          {"stable_under_flow", stable != 0},
                          {"residual", residual}};
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    run.finalize("stationary", seconds);
    std::cout << "stationary: regime=" << kRegimeNames[regime] << " residual=" << residual
              << "\n";
    return 0;
}

int cmd_evolve(const Options& opt) {
    const auto start = std::chrono::steady_clock::now();
    const Config cfg = Config::parse_file(opt.config_path);
    RunDirectory run(opt.out_dir, opt.run_id, opt.force);
    const EvolveArtifacts artifacts = run_evolve(opt, cfg, run);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    run.finalize("evolve", seconds);
    std::cout << "evolve: " << (artifacts.diverged ? "diverged" : "completed") << ", outputs in "
              << run.path().string() << "\n";
    return 0;
}

int cmd_eigenflow(const Options& opt) {
    const auto start = std::chrono::steady_clock::now();
    const Config cfg = Config::parse_file(opt.config_path);
    std::vector<double> mus = cfg.get_list("eigenflow.mus");
    if (mus.empty()) mus = {cfg.get_double("eigenflow.mu0", 0.5)};
    const double phi_param = cfg.get_double("eigenflow.phi", 1.0);
    const double t_end = cfg.get_double("eigenflow.t_end", 5.0);
    const double dt = cfg.get_double("eigenflow.dt", 1e-3);
    const int samples = cfg.get_int("eigenflow.samples", 100);
    if (!(dt > 0.0) || !(t_end > 0.0) || samples < 2)
        throw ConfigError("eigenflow needs positive dt, t_end and >= 2 samples");

    RunDirectory run(opt.out_dir, opt.run_id, opt.force);
    json& manifest = run.manifest();
    manifest["parameters"] = {{"phi", phi_param}, {"t_end", t_end}, {"dt", dt},
                              {"mus", mus}};

    std::vector<std::string> columns = {"t"};
    for (size_t i = 0; i < mus.size(); ++i) {
        columns.push_back("mu" + std::to_string(i) + "_closed");
        columns.push_back("mu" + std::to_string(i) + "_rk4");
    }
    CsvWriter csv(run.file("eigenflow.csv"), "prf-eigenflow-v1", columns);

    const long steps = std::lround(t_end / dt);
    std::vector<std::vector<double>> rk(mus.size());
    json blow_ups = json::array();
    for (size_t i = 0; i < mus.size(); ++i) {
        rk[i].resize(static_cast<size_t>(steps) + 1);
        int64_t written = 0, halted = -1;
        check(prf_eigen_rk4(mus[i], phi_param, dt, steps, rk[i].data(), &written, &halted),
              "rk4");
        rk[i].resize(static_cast<size_t>(written));
        int has_star = 0;
        double t_star = 0.0;
        check(prf_eigen_blow_up_time(mus[i], phi_param, &has_star, &t_star), "blow-up time");
        if (has_star) blow_ups.push_back({{"mu0", mus[i]}, {"t_star", t_star}});
    }
    manifest["blow_ups"] = blow_ups;

    double max_gap = 0.0;
    for (int s = 0; s <= samples; ++s) {
        // Sample on RK4 grid times so closed form and RK4 are compared at the
        // same instant.
        const size_t idx = static_cast<size_t>(std::lround(double(steps) * s / samples));
        const double t = static_cast<double>(idx) * dt;
        std::vector<double> row = {t};
        for (size_t i = 0; i < mus.size(); ++i) {
            double closed = std::numeric_limits<double>::quiet_NaN();
            const prf_status st = prf_eigen_closed_form(mus[i], phi_param, t, &closed);
            if (st != PRF_OK && st != PRF_ERR_BLOW_UP) check(st, "closed form");
            const double rk_val = idx < rk[i].size()
                                      ? rk[i][idx]
                                      : std::numeric_limits<double>::quiet_NaN();
            row.push_back(closed);
            row.push_back(rk_val);
            if (std::isfinite(closed) && std::isfinite(rk_val))
                max_gap = std::max(max_gap, std::abs(closed - rk_val));
        }
        csv.row(row);
    }
    csv.close();
    manifest["checks"] = {{"max_closed_rk4_gap", max_gap}};

    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    run.finalize("eigenflow", seconds);
    std::cout << "eigenflow: max closed-form vs RK4 gap " << max_gap << "\n";
    return 0;
}

int cmd_ferus(unsigned long long p, unsigned long long n) {
    int ok = 0;
    check(prf_ferus_check(p, n, &ok), "ferus");
    std::cout << (ok ? "true" : "false") << "\n";
    return 0;
}

int cmd_sweep(const Options& opt) {
    const auto start = std::chrono::steady_clock::now();
    const Config cfg = Config::parse_file(opt.config_path);
    std::vector<double> phi_factors = cfg.get_list("sweep.phi_over_pi_l2");
    if (phi_factors.empty()) phi_factors = {0.5, 1.0, 1.5};
    std::vector<double> lengths = cfg.get_list("sweep.l");
    if (lengths.empty()) lengths = {cfg.get_double("problem.l", 1.0)};

    RunDirectory run(opt.out_dir, opt.run_id, opt.force);

    struct SweepCase {
        int index;
        double factor;
        double l;
    };
    std::vector<SweepCase> cases;
    int index = 0;
    for (double l : lengths)
        for (double f : phi_factors) cases.push_back({index++, f, l});

    struct SweepResult {
        int index = 0;
        double factor = 0.0, l = 0.0, phi = 0.0;
        std::string regime = "?";
        std::string classification = "error";
        double rate = 0.0, slope = 0.0, final_deviation = 0.0;
        bool bound_ok = true;
        std::string error;
    };

    const auto run_case = [&](const SweepCase& c) {
        SweepResult r;
        r.index = c.index;
        r.factor = c.factor;
        r.l = c.l;
        r.phi = c.factor * (kPi / c.l) * (kPi / c.l);
        try {
            // Each case gets its own resolved config and private run directory.
            char name[64];
            std::snprintf(name, sizeof(name), "case_%03d", c.index);
            RunDirectory sub(run.path(), name, true);

            std::map<std::string, std::string> entries = cfg.entries();
            entries["problem.phi"] = format_double(r.phi);
            entries.erase("problem.phi_over_pi_l2");
            entries["problem.l"] = format_double(c.l);
            std::string text;
            for (const auto& [k, v] : entries) {
                const size_t dot = k.find('.');
                // Re-emit as section-qualified lines.
                text += "[" + k.substr(0, dot) + "]\n" + k.substr(dot + 1) + " = " + v + "\n";
            }
            const Config resolved = Config::parse_text(text);

            const EvolveArtifacts artifacts = run_evolve(opt, resolved, sub);
            sub.finalize("evolve", 0.0);

            prf_regime regime{};
            {
                const Problem p = read_problem(resolved);
                const BoundaryPtr bd = make_boundary(resolved);
                const StationaryPtr st = solve_stationary(resolved, p, bd.get());
                check(prf_stationary_regime(st.get(), &regime), "regime");
            }
            static const char* kRegimeNames[] = {"SubcriticalTrig",  "Zero",
                                                 "Negative",         "ResonanceFamily",
                                                 "ResonanceUnsolvable", "Supercritical"};
            r.regime = kRegimeNames[regime];

            int kind = 0;
            double rate = 0.0, slope = 0.0;
            check(prf_divergence_rate(artifacts.primary.get(), &kind, &rate, &slope),
                  "divergence rate");
            r.rate = rate;
            r.slope = slope;
            if (artifacts.checks.contains("bound"))
                r.bound_ok = artifacts.checks["bound"]["min_margin"].get<double>() >= -1e-8;
            if (sub.manifest().contains("final_sup_deviation"))
                r.final_deviation = sub.manifest()["final_sup_deviation"].get<double>();

            const bool grows = kind != PRF_GROWTH_NONE || artifacts.diverged;
            if (grows)
                r.classification = "diverge";
            else if (regime == PRF_REGIME_RESONANCE_FAMILY ||
                     regime == PRF_REGIME_RESONANCE_UNSOLVABLE)
                r.classification = "resonance";
            else
                r.classification = "converge";
        } catch (const std::exception& e) {
            r.error = e.what();
            r.classification = "error";
        }
        return r;
    };

    // Independent cases; run them concurrently and join in order.
    std::vector<std::future<SweepResult>> futures;
    for (const SweepCase& c : cases)
        futures.push_back(std::async(std::launch::async, run_case, c));
    std::vector<SweepResult> results;
    for (auto& f : futures) results.push_back(f.get());

    CsvWriter csv(run.file("summary.csv"), "prf-sweep-v1",
                  {"case", "phi_over_pi_l2", "l", "phi", "regime", "classification", "rate",
                   "slope", "final_deviation", "bound_ok", "error"});
    size_t failures = 0;
    for (const SweepResult& r : results) {
        if (!r.error.empty()) ++failures;
        csv.row_mixed({std::to_string(r.index), format_double(r.factor), format_double(r.l),
                       format_double(r.phi), r.regime, r.classification, format_double(r.rate),
                       format_double(r.slope), format_double(r.final_deviation),
                       r.bound_ok ? "true" : "false", r.error});
    }
    csv.close();

    json& manifest = run.manifest();
    manifest["cases"] = static_cast<int>(results.size());
    manifest["failures"] = static_cast<int>(failures);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    run.finalize("sweep", seconds);
    std::cout << "sweep: " << results.size() - failures << "/" << results.size()
              << " cases completed\n";
    return failures == results.size() ? 2 : 0;
}

int cmd_verify(const Options& opt) {
    unsigned long long seed = opt.seed.value_or(20240815ull);
    int failures = 0;
    const auto report = [&failures](const std::string& name, bool pass, double value) {
        std::cout << (pass ? "PASS " : "FAIL ") << name << " (" << value << ")\n";
        if (!pass) ++failures;
    };

    // Riccati identity: refinement ratio on cosh.
    {
        double resid[2] = {0.0, 0.0};
        for (int level = 0; level < 2; ++level) {
            const int m = 100 << level;
            std::vector<double> phi(static_cast<size_t>(m) + 1);
            for (int i = 0; i <= m; ++i) phi[static_cast<size_t>(i)] = std::cosh(i / double(m));
            prf_metric* metric = nullptr;
            check(prf_metric_create(1.0, 1, phi.data(), m + 1, &metric), "metric");
            const MetricPtr guard(metric);
            prf_residual_report rep{};
            check(prf_check_riccati(metric, 0.0, &rep), "riccati");
            resid[level] = rep.max_residual;
        }
        const double order = std::log2(resid[0] / resid[1]);
        report("riccati_convergence_order", order >= 1.8, order);
    }

    // Evolution identities on a decaying-mode run.
    {
        const int m = 200;
        std::vector<double> phi(static_cast<size_t>(m) + 1);
        for (int i = 0; i <= m; ++i)
            phi[static_cast<size_t>(i)] = std::sin(kPi * i / double(m));
        prf_metric* metric = nullptr;
        check(prf_metric_create(1.0, 2, phi.data(), m + 1, &metric), "metric");
        const MetricPtr guard(metric);
        prf_boundary* bd = nullptr;
        check(prf_boundary_constant(0.0, 0.0, &bd), "boundary");
        const BoundaryPtr bguard(bd);
        prf_flow_config flow{};
        flow.phi_param = 0.0;
        flow.t_end = 0.2;
        flow.dt = 1e-4;
        flow.m = m;
        flow.backend = PRF_BACKEND_FINITE_DIFFERENCE;
        flow.snapshot_stride = 200;
        prf_trajectory* traj = nullptr;
        check(prf_evolve(metric, bd, &flow, &traj), "evolve");
        const TrajectoryPtr tguard(traj);
        prf_residual_report rep{};
        check(prf_check_a_evolution(traj, 0.0, 0.0, &rep), "a evolution");
        report("a_evolution_residual", rep.max_residual <= 1e-2, rep.max_residual);
        double gap = 1.0;
        check(prf_check_tau1_evolution(traj, 2, 0.0, &rep, &gap), "tau1 evolution");
        report("tau1_residual", rep.max_residual <= 2e-2, rep.max_residual);
        report("tau1_form_gap", gap <= 2.3e-15, gap);
        check(prf_check_rn_evolution(traj, 0.0, &rep), "rn evolution");
        report("rn_residual", rep.max_residual <= 5e-2, rep.max_residual);
        int holds = 0;
        check(prf_check_rn_envelope(traj, kPi * kPi * 1.01, &holds), "envelope");
        report("rn_envelope", holds == 1, holds);
    }

    // Randomized ODE envelope domination.
    {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> rate(-6.0, -0.3);
        std::uniform_real_distribution<double> init(-2.0, 2.0);
        std::uniform_real_distribution<double> amp(0.1, 2.0);
        double worst = std::numeric_limits<double>::infinity();
        for (int rep = 0; rep < 50; ++rep) {
            const double a = rate(rng), y0 = init(rng), c = amp(rng);
            double y = y0;
            const double dt = 1e-3;
            for (int k = 0; k < 2000; ++k) {
                const auto rhs = [&](double yy) { return a * yy + c; };
                const double k1 = rhs(y);
                const double k2 = rhs(y + dt / 2 * k1);
                const double k3 = rhs(y + dt / 2 * k2);
                const double k4 = rhs(y + dt * k3);
                y += dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
                double env = 0.0;
                check(prf_ode_envelope(a, y0, c, c, (k + 1) * dt, 0.5, &env), "envelope");
                worst = std::min(worst, env - std::abs(y));
            }
        }
        report("ode_envelope_domination", worst >= -1e-10, worst);
    }

    std::cout << (failures == 0 ? "verify: all checks passed\n"
                                : "verify: some checks FAILED\n");
    return failures == 0 ? 0 : 2;
}

} // namespace prfcli
