#include "gpps/run.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace gpps {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json energy_json(const EnergyBreakdown& e)
{
    return {{"total", e.total},
            {"kinetic", e.kinetic},
            {"potential", e.potential},
            {"contact", e.contact},
            {"dipolar", e.dipolar}};
}

void atomic_write(const fs::path& path, const std::string& text)
{
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::trunc);
        if (!os)
            throw std::runtime_error("cannot open for writing: " + tmp.string());
        os << text;
        if (!os.flush())
            throw std::runtime_error("short write: " + tmp.string());
    }
    fs::rename(tmp, path);
}

struct TaskOutput {
    json summary;
    std::vector<std::string> files; // names relative to out_dir
    int exit_code = 0;
    std::string message = "ok";
};

ComplexField evolve_initial_state(const RunConfig& cfg)
{
    ComplexField psi0;
    if (cfg.evolve.init == "gaussian")
        psi0 = gaussian_init(cfg.grid, cfg.evolve.width);
    else if (cfg.evolve.init == "random")
        psi0 = random_smooth_init(cfg.grid, cfg.seed);
    else {
        psi0 = read_snapshot(cfg.evolve.init_file);
        if (!(psi0.grid == cfg.grid))
            throw std::invalid_argument("evolve: init_file grid does not match the config grid");
    }
    return psi0;
}

TaskOutput run_groundstate(const RunConfig& cfg, const fs::path& out)
{
    const ComplexField init = cfg.ground.init == "gaussian"
                                  ? gaussian_init(cfg.grid, cfg.ground.width)
                                  : random_smooth_init(cfg.grid, cfg.seed);
    const GroundStateResult res = minimize_gradient_flow(cfg.model, init, cfg.ground.options);

    TaskOutput t;
    write_snapshot((out / "field.snap").string(), to_complex(res.phi));
    t.files.push_back("field.snap");
    json e;
    e["energy"] = energy_json(res.energy);
    e["iterations"] = res.iterations;
    e["residual"] = res.residual;
    e["tau_final"] = res.tau_final;
    e["halvings"] = res.halvings;
    e["converged"] = res.converged;
    e["nonexistence_suspected"] = res.nonexistence_suspected;
    atomic_write(out / "energy.json", e.dump(2) + "\n");
    t.files.push_back("energy.json");
    write_iterations_csv((out / "iterations.csv").string(), res.history);
    t.files.push_back("iterations.csv");

    t.summary = e;
    if (res.nonexistence_suspected) {
        t.exit_code = 3;
        t.message = "flow diverged: nonexistence suspected";
    } else if (!res.converged) {
        t.exit_code = 3;
        t.message = "flow did not converge within the iteration budget";
    }
    return t;
}

TaskOutput run_evolve(const RunConfig& cfg, const fs::path& out)
{
    const ComplexField psi0 = evolve_initial_state(cfg);
    const EvolveResult res =
        evolve(cfg.model, psi0, cfg.evolve.T, cfg.evolve.dt, cfg.evolve.record_every);

    TaskOutput t;
    write_observables_csv((out / "observables.csv").string(), res.series);
    t.files.push_back("observables.csv");
    write_snapshot((out / "final.snap").string(), res.final_state);
    t.files.push_back("final.snap");

    t.summary["status"] = evolve_status_name(res.status);
    t.summary["t_reached"] = res.t_reached;
    t.summary["steps"] = res.steps_taken;
    if (res.series.size() >= 2) {
        t.summary["mass_drift"] = std::fabs(res.series.mass.back() - res.series.mass.front());
        t.summary["energy_drift"] =
            std::fabs(res.series.energy.back().total - res.series.energy.front().total);
    }
    if (cfg.evolve.blowup_check) {
        const BlowupVerdict v = blowup_criterion(cfg.model, psi0, estimate_cb().value);
        t.summary["blowup"] = {{"verdict", blowup_case_name(v.verdict)},
                               {"assumption", v.assumption},
                               {"bound", {v.a, v.b, v.c}},
                               {"detail", v.detail}};
    }
    if (res.status != EvolveStatus::Ok) {
        t.exit_code = 3;
        t.message = "evolution stopped: " + evolve_status_name(res.status);
    }
    return t;
}

TaskOutput run_regime(const RunConfig& cfg, const fs::path& out)
{
    const GNConstant cb = estimate_cb();
    const RegimeVerdict v = classify_regime(cfg.model, cb.value);

    TaskOutput t;
    json r;
    r["outcome"] = regime_outcome_name(v.outcome);
    r["matched_condition"] = v.matched_condition;
    r["margin"] = v.margin;
    r["cb"] = {{"value", cb.value},
               {"quotient", cb.quotient},
               {"shooting", cb.shooting},
               {"spread", cb.spread}};
    r["threshold"] = std::sqrt(2.0 * M_PI) * cb.value * cfg.model.eps;

    if (cfg.regime.probe) {
        const ComplexField phi = gaussian_init(cfg.grid, {1.0, 1.0, 1.0});
        ScalingProbe probe;
        if (cfg.model.kind == ModelKind::Quasi2DI)
            probe = scaling_probe_2dI(cfg.model, phi, cfg.regime.deltas);
        else if (cfg.model.kind == ModelKind::Quasi2DII)
            probe = scaling_probe_2dII(cfg.model, phi, cfg.regime.deltas, cfg.regime.kappa);
        else
            throw std::invalid_argument("regime probe: scaling families exist for the "
                                        "quasi-2d models only");
        json rows = json::array();
        for (std::size_t i = 0; i < probe.scales.size(); ++i)
            rows.push_back({{"scale", probe.scales[i]}, {"energy", energy_json(probe.energies[i])}});
        r["probe"] = {{"rows", rows},
                      {"fitted_exponent", probe.fitted_exponent},
                      {"leading_coefficient", probe.leading_coefficient}};
    }
    atomic_write(out / "regime.json", r.dump(2) + "\n");
    t.files.push_back("regime.json");
    t.summary = std::move(r);
    return t;
}

std::string eps_tag(double e)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", e);
    return buf;
}

TaskOutput run_reduce(const RunConfig& cfg, const fs::path& out)
{
    const StudyOutcome so = run_reduction_study(cfg.reduce.study);

    TaskOutput t;
    for (const EpsRun& r : so.runs) {
        const std::string name = "errors_eps" + eps_tag(r.eps) + ".csv";
        write_reduction_error_csv((out / name).string(), r.errors);
        t.files.push_back(name);
    }
    json rf;
    rf["case"] = confinement_name(cfg.reduce.study.confinement);
    rf["eps"] = json::array();
    for (const EpsRun& r : so.runs)
        rf["eps"].push_back(r.eps);
    rf["fits"] = json::array();
    for (std::size_t q = 0; q < so.fit_times.size(); ++q) {
        json f;
        f["t"] = so.fit_times[q];
        f["slope"] = so.fits[q].slope;
        f["residual"] = so.fits[q].residual;
        f["errors"] = so.fits[q].errors;
        f["leak_slope"] = so.leak_fits[q].slope;
        f["leak_errors"] = so.leak_fits[q].errors;
        rf["fits"].push_back(f);
    }
    json grad = json::array();
    for (const EpsRun& r : so.runs)
        grad.push_back(*std::max_element(r.traj.grad_l2.begin(), r.traj.grad_l2.end()));
    rf["max_grad_l2"] = grad; // uniform-in-eps H1 bound probe
    atomic_write(out / "ratefit.json", rf.dump(2) + "\n");
    t.files.push_back("ratefit.json");
    t.summary = std::move(rf);
    return t;
}

TaskOutput run_kernel_check(const RunConfig&, const fs::path& out)
{
    const auto rows = kernel_check_rows();
    TaskOutput t;
    write_kernel_check_csv((out / "kernel_check.csv").string(), rows);
    t.files.push_back("kernel_check.csv");
    double worst2d = 0.0, worst1d = 0.0;
    for (const auto& r : rows)
        (r.kernel == "u2d" ? worst2d : worst1d) = std::max(
            r.kernel == "u2d" ? worst2d : worst1d, r.rel_err);
    t.summary = {{"rows", rows.size()}, {"max_rel_err_u2d", worst2d},
                 {"max_rel_err_u1d", worst1d}};
    return t;
}

} // namespace

RunResult run(const RunConfig& cfg)
{
    const auto t0 = std::chrono::steady_clock::now();
    const fs::path out(cfg.out_dir);
    fs::create_directories(out);

    TaskOutput task;
    try {
        switch (cfg.task) {
        case Task::GroundState: task = run_groundstate(cfg, out); break;
        case Task::Evolve: task = run_evolve(cfg, out); break;
        case Task::Regime: task = run_regime(cfg, out); break;
        case Task::Reduce: task = run_reduce(cfg, out); break;
        case Task::KernelCheck: task = run_kernel_check(cfg, out); break;
        }
    } catch (const std::invalid_argument& e) {
        task.exit_code = 2;
        task.message = e.what();
    } catch (const numerical_alarm& e) {
        task.exit_code = 3;
        task.message = e.what();
    } catch (const std::exception& e) {
        task.exit_code = 4;
        task.message = e.what();
    }

    json m;
    m["version"] = version_string;
    m["config"] = json::parse(config_echo_json(cfg));
    m["task"] = task_name(cfg.task);
    m["ok"] = task.exit_code == 0;
    m["message"] = task.message;
    m["summary"] = task.summary;
    const auto dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0);
    m["wall_clock_sec"] = dt.count();
    json files = json::array();
    for (const auto& f : task.files)
        if (fs::exists(out / f)) // manifest only lists files that exist
            files.push_back(f);
    m["files"] = files;

    RunResult res;
    res.exit_code = task.exit_code;
    res.message = task.message;
    res.manifest_path = (out / "manifest.json").string();
    atomic_write(out / "manifest.json", m.dump(2) + "\n");
    return res;
}

} // namespace gpps
