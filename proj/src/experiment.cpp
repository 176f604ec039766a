#include "v2v/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "v2v/parallel.hpp"
#include "v2v/scenario.hpp"
#include "v2v/seed.hpp"

namespace v2v {

namespace {

using nlohmann::json;

std::string fmt_num(double v, const char* spec = "%.6g")
{
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string pad(const std::string& s, std::size_t width)
{
    return s.size() >= width ? s + " " : std::string(width - s.size(), ' ') + s;
}

std::string left(const std::string& s, std::size_t width)
{
    return s.size() >= width ? s + " " : s + std::string(width - s.size(), ' ');
}

json matrix_json(const MatrixXr& m)
{
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string matrix_text(const std::string& title, const MatrixXr& m)
{
    std::string out = title + "\n";
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        out += "  ";
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            out += pad(fmt_num(m(i, j), "%.6e"), 14);
        out += "\n";
    }
    return out;
}

json ap_json(const ApTriple& ap)
{
    return json{{"ap30", ap.ap30}, {"ap50", ap.ap50}, {"ap70", ap.ap70}};
}

json channel_json(const ChannelParams& p)
{
    return json{{"alpha", p.alpha},         {"bandwidth_hz", p.bandwidth_hz}, {"noise_w", p.noise_w},
                {"p_min_w", p.p_min_w},     {"p_max_w", p.p_max_w},           {"payload_bits", p.payload_bits}};
}

ScenarioSpec scenario_for(const ExperimentConfig& cfg, std::size_t n)
{
    ScenarioSpec spec;
    spec.n_vehicles = n;
    spec.min_separation_m = cfg.min_separation_m;
    if (cfg.scene_path)
        spec.placement = FilePlacement{*cfg.scene_path};
    else
        spec.placement = RandomBoxPlacement{cfg.box_side_m};
    return spec;
}

// With a scene file the vehicle count comes from the file.
std::vector<std::size_t> counts_for(const ExperimentConfig& cfg)
{
    if (cfg.scene_path)
        return {static_cast<std::size_t>(load_scene(*cfg.scene_path).dist.size())};
    return cfg.vehicle_counts;
}

Scene scene_for_trial(const ExperimentConfig& cfg, std::size_t n, std::uint64_t tseed)
{
    ScenarioSpec spec = scenario_for(cfg, n);
    spec.rng_seed = stream_seed(tseed, SeedStream::Scene);
    return generate_scene(spec);
}

AllocationResult run_strategy(Strategy s, const AllocationProblem& problem, const ExperimentConfig& cfg,
                              std::uint64_t tseed)
{
    switch (s) {
    case Strategy::Default:
        return default_pa(problem);
    case Strategy::Greedy:
        return greedy_pa(problem, cfg.greedy);
    case Strategy::Genetic: {
        GeneticConfig ga = cfg.genetic;
        ga.rng_seed = stream_seed(tseed, SeedStream::Genetic);
        return genetic_pa(problem, ga);
    }
    }
    throw DomainError("unknown strategy");
}

CurveSet curves_for(const ExperimentConfig& cfg)
{
    return cfg.curves_path ? load_curves(*cfg.curves_path) : default_curves();
}

Report start_report(const ExperimentConfig& cfg)
{
    Report r;
    json echo = to_json(cfg);
    r.text = "config " + echo.dump() + "\n";
    r.records.push_back(json{{"type", "config"}, {"config", std::move(echo)}});
    return r;
}

}  // namespace

std::string_view to_string(Command c)
{
    switch (c) {
    case Command::Solve:
        return "solve";
    case Command::Compare:
        return "compare";
    case Command::Aoi:
        return "aoi";
    case Command::Verify:
        return "verify";
    }
    return "unknown";
}

std::string_view to_string(OutputFormat f)
{
    return f == OutputFormat::Text ? "text" : "records";
}

std::string_view to_string(Strategy s)
{
    switch (s) {
    case Strategy::Default:
        return "default";
    case Strategy::Greedy:
        return "greedy";
    case Strategy::Genetic:
        return "genetic";
    }
    return "unknown";
}

Command command_from_string(std::string_view name)
{
    for (auto c : {Command::Solve, Command::Compare, Command::Aoi, Command::Verify})
        if (to_string(c) == name)
            return c;
    throw DomainError("unknown command '" + std::string(name) + "'");
}

OutputFormat format_from_string(std::string_view name)
{
    if (name == "text")
        return OutputFormat::Text;
    if (name == "records")
        return OutputFormat::Records;
    throw DomainError("unknown format '" + std::string(name) + "'");
}

Strategy strategy_from_string(std::string_view name)
{
    for (auto s : {Strategy::Default, Strategy::Greedy, Strategy::Genetic})
        if (to_string(s) == name)
            return s;
    throw DomainError("unknown strategy '" + std::string(name) + "'");
}

ExperimentConfig ExperimentConfig::resolved() const
{
    ExperimentConfig r = *this;
    if (r.vehicle_counts.empty()) {
        if (command == Command::Solve || command == Command::Verify)
            r.vehicle_counts = {3};
        else
            r.vehicle_counts = {3, 4, 5};
    }
    if (r.trials == 0)
        r.trials = command == Command::Verify ? 10 : command == Command::Solve ? 1 : 15;
    r.validate();
    return r;
}

void ExperimentConfig::validate() const
{
    channel.validate();
    greedy.validate();
    genetic.validate();
    aoi.validate();
    if (!(rate_factor > 0.0 && rate_factor <= 1.0))
        throw DomainError("rate factor must lie in (0, 1]");
    if (jobs < 1)
        throw DomainError("jobs must be at least 1");
    for (std::size_t n : vehicle_counts)
        if (n < 2)
            throw DomainError("vehicle counts must be at least 2");
    if (!(box_side_m > 2.0 * min_separation_m) || !(min_separation_m > 0.0))
        throw DomainError("box side must exceed twice a positive min separation");
    if (!(gap_threshold >= 0.0))
        throw DomainError("gap threshold must be nonnegative");
    if (grid_points < 2)
        throw DomainError("oracle grid needs at least two points");
}

// Execution-only settings (jobs, output paths, format) are left out so the
// records do not depend on how a run was scheduled or displayed.
json to_json(const ExperimentConfig& cfg)
{
    json j;
    j["command"] = std::string(to_string(cfg.command));
    j["scene"] = cfg.scene_path ? json(cfg.scene_path->string()) : json(nullptr);
    j["vehicle_counts"] = cfg.vehicle_counts;
    j["box_side_m"] = cfg.box_side_m;
    j["min_separation_m"] = cfg.min_separation_m;
    j["channel"] = channel_json(cfg.channel);
    j["strategy"] = std::string(to_string(cfg.strategy));
    j["greedy"] = {{"learn_rate", cfg.greedy.learn_rate},
                   {"max_epochs", cfg.greedy.max_epochs},
                   {"convergence_tol", cfg.greedy.convergence_tol},
                   {"convergence_window", cfg.greedy.convergence_window}};
    j["ablation_epochs"] = cfg.ablation_epochs;
    j["genetic"] = {{"population_size", cfg.genetic.population_size},
                    {"crossover_rate", cfg.genetic.crossover_rate},
                    {"mutation_rate", cfg.genetic.mutation_rate},
                    {"max_generations", cfg.genetic.max_generations},
                    {"stall_generations", cfg.genetic.stall_generations},
                    {"fitness_threshold", cfg.genetic.fitness_threshold},
                    {"tournament_size", cfg.genetic.tournament_size}};
    j["aoi"] = {{"compute_delay_s", cfg.aoi.compute_delay_s},
                {"compute_delay_overrides_s", cfg.aoi.compute_delay_overrides_s},
                {"sample_period_s", cfg.aoi.sample_period_s},
                {"looptime_s", cfg.aoi.looptime_s},
                {"include_ego", cfg.aoi.include_ego}};
    j["curves"] = cfg.curves_path ? json(cfg.curves_path->string()) : json("embedded");
    j["trials"] = cfg.trials;
    j["seed"] = cfg.seed;
    j["seed_rule"] = "trial_seed = splitmix64(seed + trial); stream seed = splitmix64(trial_seed + stream), "
                     "stream scene=1 genetic=2 aoi=3";
    j["rate_factor"] = cfg.rate_factor;
    j["grid_points"] = cfg.grid_points;
    j["gap_threshold"] = cfg.gap_threshold;
    return j;
}

std::string Report::records_text() const
{
    std::string out;
    for (const auto& r : records) {
        out += r.dump();
        out.push_back('\n');
    }
    return out;
}

std::string Report::render(OutputFormat format) const
{
    return format == OutputFormat::Text ? text : records_text();
}

Report cmd_solve(const ExperimentConfig& raw)
{
    const ExperimentConfig cfg = raw.resolved();
    Report report = start_report(cfg);
    const std::size_t n = counts_for(cfg).front();
    const std::uint64_t tseed = trial_seed(cfg.seed, 0);
    const Scene scene = scene_for_trial(cfg, n, tseed);
    const AllocationProblem problem{cfg.channel, scene.dist};

    AllocationResult r = run_strategy(cfg.strategy, problem, cfg, tseed);
    const std::size_t epochs = r.epochs_used;
    const bool converged = r.converged;
    r = evaluate_allocation(problem, r.power, r.strategy_name, cfg.rate_factor);
    const auto feas = check_feasible(r.power, cfg.channel);

    std::ostringstream os;
    os << "scene: n=" << scene.dist.size() << (cfg.scene_path ? " from " + cfg.scene_path->string() : " random")
       << "\n";
    os << "strategy: " << r.strategy_name << "  epochs " << epochs << "  converged " << (converged ? "yes" : "no")
       << "\n";
    os << "objective: min SNR " << fmt_num(r.objective_min_snr, "%.9g") << "  max delay "
       << fmt_num(r.objective_max_delay_s, "%.9g") << " s\n";
    os << "feasible: " << (feas.feasible ? "yes" : "no\n" + feas.describe()) << "\n";
    if (r.metrics.snr_floor_hit)
        os << "warning: SNR floor clamp applied\n";
    os << matrix_text("distance (m):", scene.dist.matrix());
    os << matrix_text("power (W):", r.power);
    os << matrix_text("SNR:", r.metrics.snr);
    os << matrix_text("delay (s):", r.metrics.delay_s);
    report.text += os.str();

    report.records.push_back(json{{"type", "solve"},
                                  {"n", scene.dist.size()},
                                  {"strategy", r.strategy_name},
                                  {"epochs", epochs},
                                  {"converged", converged},
                                  {"min_snr", r.objective_min_snr},
                                  {"max_delay_s", r.objective_max_delay_s},
                                  {"feasible", feas.feasible},
                                  {"snr_floor_hit", r.metrics.snr_floor_hit},
                                  {"distance_m", matrix_json(scene.dist.matrix())},
                                  {"power_w", matrix_json(r.power)},
                                  {"snr", matrix_json(r.metrics.snr)},
                                  {"delay_s", matrix_json(r.metrics.delay_s)}});
    return report;
}

Report cmd_compare(const ExperimentConfig& raw)
{
    const ExperimentConfig cfg = raw.resolved();
    Report report = start_report(cfg);
    report.records.push_back(json{{"type", "metadata"},
                                  {"reference", "GeneticPA"},
                                  {"variance", "population variance over ordered pairs i != j"},
                                  {"rmse", "over ordered pairs i != j against the GeneticPA delay matrix"},
                                  {"units", "seconds"}});

    ComparisonConfig cc;
    cc.params = cfg.channel;
    cc.greedy = cfg.greedy;
    cc.genetic = cfg.genetic;
    cc.ablation_epochs = cfg.ablation_epochs;
    cc.rate_factor = cfg.rate_factor;
    cc.master_seed = cfg.seed;
    cc.jobs = cfg.jobs;

    std::vector<StrategyComparison> results;
    for (std::size_t n : counts_for(cfg)) {
        auto cmp = run_comparison(scenario_for(cfg, n), cfg.trials, cc);
        for (const auto& t : cmp.trials) {
            for (const auto& s : t.strategies) {
                report.records.push_back(json{{"type", "trial"},
                                              {"n", cmp.n},
                                              {"trial", t.index},
                                              {"seed", t.seed},
                                              {"strategy", s.strategy},
                                              {"epochs", s.epochs},
                                              {"min_snr", s.min_snr},
                                              {"max_delay_s", s.max_delay_s},
                                              {"mean_s", s.mean},
                                              {"variance_s2", s.variance},
                                              {"rmse_vs_reference_s", s.rmse_vs_reference},
                                              {"delay_s", matrix_json(s.delay_s)}});
            }
        }
        for (const auto& a : cmp.aggregates) {
            report.records.push_back(json{{"type", "aggregate"},
                                          {"n", cmp.n},
                                          {"strategy", a.strategy},
                                          {"trials", cmp.trials.size()},
                                          {"rmse_vs_reference_s", a.rmse_vs_reference},
                                          {"variance_s2", a.variance},
                                          {"mean_s", a.mean},
                                          {"min_snr", a.min_snr}});
        }
        results.push_back(std::move(cmp));
    }

    const std::string main_greedy = "GreedyPA_epoch" + std::to_string(cfg.greedy.max_epochs);
    auto label_of = [&](const std::string& strategy) { return strategy == "GreedyPA" ? main_greedy : strategy; };

    std::ostringstream os;
    os << left("metric", 28);
    for (const auto& c : results)
        os << pad("cav=" + std::to_string(c.n), 14);
    os << "\n";
    auto row = [&](const std::string& name, auto value_of, const std::vector<std::string>& strategies) {
        for (const auto& s : strategies) {
            os << left(name + "_" + s, 28);
            for (const auto& c : results)
                os << pad(fmt_num(value_of(c.aggregate(s))), 14);
            os << "\n";
        }
    };
    std::vector<std::string> rmse_rows{"DefaultPA", "GreedyPA"};
    for (std::size_t e : cfg.ablation_epochs)
        rmse_rows.push_back("GreedyPA_epoch" + std::to_string(e));
    for (const auto& s : rmse_rows) {
        os << left("RMSE_" + label_of(s), 28);
        for (const auto& c : results)
            os << pad(fmt_num(c.aggregate(s).rmse_vs_reference), 14);
        os << "\n";
    }
    const std::vector<std::string> main_rows{"DefaultPA", "GreedyPA", "GeneticPA"};
    row("VAR", [](const StrategyAggregate& a) { return a.variance; }, main_rows);
    row("MEAN", [](const StrategyAggregate& a) { return a.mean; }, main_rows);
    row("MINSNR", [](const StrategyAggregate& a) { return a.min_snr; }, main_rows);
    os << "(" << cfg.trials << " trials per column; delays in seconds; population variance)\n";
    report.text += os.str();

    std::ostringstream plot;
    for (const auto& metric : {"MEAN", "VAR", "RMSE"}) {
        for (const auto& s : main_rows) {
            plot << "# " << metric << "_" << label_of(s) << "\n";
            for (const auto& c : results) {
                const auto& a = c.aggregate(s);
                const double v = std::string(metric) == "MEAN" ? a.mean
                                 : std::string(metric) == "VAR" ? a.variance
                                                                : a.rmse_vs_reference;
                plot << c.n << " " << fmt_num(v, "%.17g") << "\n";
            }
            plot << "\n";
        }
    }
    report.plot_data = plot.str();
    return report;
}

Report cmd_aoi(const ExperimentConfig& raw)
{
    const ExperimentConfig cfg = raw.resolved();
    Report report = start_report(cfg);
    report.records.push_back(json{{"type", "metadata"},
                                  {"ap", std::string(SceneApEstimate::kLabel)},
                                  {"ap_rule", "entrywise min of transmission curve at mean link age and "
                                              "linear-coefficient curve at (max - min) link age"},
                                  {"effective_age", "snapped age + looptime"}});
    const CurveSet curves = curves_for(cfg);

    struct ModeRow {
        std::string mode;
        AoiSummary summary;
        SceneApEstimate ap;
    };
    static const std::vector<std::string> kModes{"ZeroDelay", "DefaultPA", "GreedyPA"};

    std::ostringstream os;
    os << left("cav", 5) << left("mode", 11) << pad("max_age", 10) << pad("mean_age", 10) << pad("var_age", 11)
       << pad("stale", 7) << pad("eff_mean", 10) << pad("AP@0.3*", 9) << pad("AP@0.5*", 9) << pad("AP@0.7*", 9)
       << "\n";

    for (std::size_t n : counts_for(cfg)) {
        auto per_trial = ordered_parallel_map(cfg.trials, cfg.jobs, [&](std::size_t k) {
            const std::uint64_t tseed = trial_seed(cfg.seed, k);
            const Scene scene = scene_for_trial(cfg, n, tseed);
            const AllocationProblem problem{cfg.channel, scene.dist};
            const auto m = static_cast<Eigen::Index>(scene.dist.size());
            AoiConfig aoi = cfg.aoi;
            aoi.rng_seed = stream_seed(tseed, SeedStream::Aoi);

            std::vector<ModeRow> rows;
            for (const auto& mode : kModes) {
                MatrixXr delay = MatrixXr::Zero(m, m);
                AoiConfig mode_cfg = aoi;
                if (mode == "ZeroDelay") {
                    mode_cfg.compute_delay_s = 0.0;
                    mode_cfg.compute_delay_overrides_s.clear();
                } else {
                    const auto alloc = mode == "DefaultPA" ? default_pa(problem) : greedy_pa(problem, cfg.greedy);
                    delay = compute_delay_matrix(cfg.channel, alloc.metrics.snr, cfg.rate_factor);
                }
                // Every mode replays the same random stream.
                Rng rng(mode_cfg.rng_seed);
                const auto records = build_aoi_records(delay, mode_cfg, rng);
                rows.push_back({mode, aoi_summary(records, cfg.aoi.looptime_s), estimate_scene_ap(records, curves)});
            }
            return rows;
        });

        for (std::size_t k = 0; k < per_trial.size(); ++k) {
            for (const auto& r : per_trial[k]) {
                report.records.push_back(json{{"type", "trial"},
                                              {"n", n},
                                              {"trial", k},
                                              {"mode", r.mode},
                                              {"max_age_s", r.summary.max_age_s},
                                              {"mean_age_s", r.summary.mean_age_s},
                                              {"age_variance_s2", r.summary.age_variance_s2},
                                              {"stale_count", r.summary.stale_count},
                                              {"records", r.summary.record_count},
                                              {"max_effective_age_s", r.summary.max_effective_age_s},
                                              {"mean_effective_age_s", r.summary.mean_effective_age_s},
                                              {"age_spread_s", r.ap.age_spread_s},
                                              {"proxy_ap", ap_json(r.ap.combined)}});
            }
        }

        for (std::size_t mi = 0; mi < kModes.size(); ++mi) {
            ModeRow avg{kModes[mi], {}, {}};
            double stale = 0.0;
            for (const auto& trial : per_trial) {
                const auto& r = trial[mi];
                avg.summary.max_age_s += r.summary.max_age_s;
                avg.summary.mean_age_s += r.summary.mean_age_s;
                avg.summary.age_variance_s2 += r.summary.age_variance_s2;
                avg.summary.mean_effective_age_s += r.summary.mean_effective_age_s;
                avg.summary.max_effective_age_s += r.summary.max_effective_age_s;
                stale += static_cast<double>(r.summary.stale_count);
                avg.ap.combined.ap30 += r.ap.combined.ap30;
                avg.ap.combined.ap50 += r.ap.combined.ap50;
                avg.ap.combined.ap70 += r.ap.combined.ap70;
            }
            const double t = static_cast<double>(per_trial.size());
            avg.summary.max_age_s /= t;
            avg.summary.mean_age_s /= t;
            avg.summary.age_variance_s2 /= t;
            avg.summary.mean_effective_age_s /= t;
            avg.summary.max_effective_age_s /= t;
            stale /= t;
            avg.ap.combined.ap30 /= t;
            avg.ap.combined.ap50 /= t;
            avg.ap.combined.ap70 /= t;

            report.records.push_back(json{{"type", "aggregate"},
                                          {"n", n},
                                          {"mode", avg.mode},
                                          {"trials", per_trial.size()},
                                          {"max_age_s", avg.summary.max_age_s},
                                          {"mean_age_s", avg.summary.mean_age_s},
                                          {"age_variance_s2", avg.summary.age_variance_s2},
                                          {"stale_count", stale},
                                          {"max_effective_age_s", avg.summary.max_effective_age_s},
                                          {"mean_effective_age_s", avg.summary.mean_effective_age_s},
                                          {"proxy_ap", ap_json(avg.ap.combined)}});
            os << left(std::to_string(n), 5) << left(avg.mode, 11) << pad(fmt_num(avg.summary.max_age_s, "%.4g"), 10)
               << pad(fmt_num(avg.summary.mean_age_s, "%.4g"), 10)
               << pad(fmt_num(avg.summary.age_variance_s2, "%.4g"), 11) << pad(fmt_num(stale, "%.3g"), 7)
               << pad(fmt_num(avg.summary.mean_effective_age_s, "%.4g"), 10)
               << pad(fmt_num(avg.ap.combined.ap30, "%.3f"), 9) << pad(fmt_num(avg.ap.combined.ap50, "%.3f"), 9)
               << pad(fmt_num(avg.ap.combined.ap70, "%.3f"), 9) << "\n";
        }
    }
    os << "(* AP columns are proxy estimates interpolated from measured degradation curves; ages in seconds, "
          "averaged over "
       << cfg.trials << " trials; eff_mean = mean age + looptime " << fmt_num(cfg.aoi.looptime_s) << " s)\n";
    report.text += os.str();
    return report;
}

Report cmd_verify(const ExperimentConfig& raw)
{
    const ExperimentConfig cfg = raw.resolved();
    Report report = start_report(cfg);
    for (std::size_t n : counts_for(cfg))
        if (n > 3)
            throw CapacityError("verify is limited to n <= 3");

    struct Row {
        std::size_t n;
        double oracle, greedy, genetic;
    };
    std::vector<Row> rows;
    for (std::size_t n : counts_for(cfg)) {
        auto batch = ordered_parallel_map(cfg.trials, cfg.jobs, [&](std::size_t k) {
            const std::uint64_t tseed = trial_seed(cfg.seed, k);
            const Scene scene = scene_for_trial(cfg, n, tseed);
            const AllocationProblem problem{cfg.channel, scene.dist};
            const auto oracle = oracle_pa(problem, cfg.grid_points);
            const auto greedy = run_strategy(Strategy::Greedy, problem, cfg, tseed);
            const auto genetic = run_strategy(Strategy::Genetic, problem, cfg, tseed);
            return Row{static_cast<std::size_t>(scene.dist.size()), oracle.objective_min_snr,
                       greedy.objective_min_snr, genetic.objective_min_snr};
        });
        rows.insert(rows.end(), batch.begin(), batch.end());
    }

    std::ostringstream os;
    os << left("case", 6) << left("cav", 5) << pad("oracle", 14) << pad("greedy", 14) << pad("genetic", 14)
       << pad("greedy_gap", 12) << pad("genetic_gap", 12) << "\n";
    bool ok = true;
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto& r = rows[k];
        // Positive gap: the solver is below the grid optimum.
        const double greedy_gap = (r.oracle - r.greedy) / r.oracle;
        const double genetic_gap = (r.oracle - r.genetic) / r.oracle;
        const bool pass = greedy_gap <= cfg.gap_threshold;
        ok = ok && pass;
        os << left(std::to_string(k), 6) << left(std::to_string(r.n), 5) << pad(fmt_num(r.oracle, "%.6g"), 14)
           << pad(fmt_num(r.greedy, "%.6g"), 14) << pad(fmt_num(r.genetic, "%.6g"), 14)
           << pad(fmt_num(100.0 * greedy_gap, "%.3f%%"), 12) << pad(fmt_num(100.0 * genetic_gap, "%.3f%%"), 12)
           << (pass ? "" : "  FAIL") << "\n";
        report.records.push_back(json{{"type", "verify"},
                                      {"case", k},
                                      {"n", r.n},
                                      {"oracle_min_snr", r.oracle},
                                      {"greedy_min_snr", r.greedy},
                                      {"genetic_min_snr", r.genetic},
                                      {"greedy_gap", greedy_gap},
                                      {"genetic_gap", genetic_gap},
                                      {"pass", pass}});
    }
    os << (ok ? "all greedy gaps within " : "greedy gap above ") << fmt_num(100.0 * cfg.gap_threshold, "%.3g")
       << "% (grid " << cfg.grid_points << " points per link, log-spaced)\n";
    report.text += os.str();
    report.exit_code = ok ? 0 : 1;
    return report;
}

Report run_experiment(const ExperimentConfig& cfg)
{
    Report r;
    switch (cfg.command) {
    case Command::Solve:
        r = cmd_solve(cfg);
        break;
    case Command::Compare:
        r = cmd_compare(cfg);
        break;
    case Command::Aoi:
        r = cmd_aoi(cfg);
        break;
    case Command::Verify:
        r = cmd_verify(cfg);
        break;
    }
    if (cfg.out_path) {
        std::ofstream out(*cfg.out_path, std::ios::binary);
        if (!out)
            throw Error("cannot write " + cfg.out_path->string());
        out << r.records_text();
    }
    if (cfg.plot_data_path && !r.plot_data.empty()) {
        std::ofstream out(*cfg.plot_data_path, std::ios::binary);
        if (!out)
            throw Error("cannot write " + cfg.plot_data_path->string());
        out << r.plot_data;
    }
    return r;
}

}  // namespace v2v
