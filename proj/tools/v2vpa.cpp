// v2vpa: power allocation and age-of-information experiments for V2V links.
//
//   v2vpa solve   --scene data/triangle.txt --strategy greedy
//   v2vpa compare --trials 15 --seed 7 --out compare.jsonl
//   v2vpa aoi     --n 3 --looptime 0.2
//   v2vpa verify  --trials 10 --grid 20

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "v2v/experiment.hpp"

int main(int argc, char** argv)
{
    using namespace v2v;

    CLI::App app{"V2V power allocation and age-of-information toolkit"};
    app.set_config("--config", "", "TOML/INI file with the same keys as the long flags; flags win");

    ExperimentConfig cfg;
    std::string command;
    std::string scene;
    std::string strategy = "greedy";
    std::string format = "text";
    std::string out;
    std::string plot_data;
    std::string curves;
    bool no_ego = false;

    app.add_option("command", command, "solve | compare | aoi | verify")
        ->required()
        ->check(CLI::IsMember({"solve", "compare", "aoi", "verify"}));
    app.add_option("--scene", scene, "distance matrix or JSON scene file");
    app.add_option("--n", cfg.vehicle_counts, "vehicle count(s) for random scenes")->delimiter(',');
    app.add_option("--trials", cfg.trials, "trials per vehicle count (0 = command default)");
    app.add_option("--seed", cfg.seed, "master seed");
    app.add_option("--strategy", strategy, "solver for `solve`")
        ->check(CLI::IsMember({"default", "greedy", "genetic"}));
    app.add_option("--jobs", cfg.jobs, "worker threads for trials")->check(CLI::PositiveNumber);
    app.add_option("--out", out, "write line-delimited records here");
    app.add_option("--format", format, "stdout format")->check(CLI::IsMember({"text", "records"}));
    app.add_option("--plot-data", plot_data, "write two-column series (compare)");
    app.add_option("--rate-factor", cfg.rate_factor, "effective fraction of the payload sent");

    auto* ch = app.add_option_group("channel");
    ch->add_option("--alpha", cfg.channel.alpha, "path-loss exponent");
    ch->add_option("--bandwidth", cfg.channel.bandwidth_hz, "bandwidth in Hz");
    ch->add_option("--noise", cfg.channel.noise_w, "noise power in W");
    ch->add_option("--p-min", cfg.channel.p_min_w, "per-link minimum power in W");
    ch->add_option("--p-max", cfg.channel.p_max_w, "per-vehicle power budget in W");
    ch->add_option("--payload-bits", cfg.channel.payload_bits, "bits per message");

    auto* sc = app.add_option_group("scene generation");
    sc->add_option("--box", cfg.box_side_m, "side of the placement box in m");
    sc->add_option("--min-sep", cfg.min_separation_m, "minimum vehicle separation in m");

    auto* gr = app.add_option_group("greedy");
    gr->add_option("--epochs", cfg.greedy.max_epochs, "maximum epochs");
    gr->add_option("--learn-rate", cfg.greedy.learn_rate, "multiplicative step");
    gr->add_option("--tol", cfg.greedy.convergence_tol, "relative plateau tolerance");
    gr->add_option("--window", cfg.greedy.convergence_window, "plateau window in epochs");
    gr->add_option("--ablation-epochs", cfg.ablation_epochs, "extra epoch budgets for compare")->delimiter(',');

    auto* ga = app.add_option_group("genetic");
    ga->add_option("--population", cfg.genetic.population_size, "population size");
    ga->add_option("--crossover-rate", cfg.genetic.crossover_rate, "crossover probability");
    ga->add_option("--mutation-rate", cfg.genetic.mutation_rate, "per-gene mutation probability");
    ga->add_option("--generations", cfg.genetic.max_generations, "maximum generations");
    ga->add_option("--stall-generations", cfg.genetic.stall_generations, "stop after this many without gain");
    ga->add_option("--fitness-threshold", cfg.genetic.fitness_threshold, "discard individuals below this min-SNR");

    auto* ao = app.add_option_group("aoi");
    ao->add_option("--looptime", cfg.aoi.looptime_s, "perception cycle in s");
    ao->add_option("--sample-period", cfg.aoi.sample_period_s, "sensor sampling period in s");
    ao->add_option("--compute-delay", cfg.aoi.compute_delay_s, "per-vehicle computation delay in s");
    ao->add_option("--compute-delays", cfg.aoi.compute_delay_overrides_s, "per-vehicle overrides")->delimiter(',');
    ao->add_flag("--no-ego", no_ego, "omit ego (self) records");
    ao->add_option("--curves", curves, "JSON degradation curves replacing the embedded ones");

    auto* vf = app.add_option_group("verify");
    vf->add_option("--grid", cfg.grid_points, "oracle grid points per link");
    vf->add_option("--gap-threshold", cfg.gap_threshold, "maximum allowed greedy gap (fraction)");

    CLI11_PARSE(app, argc, argv);

    try {
        cfg.command = command_from_string(command);
        cfg.strategy = strategy_from_string(strategy);
        cfg.format = format_from_string(format);
        cfg.aoi.include_ego = !no_ego;
        if (!scene.empty())
            cfg.scene_path = scene;
        if (!out.empty())
            cfg.out_path = out;
        if (!plot_data.empty())
            cfg.plot_data_path = plot_data;
        if (!curves.empty())
            cfg.curves_path = curves;

        const Report report = run_experiment(cfg);
        std::cout << report.render(cfg.format);
        return report.exit_code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
