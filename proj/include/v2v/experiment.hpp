#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "v2v/allocator.hpp"
#include "v2v/aoi.hpp"
#include "v2v/metrics.hpp"
#include "v2v/proxy.hpp"

namespace v2v {

enum class Command { Solve, Compare, Aoi, Verify };
enum class OutputFormat { Text, Records };
enum class Strategy { Default, Greedy, Genetic };

std::string_view to_string(Command c);
std::string_view to_string(OutputFormat f);
std::string_view to_string(Strategy s);
Command command_from_string(std::string_view name);
OutputFormat format_from_string(std::string_view name);
Strategy strategy_from_string(std::string_view name);

struct ExperimentConfig {
    Command command = Command::Solve;

    // Scene source: a file, otherwise random placement in a box.
    std::optional<std::filesystem::path> scene_path;
    // Empty means the command's default ({3, 4, 5}; {3} for solve/verify).
    std::vector<std::size_t> vehicle_counts;
    double box_side_m = 100.0;
    double min_separation_m = 5.0;

    ChannelParams channel;
    Strategy strategy = Strategy::Greedy;
    GreedyConfig greedy;
    GeneticConfig genetic;
    std::vector<std::size_t> ablation_epochs{500, 50};
    AoiConfig aoi;
    std::optional<std::filesystem::path> curves_path;

    // Zero means the command's default (15; 10 for verify; 1 for solve).
    std::size_t trials = 0;
    std::uint64_t seed = 0;
    std::size_t jobs = 1;
    // Fraction of the payload actually sent; scales every delay.
    double rate_factor = 1.0;

    std::size_t grid_points = 20;
    double gap_threshold = 0.05;

    std::optional<std::filesystem::path> out_path;
    std::optional<std::filesystem::path> plot_data_path;
    OutputFormat format = OutputFormat::Text;

    /// Fills command-dependent defaults and validates every component.
    ExperimentConfig resolved() const;
    void validate() const;
};

nlohmann::json to_json(const ExperimentConfig& cfg);

struct Report {
    std::string text;
    // Line-delimited records; the first one echoes the resolved config.
    std::vector<nlohmann::json> records;
    // Two-column series blocks, compare only.
    std::string plot_data;
    int exit_code = 0;

    std::string records_text() const;
    // Text table or records, per the configured format.
    std::string render(OutputFormat format) const;
};

Report cmd_solve(const ExperimentConfig& cfg);
Report cmd_compare(const ExperimentConfig& cfg);
Report cmd_aoi(const ExperimentConfig& cfg);
Report cmd_verify(const ExperimentConfig& cfg);

/// Dispatches on cfg.command and writes --out / --plot-data files.
Report run_experiment(const ExperimentConfig& cfg);

}  // namespace v2v
