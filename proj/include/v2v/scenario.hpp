#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "v2v/channel.hpp"

namespace v2v {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

struct RandomBoxPlacement {
    double side_m = 100.0;
};

struct FixedPlacement {
    std::vector<Point2> coords;
};

struct FilePlacement {
    std::filesystem::path path;
};

using Placement = std::variant<RandomBoxPlacement, FixedPlacement, FilePlacement>;

struct ScenarioSpec {
    // Used by random placement; fixed and file placements carry their own count.
    std::size_t n_vehicles = 3;
    Placement placement = RandomBoxPlacement{};
    double min_separation_m = 5.0;
    std::uint64_t rng_seed = 0;

    void validate() const;
};

struct Scene {
    DistanceMatrix dist;
    // Empty when the scene came from a bare distance matrix.
    std::vector<Point2> coords;
};

inline constexpr double kSymmetryTolM = 1e-9;
inline constexpr std::size_t kMaxPlacementAttempts = 10000;

DistanceMatrix distances_from_coordinates(std::span<const Point2> coords);

/// Accepts either a plain matrix (one row per line, whitespace or comma
/// separated, optional leading line holding n, `#` comments) or a JSON
/// object with a "distances" matrix or "coordinates" list of [x, y].
Scene parse_scene(std::string_view text);
Scene load_scene(const std::filesystem::path& path);
DistanceMatrix load_distance_matrix(const std::filesystem::path& path);

/// Plain format with a header line; values printed with 17 significant
/// digits so loading the output reproduces the matrix bit for bit.
std::string format_distance_matrix(const DistanceMatrix& dist);
void save_distance_matrix(const DistanceMatrix& dist, const std::filesystem::path& path);

/// Random placement draws coordinates uniformly in the box and rejects any
/// vehicle closer than min_separation_m to one already placed.
Scene generate_scene(const ScenarioSpec& spec);

}  // namespace v2v
