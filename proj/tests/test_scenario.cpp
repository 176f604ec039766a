#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "v2v/scenario.hpp"

using namespace v2v;

namespace {

const std::filesystem::path kData = V2V_DATA_DIR;

std::filesystem::path temp_file(const std::string& name)
{
    return std::filesystem::temp_directory_path() / ("v2vpa_test_" + name);
}

}  // namespace

TEST_SUITE("scenario")
{
    TEST_CASE("sample files load")
    {
        const auto two = load_distance_matrix(kData / "two_vehicles.txt");
        CHECK(two.size() == 2);
        CHECK(two(0, 1) == 10.0);
        CHECK(two(1, 0) == 10.0);

        const auto tri = load_distance_matrix(kData / "triangle_10_30_50.txt");
        CHECK(tri.size() == 3);
        CHECK(tri(0, 1) == 10.0);
        CHECK(tri(0, 2) == 30.0);
        CHECK(tri(1, 2) == 50.0);

        const auto eq = load_scene(kData / "equilateral.json");
        CHECK(eq.coords.size() == 3);
        for (Eigen::Index i = 0; i < 3; ++i)
            for (Eigen::Index j = 0; j < 3; ++j)
                if (i != j)
                    CHECK(eq.dist(i, j) == doctest::Approx(20.0).epsilon(1e-12));

        CHECK(load_distance_matrix(kData / "intersection_5.txt").size() == 5);
    }

    TEST_CASE("load errors are distinct")
    {
        CHECK_THROWS_AS(load_distance_matrix(kData / "asymmetric.txt"), AsymmetryError);
        CHECK_THROWS_AS(parse_scene("0 10 20\n10 0 0\n20 0 0\n"), PositivityError);
        CHECK_THROWS_AS(parse_scene("0 10\n10 zero\n"), ParseError);
        CHECK_THROWS_AS(parse_scene("0 10 3\n10 0\n"), ParseError);
        CHECK_THROWS_AS(parse_scene("3\n0 10\n10 0\n"), ParseError);
        CHECK_THROWS_AS(parse_scene("{\"distances\": [[0, 1], [1]]}"), ParseError);
        CHECK_THROWS_AS(parse_scene("{\"coordinates\": [[0, 0], [0, 0]]}"), PositivityError);
        CHECK_THROWS_AS(load_distance_matrix(kData / "does_not_exist.txt"), LoadError);
    }

    TEST_CASE("text format tolerates comments, commas and near-symmetry")
    {
        const auto scene = parse_scene("# a comment\n3\n0, 5, 7\n5, 0, 9  # trailing\n7.0000000000001, 9, 0\n");
        CHECK(scene.dist.size() == 3);
        CHECK(scene.dist(2, 0) == scene.dist(0, 2));
        CHECK(scene.coords.empty());
    }

    TEST_CASE("fixed coordinates give Euclidean distances")
    {
        ScenarioSpec spec;
        spec.placement = FixedPlacement{{{0, 0}, {3, 4}}};
        spec.min_separation_m = 1.0;
        const auto scene = generate_scene(spec);
        CHECK(scene.dist(0, 1) == 5.0);

        const double h = 20.0 * std::sqrt(3.0) / 2.0;
        spec.placement = FixedPlacement{{{0, 0}, {20, 0}, {10, h}}};
        const auto eq = generate_scene(spec);
        for (Eigen::Index i = 0; i < 3; ++i)
            for (Eigen::Index j = 0; j < 3; ++j)
                if (i != j)
                    CHECK(eq.dist(i, j) == doctest::Approx(20.0).epsilon(1e-12));
    }

    TEST_CASE("random placement is seeded, separated and metric")
    {
        for (std::uint64_t seed = 0; seed < 50; ++seed) {
            ScenarioSpec spec;
            spec.n_vehicles = 3 + seed % 3;
            spec.rng_seed = seed;
            const auto a = generate_scene(spec);
            const auto b = generate_scene(spec);
            REQUIRE(a.dist == b.dist);
            const auto n = a.dist.size();
            REQUIRE(n == static_cast<Eigen::Index>(spec.n_vehicles));
            for (Eigen::Index i = 0; i < n; ++i)
                for (Eigen::Index j = 0; j < n; ++j) {
                    if (i == j)
                        continue;
                    REQUIRE(a.dist(i, j) >= spec.min_separation_m);
                    for (Eigen::Index k = 0; k < n; ++k)
                        if (k != i && k != j)
                            REQUIRE(a.dist(i, j) <= a.dist(i, k) + a.dist(k, j) + 1e-12);
                }
        }
        ScenarioSpec s1, s2;
        s2.rng_seed = 1;
        CHECK_FALSE(generate_scene(s1).dist == generate_scene(s2).dist);
    }

    TEST_CASE("over-packed boxes raise a packing error")
    {
        ScenarioSpec spec;
        spec.n_vehicles = 60;
        spec.placement = RandomBoxPlacement{30.0};
        spec.min_separation_m = 14.0;
        CHECK_THROWS_AS(generate_scene(spec), PackingError);
    }

    TEST_CASE("spec validation")
    {
        ScenarioSpec spec;
        spec.n_vehicles = 1;
        CHECK_THROWS_AS(spec.validate(), DomainError);
        spec = {};
        spec.min_separation_m = 0.0;
        CHECK_THROWS_AS(spec.validate(), DomainError);
        spec = {};
        spec.placement = RandomBoxPlacement{10.0};
        CHECK_THROWS_AS(spec.validate(), DomainError);
    }

    TEST_CASE("save then load is bit-identical")
    {
        ScenarioSpec spec;
        spec.n_vehicles = 5;
        spec.rng_seed = 99;
        const auto scene = generate_scene(spec);
        const auto path = temp_file("roundtrip.txt");
        save_distance_matrix(scene.dist, path);
        const auto loaded = load_distance_matrix(path);
        CHECK(loaded == scene.dist);
        CHECK(format_distance_matrix(loaded) == format_distance_matrix(scene.dist));
        std::filesystem::remove(path);
    }
}
