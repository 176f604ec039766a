#include "doctest.h"

#include <cmath>

#include "reference.hpp"
#include "v2v/allocator.hpp"
#include "v2v/seed.hpp"

using namespace v2v;

namespace {

AllocationProblem make_problem(const MatrixXr& d)
{
    return AllocationProblem{ChannelParams{}, DistanceMatrix(d)};
}

AllocationProblem two_vehicles()
{
    MatrixXr d(2, 2);
    d << 0, 10, 10, 0;
    return make_problem(d);
}

AllocationProblem equilateral()
{
    return make_problem(MatrixXr::Constant(3, 3, 20.0));
}

AllocationProblem triangle_10_30_50()
{
    MatrixXr d(3, 3);
    d << 0, 10, 30, 10, 0, 50, 30, 50, 0;
    return make_problem(d);
}

AllocationProblem random_problem(Eigen::Index n, Rng& rng)
{
    MatrixXr d = MatrixXr::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
            d(i, j) = d(j, i) = 5.0 + 95.0 * uniform01(rng);
    return make_problem(d);
}

double noise_limited_snr(double p, double d)
{
    return p / (std::pow(d, 3.0) * 4.14e-14);
}

PowerMatrix random_feasible_power(Eigen::Index n, Rng& rng, const ChannelParams& params)
{
    PowerMatrix p = PowerMatrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j)
            if (i != j)
                p(i, j) = params.p_min_w + uniform01(rng);
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        const double row = p.row(i).sum();
        if (row > params.p_max_w)
            for (Eigen::Index j = 0; j < n; ++j)
                if (i != j)
                    p(i, j) = std::max(params.p_min_w, p(i, j) * params.p_max_w / row * 0.99);
    }
    return p;
}

}  // namespace

TEST_SUITE("allocator")
{
    TEST_CASE("default allocation splits the budget evenly")
    {
        const ChannelParams params;
        for (auto [n, expected] : {std::pair<Eigen::Index, double>{2, 23.0}, {3, 11.5}, {5, 5.75}}) {
            MatrixXr d = MatrixXr::Constant(n, n, 15.0);
            const auto result = default_pa(make_problem(d));
            CHECK(result.strategy_name == "DefaultPA");
            for (Eigen::Index i = 0; i < n; ++i) {
                double row = 0.0;
                for (Eigen::Index j = 0; j < n; ++j) {
                    if (i == j) {
                        CHECK(result.power(i, j) == 0.0);
                        continue;
                    }
                    CHECK(result.power(i, j) == expected);
                    row += result.power(i, j);
                }
                CHECK(row == 23.0);
            }
            CHECK(check_feasible(result.power, params).feasible);
        }
    }

    TEST_CASE("infeasible budgets are rejected by every strategy")
    {
        AllocationProblem problem = equilateral();
        problem.params.p_min_w = 12.0;
        CHECK_THROWS_AS(default_pa(problem), FeasibilityError);
        CHECK_THROWS_AS(greedy_pa(problem), FeasibilityError);
        CHECK_THROWS_AS(genetic_pa(problem), FeasibilityError);
        CHECK_THROWS_AS(oracle_pa(problem, 5), FeasibilityError);
    }

    TEST_CASE("greedy on two vehicles reaches both powers at the budget")
    {
        const auto result = greedy_pa(two_vehicles());
        CHECK(result.power(0, 1) == 23.0);
        CHECK(result.power(1, 0) == 23.0);
        CHECK(result.objective_min_snr == doctest::Approx(noise_limited_snr(23.0, 10.0)).epsilon(1e-12));
    }

    TEST_CASE("greedy on an equilateral triangle stays within 1% of the uniform optimum")
    {
        const auto problem = equilateral();
        const double uniform = default_pa(problem).objective_min_snr;
        const auto result = greedy_pa(problem);
        CHECK(result.objective_min_snr >= 0.99 * uniform);
        CHECK(result.objective_min_snr <= uniform * (1.0 + 1e-9));
    }

    TEST_CASE("greedy on the 10/30/50 triangle reaches 95% of the grid oracle")
    {
        const auto problem = triangle_10_30_50();
        const auto oracle = oracle_pa(problem, 20);
        const auto greedy = greedy_pa(problem);
        CHECK(greedy.objective_min_snr >= 0.95 * oracle.objective_min_snr);
    }

    TEST_CASE("greedy best-so-far trace is non-decreasing and feasible")
    {
        Rng rng(21);
        for (int trial = 0; trial < 20; ++trial) {
            const auto problem = random_problem(3 + trial % 3, rng);
            const auto result = greedy_pa(problem);
            REQUIRE(result.best_trace.size() == result.epochs_used + 1);
            for (std::size_t k = 1; k < result.best_trace.size(); ++k)
                REQUIRE(result.best_trace[k] >= result.best_trace[k - 1]);
            CHECK(result.best_trace.back() == result.objective_min_snr);
            CHECK(check_feasible(result.power, problem.params).feasible);
        }
    }

    TEST_CASE("greedy is deterministic and honours the epoch budget")
    {
        const auto problem = triangle_10_30_50();
        GreedyConfig cfg;
        cfg.max_epochs = 50;
        const auto a = greedy_pa(problem, cfg);
        const auto b = greedy_pa(problem, cfg);
        CHECK(a.power == b.power);
        CHECK(a.epochs_used <= 50);
    }

    TEST_CASE("genetic on two vehicles is within 1% of the closed form for several seeds")
    {
        for (std::uint64_t seed : {0ull, 1ull, 77ull}) {
            GeneticConfig cfg;
            cfg.rng_seed = seed;
            const auto result = genetic_pa(two_vehicles(), cfg);
            CHECK(result.objective_min_snr >= 0.99 * noise_limited_snr(23.0, 10.0));
            CHECK(result.strategy_name == "GeneticPA");
        }
    }

    TEST_CASE("genetic is seed-deterministic")
    {
        const auto problem = triangle_10_30_50();
        GeneticConfig cfg;
        cfg.rng_seed = 42;
        const auto a = genetic_pa(problem, cfg);
        const auto b = genetic_pa(problem, cfg);
        CHECK(a.power == b.power);
        CHECK(a.objective_min_snr == b.objective_min_snr);
        CHECK(a.epochs_used == b.epochs_used);
        CHECK(a.best_trace == b.best_trace);
    }

    TEST_CASE("genetic is no more than 5% below greedy on asymmetric triangles")
    {
        Rng rng(8);
        for (int trial = 0; trial < 5; ++trial) {
            const auto problem = trial == 0 ? triangle_10_30_50() : random_problem(3, rng);
            GeneticConfig cfg;
            cfg.rng_seed = static_cast<std::uint64_t>(trial);
            const auto ga = genetic_pa(problem, cfg);
            const auto greedy = greedy_pa(problem);
            CHECK(ga.objective_min_snr >= 0.95 * greedy.objective_min_snr);
            CHECK(check_feasible(ga.power, problem.params).feasible);
        }
    }

    TEST_CASE("oracle on two vehicles picks the budget")
    {
        const auto result = oracle_pa(two_vehicles(), 20);
        CHECK(result.power(0, 1) == 23.0);
        CHECK(result.power(1, 0) == 23.0);
        CHECK(result.strategy_name == "OraclePA");
    }

    TEST_CASE("oracle dominates the uniform point when the grid contains it")
    {
        const auto problem = equilateral();
        const std::vector<double> grid{1e-6, 1.0, 11.5, 23.0};
        const auto result = oracle_pa(problem, grid);
        CHECK(result.objective_min_snr >= default_pa(problem).objective_min_snr);
        CHECK(check_feasible(result.power, problem.params).feasible);
    }

    TEST_CASE("oracle guard")
    {
        MatrixXr d = MatrixXr::Constant(4, 4, 20.0);
        CHECK_THROWS_AS(oracle_pa(make_problem(d), 3), CapacityError);
        CHECK_THROWS_AS(oracle_pa(equilateral(), 22), CapacityError);
        CHECK_NOTHROW(oracle_pa(two_vehicles(), 1000));
    }

    TEST_CASE("log grid endpoints are exact and spacing is geometric")
    {
        const ChannelParams params;
        const auto grid = log_grid(params, 20);
        REQUIRE(grid.size() == 20);
        CHECK(grid.front() == params.p_min_w);
        CHECK(grid.back() == params.p_max_w);
        const double ratio = grid[1] / grid[0];
        for (std::size_t k = 1; k < grid.size(); ++k)
            CHECK(grid[k] / grid[k - 1] == doctest::Approx(ratio).epsilon(1e-9));
    }

    TEST_CASE("feasibility report")
    {
        const ChannelParams params;
        const PowerMatrix uniform = uniform_power(3, params);

        SUBCASE("uniform allocation is feasible")
        {
            const auto report = check_feasible(uniform, params);
            CHECK(report.feasible);
            CHECK(report.violations.empty());
        }
        SUBCASE("one entry above p_max is one per-link violation")
        {
            PowerMatrix p = PowerMatrix::Constant(3, 3, 1.0);
            p.diagonal().setZero();
            p(0, 1) = params.p_max_w + 1.0;
            const auto report = check_feasible(p, params);
            CHECK_FALSE(report.feasible);
            // The row budget is also broken by that entry, so count per kind.
            std::size_t above = 0;
            for (const auto& v : report.violations)
                above += v.kind == FeasibilityReport::Violation::Kind::LinkAboveMax;
            CHECK(above == 1);
        }
        SUBCASE("a row summing to 24 W is one row-budget violation")
        {
            PowerMatrix p = uniform;
            p(1, 0) = 12.0;
            p(1, 2) = 12.0;
            const auto report = check_feasible(p, params);
            CHECK_FALSE(report.feasible);
            REQUIRE(report.violations.size() == 1);
            CHECK(report.violations[0].kind == FeasibilityReport::Violation::Kind::RowBudget);
            CHECK(report.violations[0].row == 1);
            CHECK(report.violations[0].value == 24.0);
            CHECK_FALSE(report.describe().empty());
        }
        SUBCASE("entry below p_min")
        {
            PowerMatrix p = uniform;
            p(2, 0) = 1e-7;
            const auto report = check_feasible(p, params);
            REQUIRE(report.violations.size() == 1);
            CHECK(report.violations[0].kind == FeasibilityReport::Violation::Kind::LinkBelowMin);
        }
        SUBCASE("slack of 1e-9 W is tolerated")
        {
            PowerMatrix p = uniform;
            p(0, 1) += 5e-10;
            CHECK(check_feasible(p, params).feasible);
            p(0, 1) += 1e-8;
            CHECK_FALSE(check_feasible(p, params).feasible);
        }
        SUBCASE("nonzero diagonal and non-square shapes")
        {
            PowerMatrix p = uniform;
            p(1, 1) = 0.5;
            CHECK(check_feasible(p, params).violations.at(0).kind ==
                  FeasibilityReport::Violation::Kind::NonzeroDiagonal);
            CHECK(check_feasible(PowerMatrix::Zero(2, 3), params).violations.at(0).kind ==
                  FeasibilityReport::Violation::Kind::Shape);
        }
    }

    TEST_CASE("projection is idempotent on feasible matrices and always lands feasible")
    {
        const ChannelParams params;
        Rng rng(13);
        for (int trial = 0; trial < 200; ++trial) {
            const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng() % 7);
            const PowerMatrix feasible = random_feasible_power(n, rng, params);
            REQUIRE(check_feasible(feasible, params).feasible);
            PowerMatrix projected = feasible;
            project_to_feasible(projected, params);
            REQUIRE((projected - feasible).cwiseAbs().maxCoeff() <= 1e-12);

            PowerMatrix wild = PowerMatrix::Zero(n, n);
            for (Eigen::Index i = 0; i < n; ++i)
                for (Eigen::Index j = 0; j < n; ++j)
                    if (i != j)
                        wild(i, j) = std::exp(-20.0 + 25.0 * uniform01(rng));
            project_to_feasible(wild, params);
            REQUIRE(check_feasible(wild, params).feasible);
            PowerMatrix again = wild;
            project_to_feasible(again, params);
            REQUIRE((again - wild).cwiseAbs().maxCoeff() <= 1e-12);
        }
    }

    TEST_CASE("result objectives match the link metrics and the reference")
    {
        Rng rng(17);
        for (int trial = 0; trial < 10; ++trial) {
            const auto problem = random_problem(3 + trial % 3, rng);
            GeneticConfig ga;
            ga.rng_seed = static_cast<std::uint64_t>(trial);
            ga.stall_generations = 50;
            for (const auto& result : {default_pa(problem), greedy_pa(problem), genetic_pa(problem, ga)}) {
                CHECK(result.objective_min_snr == off_diagonal_min(result.metrics.snr));
                CHECK(result.objective_max_delay_s == off_diagonal_max(result.metrics.delay_s));
                reference::Grid p(static_cast<std::size_t>(problem.size()));
                reference::Grid d(p.size());
                for (std::size_t i = 0; i < p.size(); ++i)
                    for (std::size_t j = 0; j < p.size(); ++j) {
                        p[i].push_back(result.power(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
                        d[i].push_back(problem.dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
                    }
                CHECK(result.objective_min_snr ==
                      doctest::Approx(reference::min_snr(p, d, 3.0, 4.14e-14)).epsilon(1e-12));
            }
        }
    }

    TEST_CASE("higher min-SNR is exactly lower max-delay")
    {
        Rng rng(19);
        const ChannelParams params;
        for (int trial = 0; trial < 300; ++trial) {
            const auto problem = random_problem(3 + trial % 3, rng);
            const auto a = evaluate_allocation(problem, random_feasible_power(problem.size(), rng, params), "A");
            const auto b = evaluate_allocation(problem, random_feasible_power(problem.size(), rng, params), "B");
            REQUIRE((a.objective_min_snr > b.objective_min_snr) == (a.objective_max_delay_s < b.objective_max_delay_s));
        }
    }

    TEST_CASE("config validation")
    {
        GreedyConfig g;
        g.learn_rate = 1.0;
        CHECK_THROWS_AS(g.validate(), DomainError);
        g = {};
        g.max_epochs = 0;
        CHECK_THROWS_AS(g.validate(), DomainError);
        GeneticConfig ga;
        ga.population_size = 1;
        CHECK_THROWS_AS(ga.validate(), DomainError);
        ga = {};
        ga.mutation_rate = 1.5;
        CHECK_THROWS_AS(ga.validate(), DomainError);
    }
}
