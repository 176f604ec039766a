#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "v2v/allocator.hpp"
#include "v2v/scenario.hpp"

namespace v2v {

// Statistics over the off-diagonal entries of delay matrices, summed in
// row-major order.

/// sqrt(mean over i != j of (a(i, j) - b(i, j))^2).
double delay_rmse(const MatrixXr& a, const MatrixXr& b);

/// Population variance over i != j.
double delay_variance(const MatrixXr& delay_s);

double delay_mean(const MatrixXr& delay_s);

struct StrategyTrial {
    std::string strategy;
    MatrixXr delay_s;
    double min_snr = 0.0;
    double max_delay_s = 0.0;
    std::size_t epochs = 0;
    double rmse_vs_reference = 0.0;
    double variance = 0.0;
    double mean = 0.0;
};

struct TrialRecord {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    DistanceMatrix dist;
    std::vector<StrategyTrial> strategies;

    const StrategyTrial& strategy(const std::string& name) const;
};

struct StrategyAggregate {
    std::string strategy;
    double rmse_vs_reference = 0.0;
    double variance = 0.0;
    double mean = 0.0;
    double min_snr = 0.0;
};

struct StrategyComparison {
    Eigen::Index n = 0;
    std::string reference = "GeneticPA";
    std::vector<TrialRecord> trials;
    std::vector<StrategyAggregate> aggregates;

    const StrategyAggregate& aggregate(const std::string& name) const;
};

struct ComparisonConfig {
    ChannelParams params;
    GreedyConfig greedy;
    // rng_seed is replaced by a per-trial seed.
    GeneticConfig genetic;
    // Extra greedy runs reported as "GreedyPA_epoch<E>".
    std::vector<std::size_t> ablation_epochs{500, 50};
    double rate_factor = 1.0;
    std::uint64_t master_seed = 0;
    std::size_t jobs = 1;
};

// Seed streams derived from a trial seed.
enum class SeedStream : std::uint64_t { Scene = 1, Genetic = 2, Aoi = 3 };

std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t trial);
std::uint64_t stream_seed(std::uint64_t trial_seed, SeedStream stream);

/// Per trial: build the scene, run DefaultPA, GreedyPA (plus ablations) and
/// GeneticPA, and score each against GeneticPA. Trials may run on `jobs`
/// threads; results are ordered by trial index either way.
StrategyComparison run_comparison(const ScenarioSpec& spec, std::size_t trials, const ComparisonConfig& cfg);

}  // namespace v2v
