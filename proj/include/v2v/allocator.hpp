#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "v2v/channel.hpp"

namespace v2v {

/// Max-min SNR power allocation over a fixed scene:
///   maximize min_{i != j} SNR(i, j)
///   s.t. p_min <= P(i, j) <= p_max and sum_{j != i} P(i, j) <= p_max.
struct AllocationProblem {
    ChannelParams params;
    DistanceMatrix dist;

    Eigen::Index size() const noexcept { return dist.size(); }

    // Throws DomainError for bad params, FeasibilityError when
    // (n - 1) * p_min > p_max.
    void validate() const;
};

struct AllocationResult {
    PowerMatrix power;
    LinkMetrics metrics;
    double objective_min_snr = 0.0;
    double objective_max_delay_s = 0.0;
    std::size_t epochs_used = 0;
    bool converged = false;
    std::string strategy_name;
    // Best-so-far min-SNR after each epoch/generation; entry 0 is the start.
    std::vector<double> best_trace;
};

struct GreedyConfig {
    double learn_rate = 0.05;
    std::size_t max_epochs = 5000;
    double convergence_tol = 1e-6;
    std::size_t convergence_window = 300;

    void validate() const;
};

struct GeneticConfig {
    std::size_t population_size = 50;
    double crossover_rate = 0.8;
    double mutation_rate = 0.05;
    std::size_t max_generations = 100000;
    // Stop after this many generations without a better best individual.
    std::size_t stall_generations = 500;
    // Individuals whose min-SNR falls below this are replaced by fresh ones.
    double fitness_threshold = 0.0;
    std::size_t tournament_size = 3;
    std::uint64_t rng_seed = 0;

    void validate() const;
};

struct FeasibilityReport {
    struct Violation {
        enum class Kind { LinkBelowMin, LinkAboveMax, RowBudget, NonzeroDiagonal, Shape };
        Kind kind;
        Eigen::Index row;
        Eigen::Index col;  // -1 for row-budget violations
        double value;      // offending entry or row sum
        double limit;
    };

    bool feasible = true;
    std::vector<Violation> violations;

    std::string describe() const;
};

inline constexpr double kFeasibilitySlackW = 1e-9;

FeasibilityReport check_feasible(const PowerMatrix& power, const ChannelParams& params);

/// Clamp off-diagonal entries to [p_min, p_max], then scale down any row
/// whose sum exceeds p_max. Entries pushed under p_min are pinned there and
/// the remaining (larger) entries absorb the difference. Feasible input is
/// returned unchanged.
void project_to_feasible(PowerMatrix& power, const ChannelParams& params);

/// Every link gets p_max / (n - 1).
PowerMatrix uniform_power(Eigen::Index n, const ChannelParams& params);

AllocationResult default_pa(const AllocationProblem& problem);

/// Each epoch scales the weakest link up by (1 + learn_rate) and the
/// strongest link down by (1 - learn_rate), then projects back onto the
/// constraint set. Returns the best allocation seen.
AllocationResult greedy_pa(const AllocationProblem& problem, const GreedyConfig& cfg = {});

/// Real-coded GA over the n(n-1) off-diagonal powers: tournament selection,
/// uniform crossover, log-uniform resampling mutation, single elite. The
/// initial population holds the uniform allocation plus random individuals.
AllocationResult genetic_pa(const AllocationProblem& problem, const GeneticConfig& cfg = {});

/// Log-spaced grid from p_min to p_max inclusive.
std::vector<double> log_grid(const ChannelParams& params, std::size_t points);

inline constexpr double kOracleMaxEvaluations = 1e8;

/// Exhaustive search over every feasible matrix whose entries lie on `grid`.
/// Limited to n <= 3 and |grid|^(n(n-1)) <= 1e8.
AllocationResult oracle_pa(const AllocationProblem& problem, std::span<const double> grid);
AllocationResult oracle_pa(const AllocationProblem& problem, std::size_t grid_points_per_link);

/// Builds the result envelope (metrics and objectives) for a power matrix.
AllocationResult evaluate_allocation(const AllocationProblem& problem, PowerMatrix power,
                                     std::string strategy_name, double rate_factor = 1.0);

}  // namespace v2v
