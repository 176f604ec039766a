#include "v2v/allocator.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <utility>

#include "v2v/seed.hpp"

namespace v2v {

namespace {

// Min-SNR of a power matrix against precomputed path losses. Uses the same
// per-link expression and floor as compute_snr_matrix.
class MinSnrEvaluator {
public:
    MinSnrEvaluator(const ChannelParams& params, const DistanceMatrix& dist)
        : params_(params), path_loss_(path_loss_matrix(params, dist))
    {
    }

    double operator()(const PowerMatrix& power) const
    {
        bool floor_hit = false;
        double best = std::numeric_limits<double>::infinity();
        const Eigen::Index n = power.rows();
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                if (i != j)
                    best = std::min(best, floor_snr(link_snr(params_, path_loss_, power, i, j), floor_hit));
        return best;
    }

private:
    const ChannelParams& params_;
    MatrixXr path_loss_;
};

void project_row(PowerMatrix& power, Eigen::Index row, const ChannelParams& params)
{
    const Eigen::Index n = power.cols();
    double sum = 0.0;
    for (Eigen::Index j = 0; j < n; ++j)
        if (j != row)
            sum += power(row, j);
    if (sum <= params.p_max_w)
        return;

    // Entries at p_min are fixed; the rest share what is left of the budget
    // in proportion to their current values.
    std::vector<bool> pinned(static_cast<std::size_t>(n), false);
    pinned[static_cast<std::size_t>(row)] = true;
    for (;;) {
        double free_sum = 0.0;
        Eigen::Index pinned_links = 0;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j == row)
                continue;
            if (pinned[static_cast<std::size_t>(j)])
                ++pinned_links;
            else
                free_sum += power(row, j);
        }
        if (free_sum <= 0.0)
            return;
        const double budget = params.p_max_w - static_cast<double>(pinned_links) * params.p_min_w;
        const double scale = budget / free_sum;
        bool newly_pinned = false;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (pinned[static_cast<std::size_t>(j)])
                continue;
            const double scaled = power(row, j) * scale;
            if (scaled < params.p_min_w) {
                power(row, j) = params.p_min_w;
                pinned[static_cast<std::size_t>(j)] = true;
                newly_pinned = true;
            }
        }
        if (!newly_pinned) {
            for (Eigen::Index j = 0; j < n; ++j)
                if (!pinned[static_cast<std::size_t>(j)])
                    power(row, j) *= scale;
            return;
        }
    }
}

struct LinkIndex {
    Eigen::Index row = 0;
    Eigen::Index col = 1;
};

// Strict comparisons over a row-major scan give lexicographic tie-breaking.
// The strongest link is chosen among links still above p_min: stepping a
// pinned link down is a no-op and would select the same link forever.
std::pair<LinkIndex, LinkIndex> extreme_links(const MatrixXr& snr, const PowerMatrix& power, double p_min)
{
    LinkIndex hi, lo;
    bool have_hi = false;
    double hi_value = -std::numeric_limits<double>::infinity();
    double lo_value = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < snr.rows(); ++i) {
        for (Eigen::Index j = 0; j < snr.cols(); ++j) {
            if (i == j)
                continue;
            if (power(i, j) > p_min && snr(i, j) > hi_value) {
                hi_value = snr(i, j);
                hi = {i, j};
                have_hi = true;
            }
            if (snr(i, j) < lo_value) {
                lo_value = snr(i, j);
                lo = {i, j};
            }
        }
    }
    if (!have_hi)
        hi = lo;
    return {hi, lo};
}

double log_uniform(Rng& rng, double lo, double hi)
{
    const double a = std::log(lo);
    const double b = std::log(hi);
    return std::clamp(std::exp(a + uniform01(rng) * (b - a)), lo, hi);
}

PowerMatrix random_power(Eigen::Index n, const ChannelParams& params, Rng& rng)
{
    PowerMatrix p = PowerMatrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if (i != j)
                p(i, j) = log_uniform(rng, params.p_min_w, params.p_max_w);
    project_to_feasible(p, params);
    return p;
}

}  // namespace

void AllocationProblem::validate() const
{
    params.validate();
    if (dist.size() < 2)
        throw DomainError("allocation problem needs at least two vehicles");
    const double n = static_cast<double>(dist.size());
    if ((n - 1.0) * params.p_min_w > params.p_max_w)
        throw FeasibilityError("infeasible problem: (n-1)*p_min exceeds p_max for n=" +
                               std::to_string(dist.size()));
}

void GreedyConfig::validate() const
{
    if (!(learn_rate > 0.0 && learn_rate < 1.0))
        throw DomainError("greedy: learn_rate must lie in (0, 1)");
    if (max_epochs < 1)
        throw DomainError("greedy: max_epochs must be at least 1");
    if (!(convergence_tol > 0.0))
        throw DomainError("greedy: convergence_tol must be positive");
    if (convergence_window < 1)
        throw DomainError("greedy: convergence_window must be at least 1");
}

void GeneticConfig::validate() const
{
    if (population_size < 2)
        throw DomainError("genetic: population_size must be at least 2");
    if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0))
        throw DomainError("genetic: crossover_rate must lie in [0, 1]");
    if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0))
        throw DomainError("genetic: mutation_rate must lie in [0, 1]");
    if (max_generations < 1)
        throw DomainError("genetic: max_generations must be at least 1");
    if (tournament_size < 1)
        throw DomainError("genetic: tournament_size must be at least 1");
}

std::string FeasibilityReport::describe() const
{
    if (feasible)
        return "feasible";
    std::ostringstream os;
    os.precision(17);
    for (const auto& v : violations) {
        switch (v.kind) {
        case Violation::Kind::LinkBelowMin:
            os << "P(" << v.row << "," << v.col << ")=" << v.value << " below p_min " << v.limit;
            break;
        case Violation::Kind::LinkAboveMax:
            os << "P(" << v.row << "," << v.col << ")=" << v.value << " above p_max " << v.limit;
            break;
        case Violation::Kind::RowBudget:
            os << "row " << v.row << " sums to " << v.value << " over budget " << v.limit;
            break;
        case Violation::Kind::NonzeroDiagonal:
            os << "P(" << v.row << "," << v.col << ")=" << v.value << " on the diagonal";
            break;
        case Violation::Kind::Shape:
            os << "power matrix is not square";
            break;
        }
        os << '\n';
    }
    return os.str();
}

FeasibilityReport check_feasible(const PowerMatrix& power, const ChannelParams& params)
{
    using Kind = FeasibilityReport::Violation::Kind;
    FeasibilityReport report;
    if (power.rows() != power.cols()) {
        report.feasible = false;
        report.violations.push_back({Kind::Shape, power.rows(), power.cols(), 0.0, 0.0});
        return report;
    }
    for (Eigen::Index i = 0; i < power.rows(); ++i) {
        double sum = 0.0;
        for (Eigen::Index j = 0; j < power.cols(); ++j) {
            const double p = power(i, j);
            if (i == j) {
                if (p != 0.0)
                    report.violations.push_back({Kind::NonzeroDiagonal, i, j, p, 0.0});
                continue;
            }
            sum += p;
            if (!(p >= params.p_min_w - kFeasibilitySlackW))
                report.violations.push_back({Kind::LinkBelowMin, i, j, p, params.p_min_w});
            else if (!(p <= params.p_max_w + kFeasibilitySlackW))
                report.violations.push_back({Kind::LinkAboveMax, i, j, p, params.p_max_w});
        }
        if (!(sum <= params.p_max_w + kFeasibilitySlackW))
            report.violations.push_back({Kind::RowBudget, i, -1, sum, params.p_max_w});
    }
    report.feasible = report.violations.empty();
    return report;
}

void project_to_feasible(PowerMatrix& power, const ChannelParams& params)
{
    if (power.rows() != power.cols())
        throw StructuralError("power matrix must be square");
    const Eigen::Index n = power.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
        power(i, i) = 0.0;
        for (Eigen::Index j = 0; j < n; ++j)
            if (i != j)
                power(i, j) = std::clamp(power(i, j), params.p_min_w, params.p_max_w);
    }
    for (Eigen::Index i = 0; i < n; ++i)
        project_row(power, i, params);
}

PowerMatrix uniform_power(Eigen::Index n, const ChannelParams& params)
{
    PowerMatrix p = PowerMatrix::Constant(n, n, params.p_max_w / static_cast<double>(n - 1));
    p.diagonal().setZero();
    return p;
}

AllocationResult evaluate_allocation(const AllocationProblem& problem, PowerMatrix power,
                                     std::string strategy_name, double rate_factor)
{
    AllocationResult r;
    r.metrics = compute_link_metrics(problem.params, problem.dist, power, rate_factor);
    r.power = std::move(power);
    r.objective_min_snr = off_diagonal_min(r.metrics.snr);
    r.objective_max_delay_s = off_diagonal_max(r.metrics.delay_s);
    r.strategy_name = std::move(strategy_name);
    return r;
}

AllocationResult default_pa(const AllocationProblem& problem)
{
    problem.validate();
    auto r = evaluate_allocation(problem, uniform_power(problem.size(), problem.params), "DefaultPA");
    r.converged = true;
    r.best_trace = {r.objective_min_snr};
    return r;
}

AllocationResult greedy_pa(const AllocationProblem& problem, const GreedyConfig& cfg)
{
    problem.validate();
    cfg.validate();
    const auto& params = problem.params;
    const Eigen::Index n = problem.size();
    const MatrixXr path_loss = path_loss_matrix(params, problem.dist);

    PowerMatrix power = uniform_power(n, params);
    MatrixXr snr = compute_snr_matrix(params, problem.dist, power);
    PowerMatrix best_power = power;
    double best = off_diagonal_min(snr);

    std::vector<double> trace;
    trace.reserve(cfg.max_epochs + 1);
    trace.push_back(best);

    bool converged = false;
    std::size_t epoch = 0;
    while (epoch < cfg.max_epochs) {
        ++epoch;
        const auto [hi, lo] = extreme_links(snr, power, params.p_min_w);
        power(lo.row, lo.col) *= 1.0 + cfg.learn_rate;
        power(hi.row, hi.col) *= 1.0 - cfg.learn_rate;
        project_to_feasible(power, params);

        snr = compute_snr_matrix(params, problem.dist, power);
        const double current = off_diagonal_min(snr);
        if (current > best) {
            best = current;
            best_power = power;
        }
        trace.push_back(best);

        if (epoch >= cfg.convergence_window) {
            const double earlier = trace[epoch - cfg.convergence_window];
            if (best - earlier < cfg.convergence_tol * std::abs(earlier)) {
                converged = true;
                break;
            }
        }
    }

    auto r = evaluate_allocation(problem, std::move(best_power), "GreedyPA");
    r.epochs_used = epoch;
    r.converged = converged;
    r.best_trace = std::move(trace);
    return r;
}

AllocationResult genetic_pa(const AllocationProblem& problem, const GeneticConfig& cfg)
{
    problem.validate();
    cfg.validate();
    const auto& params = problem.params;
    const Eigen::Index n = problem.size();
    const MinSnrEvaluator fitness_of(params, problem.dist);
    Rng rng(cfg.rng_seed);

    struct Individual {
        PowerMatrix power;
        double fitness;
    };

    auto fresh = [&]() {
        Individual ind{random_power(n, params, rng), 0.0};
        ind.fitness = fitness_of(ind.power);
        return ind;
    };
    // Below-threshold individuals are discarded in favour of new random ones;
    // after a bounded number of redraws the last candidate is kept.
    constexpr int kMaxRedraws = 100;
    auto admit = [&](Individual ind) {
        for (int attempt = 0; ind.fitness < cfg.fitness_threshold && attempt < kMaxRedraws; ++attempt)
            ind = fresh();
        return ind;
    };

    // The uniform allocation seeds the population so the search never ends
    // below DefaultPA; the remaining individuals are log-uniform random.
    std::vector<Individual> population;
    population.reserve(cfg.population_size);
    {
        Individual seed{uniform_power(n, params), 0.0};
        seed.fitness = fitness_of(seed.power);
        population.push_back(admit(std::move(seed)));
    }
    while (population.size() < cfg.population_size)
        population.push_back(admit(fresh()));

    auto best_of = [](const std::vector<Individual>& pop) {
        std::size_t idx = 0;
        for (std::size_t k = 1; k < pop.size(); ++k)
            if (pop[k].fitness > pop[idx].fitness)
                idx = k;
        return idx;
    };
    auto tournament = [&]() -> const Individual& {
        std::size_t winner = static_cast<std::size_t>(rng() % population.size());
        for (std::size_t t = 1; t < cfg.tournament_size; ++t) {
            const auto challenger = static_cast<std::size_t>(rng() % population.size());
            if (population[challenger].fitness > population[winner].fitness ||
                (population[challenger].fitness == population[winner].fitness && challenger < winner))
                winner = challenger;
        }
        return population[winner];
    };
    auto mutate = [&](PowerMatrix& p) {
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                if (i != j && uniform01(rng) < cfg.mutation_rate)
                    p(i, j) = log_uniform(rng, params.p_min_w, params.p_max_w);
    };

    Individual best = population[best_of(population)];
    std::vector<double> trace{best.fitness};
    std::size_t stall = 0;
    std::size_t generation = 0;
    bool converged = false;

    std::vector<Individual> next;
    next.reserve(cfg.population_size);
    while (generation < cfg.max_generations) {
        ++generation;
        next.clear();
        next.push_back(population[best_of(population)]);
        while (next.size() < cfg.population_size) {
            PowerMatrix a = tournament().power;
            PowerMatrix b = tournament().power;
            if (uniform01(rng) < cfg.crossover_rate) {
                for (Eigen::Index i = 0; i < n; ++i)
                    for (Eigen::Index j = 0; j < n; ++j)
                        if (i != j && uniform01(rng) < 0.5)
                            std::swap(a(i, j), b(i, j));
            }
            for (PowerMatrix* child : {&a, &b}) {
                if (next.size() >= cfg.population_size)
                    break;
                mutate(*child);
                project_to_feasible(*child, params);
                const double f = fitness_of(*child);
                next.push_back(admit(Individual{std::move(*child), f}));
            }
        }
        population.swap(next);

        const auto& leader = population[best_of(population)];
        if (leader.fitness > best.fitness) {
            best = leader;
            stall = 0;
        } else {
            ++stall;
        }
        trace.push_back(best.fitness);
        if (cfg.stall_generations > 0 && stall >= cfg.stall_generations) {
            converged = true;
            break;
        }
    }

    auto r = evaluate_allocation(problem, std::move(best.power), "GeneticPA");
    r.epochs_used = generation;
    r.converged = converged;
    r.best_trace = std::move(trace);
    return r;
}

std::vector<double> log_grid(const ChannelParams& params, std::size_t points)
{
    if (points < 2)
        throw DomainError("log grid needs at least two points");
    std::vector<double> grid(points);
    const double a = std::log(params.p_min_w);
    const double b = std::log(params.p_max_w);
    for (std::size_t k = 0; k < points; ++k)
        grid[k] = std::exp(a + (b - a) * static_cast<double>(k) / static_cast<double>(points - 1));
    grid.front() = params.p_min_w;
    grid.back() = params.p_max_w;
    return grid;
}

AllocationResult oracle_pa(const AllocationProblem& problem, std::span<const double> grid)
{
    problem.validate();
    const auto& params = problem.params;
    const Eigen::Index n = problem.size();
    if (n > 3)
        throw CapacityError("oracle search is limited to n <= 3, got n=" + std::to_string(n));
    if (grid.empty())
        throw DomainError("oracle grid is empty");
    const double links = static_cast<double>(n * (n - 1));
    if (std::pow(static_cast<double>(grid.size()), links) > kOracleMaxEvaluations)
        throw CapacityError("oracle grid of " + std::to_string(grid.size()) +
                            " points per link exceeds the evaluation guard");

    std::vector<double> values;
    for (double g : grid)
        if (g >= params.p_min_w - kFeasibilitySlackW && g <= params.p_max_w + kFeasibilitySlackW)
            values.push_back(g);

    // Row-feasible tuples first: the row budget couples only entries of one row.
    const auto width = static_cast<std::size_t>(n - 1);
    std::vector<std::vector<double>> row_tuples;
    std::vector<double> tuple(width);
    std::function<void(std::size_t, double)> enumerate = [&](std::size_t pos, double sum) {
        if (pos == width) {
            row_tuples.push_back(tuple);
            return;
        }
        for (double v : values) {
            if (sum + v > params.p_max_w + kFeasibilitySlackW)
                continue;
            tuple[pos] = v;
            enumerate(pos + 1, sum + v);
        }
    };
    enumerate(0, 0.0);
    if (row_tuples.empty())
        throw FeasibilityError("no grid point satisfies the row budget");

    const MinSnrEvaluator min_snr(params, problem.dist);
    PowerMatrix power = PowerMatrix::Zero(n, n);
    PowerMatrix best_power;
    double best = -1.0;

    auto place = [&](Eigen::Index row, const std::vector<double>& t) {
        std::size_t pos = 0;
        for (Eigen::Index j = 0; j < n; ++j)
            if (j != row)
                power(row, j) = t[pos++];
    };
    std::function<void(Eigen::Index)> search = [&](Eigen::Index row) {
        if (row == n) {
            const double value = min_snr(power);
            if (value > best) {
                best = value;
                best_power = power;
            }
            return;
        }
        for (const auto& t : row_tuples) {
            place(row, t);
            search(row + 1);
        }
    };
    search(0);

    auto r = evaluate_allocation(problem, std::move(best_power), "OraclePA");
    r.epochs_used = 1;
    r.converged = true;
    r.best_trace = {r.objective_min_snr};
    return r;
}

AllocationResult oracle_pa(const AllocationProblem& problem, std::size_t grid_points_per_link)
{
    problem.validate();
    const auto grid = log_grid(problem.params, grid_points_per_link);
    return oracle_pa(problem, grid);
}

}  // namespace v2v
