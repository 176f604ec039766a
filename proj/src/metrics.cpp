#include "v2v/metrics.hpp"

#include <cmath>

#include "v2v/parallel.hpp"
#include "v2v/seed.hpp"

namespace v2v {

namespace {

std::size_t off_diagonal_count(const MatrixXr& m)
{
    if (m.rows() != m.cols())
        throw StructuralError("delay matrix must be square");
    if (m.rows() < 2)
        throw DomainError("delay matrix needs n >= 2");
    return static_cast<std::size_t>(m.rows() * (m.rows() - 1));
}

StrategyTrial score(const AllocationResult& r, std::string name)
{
    StrategyTrial t;
    t.strategy = std::move(name);
    t.delay_s = r.metrics.delay_s;
    t.min_snr = r.objective_min_snr;
    t.max_delay_s = r.objective_max_delay_s;
    t.epochs = r.epochs_used;
    t.variance = delay_variance(t.delay_s);
    t.mean = delay_mean(t.delay_s);
    return t;
}

TrialRecord run_trial(const ScenarioSpec& spec, std::size_t index, const ComparisonConfig& cfg)
{
    TrialRecord rec;
    rec.index = index;
    rec.seed = trial_seed(cfg.master_seed, index);

    ScenarioSpec trial_spec = spec;
    trial_spec.rng_seed = stream_seed(rec.seed, SeedStream::Scene);
    rec.dist = generate_scene(trial_spec).dist;

    const AllocationProblem problem{cfg.params, rec.dist};
    auto rescale = [&](AllocationResult r) {
        if (cfg.rate_factor != 1.0)
            r = evaluate_allocation(problem, r.power, r.strategy_name, cfg.rate_factor);
        return r;
    };
    auto keep = [&](const AllocationResult& raw, std::size_t epochs, std::string name) {
        auto r = rescale(raw);
        r.epochs_used = epochs;
        rec.strategies.push_back(score(r, std::move(name)));
    };

    const auto def = default_pa(problem);
    keep(def, def.epochs_used, "DefaultPA");

    const auto greedy = greedy_pa(problem, cfg.greedy);
    keep(greedy, greedy.epochs_used, "GreedyPA");
    for (std::size_t epochs : cfg.ablation_epochs) {
        GreedyConfig g = cfg.greedy;
        g.max_epochs = epochs;
        const auto r = greedy_pa(problem, g);
        keep(r, r.epochs_used, "GreedyPA_epoch" + std::to_string(epochs));
    }

    GeneticConfig ga = cfg.genetic;
    ga.rng_seed = stream_seed(rec.seed, SeedStream::Genetic);
    const auto genetic = genetic_pa(problem, ga);
    keep(genetic, genetic.epochs_used, "GeneticPA");

    const MatrixXr& reference = rec.strategies.back().delay_s;
    for (auto& s : rec.strategies)
        s.rmse_vs_reference = delay_rmse(s.delay_s, reference);
    return rec;
}

}  // namespace

double delay_rmse(const MatrixXr& a, const MatrixXr& b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw StructuralError("delay matrices differ in shape");
    const auto count = off_diagonal_count(a);
    double sq = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            if (i != j) {
                const double d = a(i, j) - b(i, j);
                sq += d * d;
            }
    return std::sqrt(sq / static_cast<double>(count));
}

double delay_mean(const MatrixXr& delay_s)
{
    const auto count = off_diagonal_count(delay_s);
    // first + mean(x - first): a constant matrix averages to exactly its value.
    const double first = delay_s(0, 1);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < delay_s.rows(); ++i)
        for (Eigen::Index j = 0; j < delay_s.cols(); ++j)
            if (i != j)
                sum += delay_s(i, j) - first;
    return first + sum / static_cast<double>(count);
}

double delay_variance(const MatrixXr& delay_s)
{
    const auto count = off_diagonal_count(delay_s);
    const double first = delay_s(0, 1);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < delay_s.rows(); ++i)
        for (Eigen::Index j = 0; j < delay_s.cols(); ++j)
            if (i != j)
                sum += delay_s(i, j) - first;
    const double shifted_mean = sum / static_cast<double>(count);
    double sq = 0.0;
    for (Eigen::Index i = 0; i < delay_s.rows(); ++i)
        for (Eigen::Index j = 0; j < delay_s.cols(); ++j)
            if (i != j) {
                const double d = delay_s(i, j) - first - shifted_mean;
                sq += d * d;
            }
    return sq / static_cast<double>(count);
}

const StrategyTrial& TrialRecord::strategy(const std::string& name) const
{
    for (const auto& s : strategies)
        if (s.strategy == name)
            return s;
    throw DomainError("trial has no strategy '" + name + "'");
}

const StrategyAggregate& StrategyComparison::aggregate(const std::string& name) const
{
    for (const auto& a : aggregates)
        if (a.strategy == name)
            return a;
    throw DomainError("comparison has no strategy '" + name + "'");
}

std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t trial)
{
    return derive_seed(master_seed, trial);
}

std::uint64_t stream_seed(std::uint64_t seed, SeedStream stream)
{
    return derive_seed(seed, static_cast<std::uint64_t>(stream));
}

StrategyComparison run_comparison(const ScenarioSpec& spec, std::size_t trials, const ComparisonConfig& cfg)
{
    if (trials < 1)
        throw DomainError("run_comparison: need at least one trial");
    if (!(cfg.rate_factor > 0.0 && cfg.rate_factor <= 1.0))
        throw DomainError("run_comparison: rate factor must lie in (0, 1]");
    spec.validate();

    StrategyComparison out;
    out.trials = ordered_parallel_map(trials, cfg.jobs,
                                      [&](std::size_t k) { return run_trial(spec, k, cfg); });
    out.n = out.trials.front().dist.size();

    for (const auto& first : out.trials.front().strategies) {
        StrategyAggregate agg;
        agg.strategy = first.strategy;
        for (const auto& t : out.trials) {
            const auto& s = t.strategy(first.strategy);
            agg.rmse_vs_reference += s.rmse_vs_reference;
            agg.variance += s.variance;
            agg.mean += s.mean;
            agg.min_snr += s.min_snr;
        }
        const double count = static_cast<double>(out.trials.size());
        agg.rmse_vs_reference /= count;
        agg.variance /= count;
        agg.mean /= count;
        agg.min_snr /= count;
        out.aggregates.push_back(std::move(agg));
    }
    return out;
}

}  // namespace v2v
