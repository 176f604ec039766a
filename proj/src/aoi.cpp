#include "v2v/aoi.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace v2v {

namespace {

// Ratios like 0.3 / 0.1 land one ulp off an integer; treat those as exact.
constexpr double kGridSnapTol = 1e-9;

}  // namespace

double AoiConfig::compute_delay_for(Eigen::Index vehicle) const
{
    const auto idx = static_cast<std::size_t>(vehicle);
    if (idx < compute_delay_overrides_s.size())
        return compute_delay_overrides_s[idx];
    return compute_delay_s;
}

void AoiConfig::validate() const
{
    if (!(sample_period_s > 0.0))
        throw DomainError("aoi: sample period must be positive");
    if (!(compute_delay_s >= 0.0))
        throw DomainError("aoi: compute delay must be nonnegative");
    for (double d : compute_delay_overrides_s)
        if (!(d >= 0.0))
            throw DomainError("aoi: compute delay overrides must be nonnegative");
    if (!(looptime_s >= sample_period_s))
        throw DomainError("aoi: looptime must be at least one sample period");
}

SnappedDelay probabilistic_round(double delay_s, double period_s, Rng& rng)
{
    if (!(period_s > 0.0))
        throw DomainError("probabilistic_round: period must be positive");
    if (!(delay_s >= 0.0) || !std::isfinite(delay_s))
        throw DomainError("probabilistic_round: delay must be finite and nonnegative");

    const double ratio = delay_s / period_s;
    const double nearest = std::round(ratio);
    std::int64_t offset = 0;
    if (std::abs(ratio - nearest) <= kGridSnapTol * std::max(1.0, ratio)) {
        offset = static_cast<std::int64_t>(nearest);
    } else {
        const double lower = std::floor(ratio);
        const double frac = ratio - lower;
        offset = static_cast<std::int64_t>(lower) + (uniform01(rng) < frac ? 1 : 0);
    }
    return {offset, static_cast<double>(offset) * period_s};
}

std::vector<AoiRecord> build_aoi_records(const MatrixXr& delay_s, const AoiConfig& cfg, Rng& rng)
{
    cfg.validate();
    if (delay_s.rows() != delay_s.cols())
        throw StructuralError("delay matrix must be square");
    const Eigen::Index n = delay_s.rows();
    std::vector<AoiRecord> records;
    records.reserve(static_cast<std::size_t>(n * n));

    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j && !cfg.include_ego)
                continue;
            AoiRecord r;
            r.sender = i;
            r.receiver = j;
            r.comm_delay_s = i == j ? 0.0 : delay_s(i, j);
            if (!(r.comm_delay_s >= 0.0) || !std::isfinite(r.comm_delay_s))
                throw DomainError("delay (" + std::to_string(i) + "," + std::to_string(j) +
                                  ") must be finite and nonnegative");
            r.compute_delay_s = cfg.compute_delay_for(i);
            r.total_delay_s = r.comm_delay_s + r.compute_delay_s;
            const auto snapped = probabilistic_round(r.total_delay_s, cfg.sample_period_s, rng);
            r.timestamp_offset = snapped.offset;
            r.snapped_age_s = snapped.age_s;
            records.push_back(r);
        }
    }
    return records;
}

std::vector<AoiRecord> build_aoi_records(const LinkMetrics& metrics, const AoiConfig& cfg)
{
    Rng rng(cfg.rng_seed);
    return build_aoi_records(metrics.delay_s, cfg, rng);
}

AoiSummary aoi_summary(const std::vector<AoiRecord>& records, double looptime_s)
{
    if (records.empty())
        throw DomainError("aoi_summary: no records");

    AoiSummary s;
    s.record_count = records.size();
    s.max_age_s = records.front().snapped_age_s;
    s.min_age_s = records.front().snapped_age_s;
    double sum = 0.0;
    for (const auto& r : records) {
        s.max_age_s = std::max(s.max_age_s, r.snapped_age_s);
        s.min_age_s = std::min(s.min_age_s, r.snapped_age_s);
        sum += r.snapped_age_s;
        if (r.snapped_age_s > looptime_s + kGridSnapTol * std::max(1.0, looptime_s))
            ++s.stale_count;
    }
    const double count = static_cast<double>(records.size());
    s.mean_age_s = sum / count;
    // Deviations are taken from the first age so equal ages give exactly 0.
    const double shift = records.front().snapped_age_s;
    double shifted_sum = 0.0;
    for (const auto& r : records)
        shifted_sum += r.snapped_age_s - shift;
    const double shifted_mean = shifted_sum / count;
    double sq = 0.0;
    for (const auto& r : records) {
        const double dev = r.snapped_age_s - shift - shifted_mean;
        sq += dev * dev;
    }
    s.age_variance_s2 = sq / count;
    s.max_effective_age_s = s.max_age_s + looptime_s;
    s.mean_effective_age_s = s.mean_age_s + looptime_s;
    return s;
}

}  // namespace v2v
