#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "v2v/channel.hpp"
#include "v2v/seed.hpp"

namespace v2v {

struct AoiConfig {
    // Backbone (computation) delay applied to every vehicle.
    double compute_delay_s = 0.0;
    // Per-vehicle overrides of compute_delay_s; empty means uniform.
    std::vector<double> compute_delay_overrides_s;
    double sample_period_s = 0.1;
    double looptime_s = 0.1;
    // Emit an (i, i) record per vehicle carrying only its compute delay.
    bool include_ego = true;
    std::uint64_t rng_seed = 0;

    double compute_delay_for(Eigen::Index vehicle) const;
    void validate() const;
};

struct AoiRecord {
    Eigen::Index sender = 0;
    Eigen::Index receiver = 0;
    double comm_delay_s = 0.0;
    double compute_delay_s = 0.0;
    double total_delay_s = 0.0;
    double snapped_age_s = 0.0;
    // Sampling periods into the past; snapped_age_s == timestamp_offset * period.
    std::int64_t timestamp_offset = 0;

    bool is_ego() const noexcept { return sender == receiver; }
};

struct SnappedDelay {
    std::int64_t offset = 0;
    double age_s = 0.0;
};

/// Expectation-preserving stochastic rounding onto the grid k * period:
/// floor with probability 1 - f, ceil with probability f, f = frac(delay/period).
SnappedDelay probabilistic_round(double delay_s, double period_s, Rng& rng);

/// One record per ordered link (and per vehicle for ego records). The
/// sender's compute delay is added to each link's communication delay.
std::vector<AoiRecord> build_aoi_records(const MatrixXr& delay_s, const AoiConfig& cfg, Rng& rng);
std::vector<AoiRecord> build_aoi_records(const LinkMetrics& metrics, const AoiConfig& cfg);

struct AoiSummary {
    double max_age_s = 0.0;
    double mean_age_s = 0.0;
    double age_variance_s2 = 0.0;
    double min_age_s = 0.0;
    std::size_t stale_count = 0;
    std::size_t record_count = 0;
    // Ages measured against ground truth stamped at now + looptime.
    double max_effective_age_s = 0.0;
    double mean_effective_age_s = 0.0;
};

/// Aggregates over snapped ages. A record is stale when its age strictly
/// exceeds looptime_s.
AoiSummary aoi_summary(const std::vector<AoiRecord>& records, double looptime_s);

}  // namespace v2v
