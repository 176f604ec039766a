#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "v2v/aoi.hpp"

namespace v2v {

// Measured detection quality versus injected delay, used as a desk-scale
// stand-in for running the perception model. All outputs are estimates.

enum class DelayType { Backbone, ConstantTransmission, LinearCoefficient };

std::string_view to_string(DelayType type);
DelayType delay_type_from_string(std::string_view name);

struct ApTriple {
    double ap30 = 0.0;
    double ap50 = 0.0;
    double ap70 = 0.0;

    friend bool operator==(const ApTriple&, const ApTriple&) = default;
};

ApTriple elementwise_min(const ApTriple& a, const ApTriple& b);

struct CurveSample {
    double delay = 0.0;
    ApTriple ap;
};

/// Samples must be strictly increasing in delay, with every AP in [0, 1],
/// ap30 >= ap50 >= ap70, and each AP level non-increasing in delay.
class DegradationCurve {
public:
    DegradationCurve(DelayType type, std::vector<CurveSample> samples);

    DelayType type() const noexcept { return type_; }
    std::span<const CurveSample> samples() const noexcept { return samples_; }

private:
    DelayType type_;
    std::vector<CurveSample> samples_;
};

/// Piecewise-linear between bracketing samples, held at the last sample
/// beyond it. Queries at a sample's delay return that sample exactly.
ApTriple estimate_ap(const DegradationCurve& curve, double delay);

struct CurveSet {
    DegradationCurve backbone;
    DegradationCurve transmission;
    DegradationCurve linear_coef;

    const DegradationCurve& get(DelayType type) const;
};

const CurveSet& default_curves();

/// JSON: {"curves": [{"delay_type": "backbone", "samples": [[d, ap30, ap50, ap70], ...]}, ...]}.
/// Delay types absent from the file keep their defaults.
CurveSet parse_curves(std::string_view json_text);
CurveSet load_curves(const std::filesystem::path& path);

struct SceneApEstimate {
    double mean_age_s = 0.0;
    double age_spread_s = 0.0;
    ApTriple constant_component;  // transmission curve at the mean age
    ApTriple spread_component;    // linear-coefficient curve at max - min age
    ApTriple combined;            // entrywise minimum of the two

    static constexpr std::string_view kLabel = "proxy-estimate";
};

/// Scores the collaborator links of one scene. Ego records are ignored
/// unless they are the only records.
SceneApEstimate estimate_scene_ap(const std::vector<AoiRecord>& records,
                                  const CurveSet& curves = default_curves());

}  // namespace v2v
