#include "v2v/proxy.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace v2v {

namespace {

void check_ap(double v, std::size_t idx)
{
    if (!(v >= 0.0 && v <= 1.0))
        throw DomainError("curve sample " + std::to_string(idx) + ": AP outside [0, 1]");
}

double lerp(double a, double b, double t)
{
    return a + t * (b - a);
}

}  // namespace

std::string_view to_string(DelayType type)
{
    switch (type) {
    case DelayType::Backbone:
        return "backbone";
    case DelayType::ConstantTransmission:
        return "trans_delay";
    case DelayType::LinearCoefficient:
        return "liner_coef";
    }
    return "unknown";
}

DelayType delay_type_from_string(std::string_view name)
{
    if (name == "backbone")
        return DelayType::Backbone;
    if (name == "trans_delay" || name == "transmission")
        return DelayType::ConstantTransmission;
    if (name == "liner_coef" || name == "linear_coef")
        return DelayType::LinearCoefficient;
    throw DomainError("unknown delay type '" + std::string(name) + "'");
}

ApTriple elementwise_min(const ApTriple& a, const ApTriple& b)
{
    return {std::min(a.ap30, b.ap30), std::min(a.ap50, b.ap50), std::min(a.ap70, b.ap70)};
}

DegradationCurve::DegradationCurve(DelayType type, std::vector<CurveSample> samples)
    : type_(type), samples_(std::move(samples))
{
    if (samples_.empty())
        throw DomainError("degradation curve has no samples");
    for (std::size_t k = 0; k < samples_.size(); ++k) {
        const auto& s = samples_[k];
        if (!(s.delay >= 0.0))
            throw DomainError("curve sample " + std::to_string(k) + ": negative delay");
        check_ap(s.ap.ap30, k);
        check_ap(s.ap.ap50, k);
        check_ap(s.ap.ap70, k);
        if (!(s.ap.ap30 >= s.ap.ap50 && s.ap.ap50 >= s.ap.ap70))
            throw DomainError("curve sample " + std::to_string(k) + ": require ap30 >= ap50 >= ap70");
        if (k == 0)
            continue;
        const auto& prev = samples_[k - 1];
        if (!(s.delay > prev.delay))
            throw DomainError("curve sample " + std::to_string(k) + ": delays must increase strictly");
        if (s.ap.ap30 > prev.ap.ap30 || s.ap.ap50 > prev.ap.ap50 || s.ap.ap70 > prev.ap.ap70)
            throw DomainError("curve sample " + std::to_string(k) + ": AP must not increase with delay");
    }
}

ApTriple estimate_ap(const DegradationCurve& curve, double delay)
{
    if (!(delay >= 0.0))
        throw DomainError("estimate_ap: delay must be nonnegative");
    const auto s = curve.samples();
    if (delay <= s.front().delay)
        return s.front().ap;
    if (delay >= s.back().delay)
        return s.back().ap;
    // First sample strictly above the query; its predecessor brackets from below.
    const auto hi = std::upper_bound(s.begin(), s.end(), delay,
                                     [](double d, const CurveSample& c) { return d < c.delay; });
    const auto lo = hi - 1;
    if (delay == lo->delay)
        return lo->ap;
    const double t = (delay - lo->delay) / (hi->delay - lo->delay);
    return {lerp(lo->ap.ap30, hi->ap.ap30, t), lerp(lo->ap.ap50, hi->ap.ap50, t),
            lerp(lo->ap.ap70, hi->ap.ap70, t)};
}

const DegradationCurve& CurveSet::get(DelayType type) const
{
    switch (type) {
    case DelayType::Backbone:
        return backbone;
    case DelayType::ConstantTransmission:
        return transmission;
    case DelayType::LinearCoefficient:
        return linear_coef;
    }
    return backbone;
}

const CurveSet& default_curves()
{
    static const CurveSet curves{
        DegradationCurve(DelayType::Backbone, {{0.0, {0.864, 0.859, 0.805}},
                                               {0.1, {0.855, 0.709, 0.148}},
                                               {0.2, {0.618, 0.183, 0.036}},
                                               {0.3, {0.258, 0.071, 0.021}},
                                               {0.4, {0.124, 0.045, 0.018}},
                                               {0.5, {0.081, 0.033, 0.017}},
                                               {1.0, {0.039, 0.024, 0.015}}}),
        DegradationCurve(DelayType::ConstantTransmission, {{0.0, {0.864, 0.859, 0.805}},
                                                           {0.1, {0.860, 0.810, 0.435}},
                                                           {0.2, {0.750, 0.481, 0.227}},
                                                           {0.3, {0.500, 0.332, 0.196}}}),
        // Abscissa is the raw coefficient; no distance normalization is applied.
        DegradationCurve(DelayType::LinearCoefficient, {{0.0, {0.864, 0.859, 0.805}},
                                                        {0.1, {0.863, 0.836, 0.735}},
                                                        {0.5, {0.643, 0.440, 0.253}},
                                                        {1.0, {0.395, 0.314, 0.211}}}),
    };
    return curves;
}

CurveSet parse_curves(std::string_view json_text)
{
    CurveSet out = default_curves();
    try {
        const auto doc = nlohmann::json::parse(json_text);
        for (const auto& entry : doc.at("curves")) {
            const auto type = delay_type_from_string(entry.at("delay_type").get<std::string>());
            std::vector<CurveSample> samples;
            for (const auto& row : entry.at("samples")) {
                if (row.size() != 4)
                    throw ParseError("curve samples must be [delay, ap30, ap50, ap70]");
                samples.push_back({row.at(0).get<double>(),
                                   {row.at(1).get<double>(), row.at(2).get<double>(), row.at(3).get<double>()}});
            }
            DegradationCurve curve(type, std::move(samples));
            switch (type) {
            case DelayType::Backbone:
                out.backbone = std::move(curve);
                break;
            case DelayType::ConstantTransmission:
                out.transmission = std::move(curve);
                break;
            case DelayType::LinearCoefficient:
                out.linear_coef = std::move(curve);
                break;
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid curve file: ") + e.what());
    }
    return out;
}

CurveSet load_curves(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ParseError("cannot open curve file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_curves(buf.str());
}

SceneApEstimate estimate_scene_ap(const std::vector<AoiRecord>& records, const CurveSet& curves)
{
    if (records.empty())
        throw DomainError("estimate_scene_ap: no records");
    const bool has_links = std::any_of(records.begin(), records.end(),
                                       [](const AoiRecord& r) { return !r.is_ego(); });

    // Mean taken as first + mean(age - first) so equal ages average exactly.
    double first = 0.0;
    double shifted_sum = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    std::size_t count = 0;
    for (const auto& r : records) {
        if (has_links && r.is_ego())
            continue;
        if (count == 0) {
            first = lo = hi = r.snapped_age_s;
        } else {
            lo = std::min(lo, r.snapped_age_s);
            hi = std::max(hi, r.snapped_age_s);
        }
        shifted_sum += r.snapped_age_s - first;
        ++count;
    }

    SceneApEstimate est;
    est.mean_age_s = first + shifted_sum / static_cast<double>(count);
    est.age_spread_s = hi - lo;
    est.constant_component = estimate_ap(curves.transmission, est.mean_age_s);
    est.spread_component = estimate_ap(curves.linear_coef, est.age_spread_s);
    est.combined = elementwise_min(est.constant_component, est.spread_component);
    return est;
}

}  // namespace v2v
