#include "fded/report.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>

namespace fded {

SequenceEvaluation evaluate_sequence(const std::vector<EdgeMap>& pred,
                                     const std::vector<EdgeMap>& oracle,
                                     const std::vector<EdgeMap>* occluded_boundary,
                                     const std::vector<double>& occlusion_rates, int tol) {
    if (pred.size() != oracle.size() || pred.size() != occlusion_rates.size()) {
        throw ShapeError("evaluate_sequence: sequence lengths differ");
    }
    if (pred.empty()) throw ParamError("evaluate_sequence: empty sequence");

    SequenceEvaluation eval;
    for (size_t i = 0; i < pred.size(); ++i) {
        const EdgeScore s = edge_prf(pred[i], oracle[i], tol);
        FrameScore fs;
        fs.frame = static_cast<int>(i);
        fs.precision = s.precision;
        fs.recall = s.recall;
        fs.f1 = s.f1;
        fs.occlusion_rate = occlusion_rates[i];
        if (i > 0) fs.ssim_prev = ssim(to_grid(pred[i - 1]), to_grid(pred[i]));
        if (occluded_boundary) {
            fs.occb_recall = edge_prf(pred[i], (*occluded_boundary)[i], tol).recall;
        }
        eval.per_frame.push_back(fs);
        eval.mean_precision += s.precision;
        eval.mean_recall += s.recall;
        eval.mean_f1 += s.f1;
    }
    const double n = static_cast<double>(pred.size());
    eval.mean_precision /= n;
    eval.mean_recall /= n;
    eval.mean_f1 /= n;
    eval.temporal_consistency = pred.size() >= 2 ? temporal_consistency(pred) : 1.0;

    // Breakdown buckets: exactly occlusion-free, then 10%-wide rate bands.
    const double edges[] = {0.0, 0.1, 0.2, 0.3, 0.4, 1.0};
    auto bucket_of = [&](double rate) {
        if (rate <= 0.0) return 0;
        for (int b = 0; b < 5; ++b) {
            if (rate <= edges[b + 1]) return b + 1;
        }
        return 5;
    };
    std::vector<OcclusionBucket> buckets(6);
    buckets[0] = {0.0, 0.0, 0, 0.0, 0.0};
    for (int b = 0; b < 5; ++b) buckets[static_cast<size_t>(b + 1)] = {edges[b], edges[b + 1], 0, 0.0, 0.0};
    for (const FrameScore& fs : eval.per_frame) {
        OcclusionBucket& bucket = buckets[static_cast<size_t>(bucket_of(fs.occlusion_rate))];
        ++bucket.frames;
        bucket.mean_f1 += fs.f1;
        bucket.mean_recall += fs.recall;
    }
    for (OcclusionBucket& b : buckets) {
        if (b.frames > 0) {
            b.mean_f1 /= b.frames;
            b.mean_recall /= b.frames;
        }
    }
    eval.buckets = std::move(buckets);
    return eval;
}

std::string report_to_json_text(const SequenceEvaluation& eval, const RunConfig& config_echo) {
    nlohmann::json j;
    j["version"] = "fded-report/1";
    nlohmann::json frames = nlohmann::json::array();
    nlohmann::json per_frame = nlohmann::json::array();
    for (const FrameScore& fs : eval.per_frame) {
        frames.push_back(fs.frame);
        nlohmann::json fj;
        fj["frame"] = fs.frame;
        fj["precision"] = fs.precision;
        fj["recall"] = fs.recall;
        fj["f1"] = fs.f1;
        fj["ssim_prev"] = fs.ssim_prev;
        fj["occlusion_rate"] = fs.occlusion_rate;
        if (fs.occb_recall) fj["occb_recall"] = *fs.occb_recall;
        per_frame.push_back(fj);
    }
    j["frames"] = frames;
    j["per_frame"] = per_frame;
    nlohmann::json agg;
    agg["mean_precision"] = eval.mean_precision;
    agg["mean_recall"] = eval.mean_recall;
    agg["mean_f1"] = eval.mean_f1;
    agg["temporal_consistency"] = eval.temporal_consistency;
    nlohmann::json buckets = nlohmann::json::array();
    for (const OcclusionBucket& b : eval.buckets) {
        buckets.push_back({{"lo", b.lo},
                           {"hi", b.hi},
                           {"frames", b.frames},
                           {"mean_f1", b.mean_f1},
                           {"mean_recall", b.mean_recall}});
    }
    agg["occlusion_breakdown"] = buckets;
    j["aggregate"] = agg;
    j["config_echo"] = nlohmann::json::parse(run_config_to_json_text(config_echo));
    return j.dump(2) + "\n";
}

}  // namespace fded
