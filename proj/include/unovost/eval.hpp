// Region-quality evaluation: optimal prediction/ground-truth track matching
// and mean region Jaccard. Extra predictions carry no penalty.
#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "unovost/assignment.hpp"
#include "unovost/error.hpp"
#include "unovost/io.hpp"
#include "unovost/mask.hpp"

namespace unovost {

struct TrackJ {
    int gt_track_id = 0;
    int matched_pred_id = -1; // -1 when unmatched
    double j = 0.0;
};

struct EvalReport {
    std::vector<TrackJ> per_track;
    double mean_j = 0.0;
    int matched = 0;
    int unmatched_predictions = 0;
};

namespace detail {

// Mean per-frame IoU over frames where either track has a nonempty mask.
// Frames where both are empty are excluded.
inline double track_pair_j(const TrackRecord& gt, const TrackRecord& pred, int num_frames) {
    double sum = 0.0;
    int count = 0;
    for (int t = 0; t < num_frames; ++t) {
        auto git = gt.segments.find(t);
        auto pit = pred.segments.find(t);
        bool g = git != gt.segments.end() && !is_empty(git->second);
        bool p = pit != pred.segments.end() && !is_empty(pit->second);
        if (!g && !p)
            continue;
        ++count;
        if (g && p)
            sum += iou(git->second, pit->second);
    }
    return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

} // namespace detail

// Optimal GT <-> prediction assignment on mean per-frame IoU.
inline Matching match_tracks(const TrackFile& predictions, const TrackFile& ground_truth) {
    if (predictions.height != ground_truth.height || predictions.width != ground_truth.width ||
        predictions.num_frames != ground_truth.num_frames)
        throw InputError("evaluation: prediction and ground-truth grids differ");
    ScoreMatrix m(static_cast<int>(ground_truth.tracks.size()), static_cast<int>(predictions.tracks.size()));
    for (int g = 0; g < m.rows; ++g)
        for (int p = 0; p < m.cols; ++p)
            m.set(g, p, detail::track_pair_j(ground_truth.tracks[g], predictions.tracks[p],
                                             ground_truth.num_frames));
    return hungarian_max(m);
}

inline EvalReport mean_j(const TrackFile& predictions, const TrackFile& ground_truth) {
    Matching match = match_tracks(predictions, ground_truth);
    EvalReport report;
    std::vector<int> gt_to_pred(ground_truth.tracks.size(), -1);
    for (auto [g, p] : match.pairs)
        gt_to_pred[g] = p;
    double sum = 0.0;
    for (std::size_t g = 0; g < ground_truth.tracks.size(); ++g) {
        TrackJ tj;
        tj.gt_track_id = ground_truth.tracks[g].track_id;
        if (gt_to_pred[g] >= 0) {
            tj.matched_pred_id = predictions.tracks[gt_to_pred[g]].track_id;
            tj.j = detail::track_pair_j(ground_truth.tracks[g], predictions.tracks[gt_to_pred[g]],
                                        ground_truth.num_frames);
            ++report.matched;
        }
        sum += tj.j;
        report.per_track.push_back(tj);
    }
    report.mean_j = ground_truth.tracks.empty() ? 0.0 : sum / static_cast<double>(ground_truth.tracks.size());
    report.unmatched_predictions = static_cast<int>(predictions.tracks.size()) - report.matched;
    return report;
}

inline nlohmann::json report_to_json(const EvalReport& report) {
    nlohmann::json j;
    j["mean_j"] = report.mean_j;
    j["matched"] = report.matched;
    j["unmatched_predictions"] = report.unmatched_predictions;
    j["per_track"] = nlohmann::json::array();
    for (const TrackJ& t : report.per_track) {
        nlohmann::json jt;
        jt["gt_track_id"] = t.gt_track_id;
        jt["matched_pred_id"] = t.matched_pred_id;
        jt["j"] = t.j;
        j["per_track"].push_back(std::move(jt));
    }
    return j;
}

inline std::string report_to_table(const EvalReport& report) {
    std::ostringstream os;
    os << "gt_track  matched_pred  J\n";
    for (const TrackJ& t : report.per_track) {
        os << "  " << t.gt_track_id << "         ";
        if (t.matched_pred_id >= 0)
            os << t.matched_pred_id;
        else
            os << "-";
        os << "          " << t.j << "\n";
    }
    os << "mean J: " << report.mean_j << "  (matched " << report.matched << ", extra predictions "
       << report.unmatched_predictions << ")\n";
    return os.str();
}

} // namespace unovost
