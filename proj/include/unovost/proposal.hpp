// Per-frame proposal loading and reduction: score filtering, mask NMS and
// score-ordered overlap clipping, producing pixel-disjoint proposal sets.
#pragma once

#include <algorithm>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "unovost/error.hpp"
#include "unovost/mask.hpp"

namespace unovost {

struct Proposal {
    int frame = 0;
    Mask mask;
    double score = 0.0;
    std::vector<double> embedding; // empty means missing
    int source_id = 0;
};

struct FrameProposalSet {
    int frame = 0;
    std::vector<Proposal> proposals;
};

struct VideoProposals {
    int height = 0;
    int width = 0;
    int num_frames = 0;
    std::vector<FrameProposalSet> frames; // indexed 0..num_frames-1
};

// Priority order used by NMS and clipping: descending score, ties broken by
// lower source_id.
inline bool higher_priority(const Proposal& a, const Proposal& b) {
    if (a.score != b.score)
        return a.score > b.score;
    return a.source_id < b.source_id;
}

// Keeps proposals with score strictly greater than min_score.
inline std::vector<Proposal> filter_by_score(const std::vector<Proposal>& proposals, double min_score) {
    std::vector<Proposal> out;
    for (const Proposal& p : proposals)
        if (p.score > min_score)
            out.push_back(p);
    return out;
}

// Greedy mask NMS: accept a proposal iff its IoU with every already accepted
// proposal is <= iou_threshold. Output ordered by priority.
inline FrameProposalSet nms_suppress(const FrameProposalSet& frame_set, double iou_threshold) {
    std::vector<Proposal> sorted = frame_set.proposals;
    std::stable_sort(sorted.begin(), sorted.end(), higher_priority);
    FrameProposalSet out;
    out.frame = frame_set.frame;
    for (const Proposal& cand : sorted) {
        bool keep = true;
        for (const Proposal& acc : out.proposals) {
            if (iou(cand.mask, acc.mask) > iou_threshold) {
                keep = false;
                break;
            }
        }
        if (keep)
            out.proposals.push_back(cand);
    }
    return out;
}

// Clips overlaps so the highest-priority mask owns each contested pixel.
// Proposals whose masks become empty are dropped.
inline FrameProposalSet clip_overlaps(const FrameProposalSet& frame_set) {
    std::vector<Proposal> sorted = frame_set.proposals;
    std::stable_sort(sorted.begin(), sorted.end(), higher_priority);
    std::vector<Mask> masks;
    masks.reserve(sorted.size());
    for (const Proposal& p : sorted)
        masks.push_back(p.mask);
    std::vector<Mask> clipped = clip_stack(masks);
    FrameProposalSet out;
    out.frame = frame_set.frame;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (is_empty(clipped[i]))
            continue;
        Proposal p = sorted[i];
        p.mask = std::move(clipped[i]);
        out.proposals.push_back(std::move(p));
    }
    return out;
}

// Full per-frame reduction: filter -> NMS -> clip.
inline FrameProposalSet reduce_frame(const FrameProposalSet& frame_set, double min_score, double nms_iou) {
    FrameProposalSet filtered;
    filtered.frame = frame_set.frame;
    filtered.proposals = filter_by_score(frame_set.proposals, min_score);
    return clip_overlaps(nms_suppress(filtered, nms_iou));
}

// ---------------------------------------------------------------------------
// Proposal file loading. Schema:
// { "height": H, "width": W, "num_frames": T,
//   "frames": [ { "frame": t, "proposals": [
//       { "id": int, "score": float, "rle": [ints], "embedding": [floats] } ] } ] }
// Frames may be absent (no proposals); embedding is optional per proposal but
// its length must be uniform across the file.

inline VideoProposals parse_proposals(const nlohmann::json& j) {
    VideoProposals video;
    try {
        video.height = j.at("height").get<int>();
        video.width = j.at("width").get<int>();
        video.num_frames = j.at("num_frames").get<int>();
        if (video.height <= 0 || video.width <= 0 || video.num_frames < 0)
            throw FormatError("proposal file: non-positive dimensions");
        video.frames.resize(static_cast<std::size_t>(video.num_frames));
        for (int t = 0; t < video.num_frames; ++t)
            video.frames[t].frame = t;
        std::size_t embedding_len = 0;
        bool embedding_seen = false;
        for (const auto& jf : j.value("frames", nlohmann::json::array())) {
            int t = jf.at("frame").get<int>();
            if (t < 0 || t >= video.num_frames)
                throw FormatError("proposal file: frame index " + std::to_string(t) + " out of range");
            for (const auto& jp : jf.at("proposals")) {
                Proposal p;
                p.frame = t;
                p.source_id = jp.at("id").get<int>();
                p.score = jp.at("score").get<double>();
                if (!(p.score > 0.0) || p.score > 1.0)
                    throw FormatError("proposal file: score out of (0,1] at frame " + std::to_string(t));
                p.mask.height = video.height;
                p.mask.width = video.width;
                p.mask.runs = jp.at("rle").get<std::vector<std::int64_t>>();
                p.mask.validate();
                if (jp.contains("embedding")) {
                    p.embedding = jp.at("embedding").get<std::vector<double>>();
                    if (embedding_seen && p.embedding.size() != embedding_len)
                        throw FormatError("proposal file: embedding length not uniform");
                    embedding_len = p.embedding.size();
                    embedding_seen = true;
                }
                video.frames[t].proposals.push_back(std::move(p));
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("proposal file: ") + e.what());
    }
    return video;
}

inline VideoProposals load_proposals(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open proposal file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path + ": " + e.what());
    }
    return parse_proposals(j);
}

} // namespace unovost
