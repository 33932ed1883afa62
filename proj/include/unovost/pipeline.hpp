// Full tracking run: proposal reduction -> tracklet building -> forest path
// cutting -> saliency selection -> track file assembly.
#pragma once

#include <future>
#include <string>
#include <vector>

#include <json.hpp>

#include "unovost/finalize.hpp"
#include "unovost/fpc.hpp"
#include "unovost/io.hpp"
#include "unovost/proposal.hpp"
#include "unovost/tracklet.hpp"

namespace unovost {

struct TrackingResult {
    std::vector<FrameProposalSet> reduced;
    std::vector<Tracklet> tracklets;
    PredecessorForest forest;
    std::vector<CutLogEntry> cut_log;
    std::vector<ScoredTrack> selected;
    TrackFile output;
};

inline TrackingResult run_tracking(const VideoProposals& video, const std::vector<FlowField>& flows,
                                   const Config& cfg) {
    cfg.validate();
    TrackingResult result;
    result.reduced.resize(video.frames.size());
    auto reduce_range = [&](std::size_t begin, std::size_t end) {
        for (std::size_t t = begin; t < end; ++t)
            result.reduced[t] = reduce_frame(video.frames[t], cfg.detection_score_min, cfg.nms_iou);
    };
    if (cfg.threads > 1 && video.frames.size() > 1) {
        std::vector<std::future<void>> work;
        std::size_t chunk = (video.frames.size() + cfg.threads - 1) / cfg.threads;
        for (std::size_t begin = 0; begin < video.frames.size(); begin += chunk)
            work.push_back(std::async(std::launch::async, reduce_range, begin,
                                      std::min(begin + chunk, video.frames.size())));
        for (auto& f : work)
            f.get();
    } else {
        reduce_range(0, video.frames.size());
    }

    // Embeddings are needed by FPC; fail before tracking starts.
    for (const FrameProposalSet& fs : result.reduced)
        for (const Proposal& p : fs.proposals)
            if (p.embedding.empty())
                throw FormatError("proposal " + std::to_string(p.source_id) + " at frame " +
                                  std::to_string(p.frame) + " lacks an embedding");

    result.tracklets = build_tracklets(result.reduced, flows, cfg.edge_min, cfg.matcher, cfg.threads);

    std::vector<Track> tracks;
    if (!result.tracklets.empty())
        tracks = forest_path_cutting(result.tracklets, video.num_frames, cfg.w_visual, cfg.w_temporal,
                                     cfg.density_mode, &result.forest, &result.cut_log);
    result.selected = select_top(tracks, result.tracklets, cfg.max_tracks);
    result.output = make_track_file(result.selected, result.tracklets, video.height, video.width,
                                    video.num_frames);
    return result;
}

// Flow fields for frames 0..T-2 from a directory of NNNNNN.flo files.
inline std::vector<FlowField> load_flow_dir(const std::string& dir, int num_frames, int height, int width) {
    std::vector<FlowField> flows;
    for (int t = 0; t + 1 < num_frames; ++t) {
        std::string path = flow_path(dir, t);
        FlowField flow;
        try {
            flow = read_flo(path);
        } catch (const InputError&) {
            throw InputError("missing flow for frame pair " + std::to_string(t) + "->" +
                             std::to_string(t + 1) + " (expected " + path + ")");
        }
        if (flow.height != height || flow.width != width)
            throw FormatError(path + ": flow dimensions do not match the sequence");
        flows.push_back(std::move(flow));
    }
    return flows;
}

// Stage-wise debug artifacts: tracklet dump, predecessor forest, cut log.
inline void write_debug_dump(const TrackingResult& result, const std::string& debug_dir) {
    std::filesystem::create_directories(debug_dir);
    nlohmann::json jt = nlohmann::json::array();
    for (const Tracklet& tk : result.tracklets) {
        nlohmann::json j;
        j["id"] = tk.id;
        j["b"] = tk.begin_frame;
        j["e"] = tk.end_frame;
        std::vector<int> ids;
        for (const Proposal& p : tk.proposals)
            ids.push_back(p.source_id);
        j["proposal_ids"] = ids;
        j["mean_embedding"] = tk.mean_embedding;
        jt.push_back(std::move(j));
    }
    write_json_atomic(jt, debug_dir + "/tracklets.json");

    nlohmann::json jf = nlohmann::json::object();
    for (std::size_t i = 0; i < result.forest.size(); ++i) {
        if (result.forest[i] >= 0)
            jf[std::to_string(i)] = result.forest[i];
        else
            jf[std::to_string(i)] = nullptr;
    }
    write_json_atomic(jf, debug_dir + "/forest.json");

    nlohmann::json jc = nlohmann::json::array();
    for (const CutLogEntry& e : result.cut_log) {
        nlohmann::json j;
        j["members"] = e.members;
        j["c_visual"] = e.score.visual;
        j["c_temporal"] = e.score.temporal;
        j["c"] = e.score.combined;
        jc.push_back(std::move(j));
    }
    write_json_atomic(jc, debug_dir + "/cut_log.json");
}

} // namespace unovost
