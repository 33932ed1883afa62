// Forest Path Cutting: build a predecessor forest of track hypotheses from
// tracklet visual similarity, then iteratively cut optimal root-to-leaf paths
// to form the final tracks.
#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "unovost/error.hpp"
#include "unovost/tracklet.hpp"

namespace unovost {

// Square symmetric matrix over tracklet pairs, entries in [0,1], diagonal 1.
using SimilarityMatrix = std::vector<std::vector<double>>;

// Optimal predecessor per tracklet; -1 means none.
using PredecessorForest = std::vector<int>;

struct PathHypothesis {
    std::vector<int> members; // tracklet ids, ascending

    int leaf_id() const { return members.back(); }
};

struct PathScore {
    double visual = 0.0;   // C^V
    double temporal = 0.0; // C^T
    double combined = 0.0; // C
};

struct Track {
    std::vector<int> tracklet_ids; // ascending
};

enum class DensityMode { Normalized, Raw };

// V[i][j] = 1 - |R_i - R_j| / D_max, with D_max the largest pairwise mean
// embedding distance in the video. All embeddings identical -> V == 1.
inline SimilarityMatrix visual_similarity(const std::vector<Tracklet>& tracklets) {
    const std::size_t n = tracklets.size();
    if (n == 0)
        throw ContractError("visual_similarity: no tracklets");
    const std::size_t dim = tracklets.front().mean_embedding.size();
    for (const Tracklet& tk : tracklets)
        if (tk.mean_embedding.size() != dim || dim == 0)
            throw ContractError("visual_similarity: embedding length mismatch or missing");

    std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
    double d_max = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double sq = 0.0;
            for (std::size_t d = 0; d < dim; ++d) {
                double diff = tracklets[i].mean_embedding[d] - tracklets[j].mean_embedding[d];
                sq += diff * diff;
            }
            double dv = std::sqrt(sq);
            dist[i][j] = dist[j][i] = dv;
            d_max = std::max(d_max, dv);
        }
    }
    SimilarityMatrix v(n, std::vector<double>(n, 1.0));
    if (d_max > 0.0)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j)
                    v[i][j] = 1.0 - dist[i][j] / d_max;
    return v;
}

// Part 1: optimal predecessor M_i per tracklet. For each tracklet the most
// similar earlier-ending tracklet is taken as an initial guess, then walked
// forward while a compatible in-between tracklet pointing at the current
// guess is itself the most similar remaining candidate. Argmax ties break to
// the lower tracklet id.
inline PredecessorForest build_forest(const std::vector<Tracklet>& tracklets, const SimilarityMatrix& v) {
    const int n = static_cast<int>(tracklets.size());
    for (int i = 1; i < n; ++i)
        if (tracklets[i].begin_frame < tracklets[i - 1].begin_frame)
            throw ContractError("build_forest: tracklets must be sorted by begin frame");
    PredecessorForest pred(n, -1);
    for (int i = 0; i < n; ++i) {
        std::vector<int> candidates; // {j : e_j < b_i}
        for (int j = 0; j < n; ++j)
            if (tracklets[j].end_frame < tracklets[i].begin_frame)
                candidates.push_back(j);
        if (candidates.empty())
            continue;
        auto argmax_excluding = [&](int excluded) {
            int best = -1;
            for (int j : candidates) {
                if (j == excluded)
                    continue;
                if (best < 0 || v[i][j] > v[i][best])
                    best = j;
            }
            return best;
        };
        int k = argmax_excluding(-1);
        while (true) {
            std::vector<int> between; // {j : e_j < b_i, b_j > e_k, M_j = k}
            for (int j : candidates)
                if (tracklets[j].begin_frame > tracklets[k].end_frame && pred[j] == k)
                    between.push_back(j);
            if (between.empty())
                break;
            int l = argmax_excluding(k);
            if (l >= 0 && std::find(between.begin(), between.end(), l) != between.end())
                k = l;
            else
                break;
        }
        pred[i] = k;
    }
    return pred;
}

// Part 2a: one path per leaf (a tracklet that is nobody's predecessor),
// holding the leaf and its full predecessor chain. Ordered by leaf id.
inline std::vector<PathHypothesis> enumerate_paths(const PredecessorForest& forest) {
    const int n = static_cast<int>(forest.size());
    std::vector<char> is_pred(n, 0);
    for (int m : forest)
        if (m >= 0)
            is_pred[m] = 1;
    std::vector<PathHypothesis> paths;
    for (int leaf = 0; leaf < n; ++leaf) {
        if (is_pred[leaf])
            continue;
        PathHypothesis path;
        for (int cur = leaf; cur >= 0; cur = forest[cur])
            path.members.push_back(cur);
        std::sort(path.members.begin(), path.members.end());
        paths.push_back(std::move(path));
    }
    return paths;
}

// C^V = min pairwise similarity in the path (1 for singletons), C^T = frame
// coverage (normalized by video length or raw), C = weighted sum.
inline PathScore score_path(const PathHypothesis& path, const std::vector<Tracklet>& tracklets,
                            const SimilarityMatrix& v, int video_length, double w_visual,
                            double w_temporal, DensityMode density_mode) {
    if (path.members.empty())
        throw ContractError("score_path: empty path");
    PathScore s;
    s.visual = 1.0;
    for (std::size_t a = 0; a < path.members.size(); ++a)
        for (std::size_t b = a + 1; b < path.members.size(); ++b)
            s.visual = std::min(s.visual, v[path.members[a]][path.members[b]]);
    std::int64_t covered = 0;
    for (int id : path.members)
        covered += tracklets[id].length();
    s.temporal = density_mode == DensityMode::Normalized
                     ? static_cast<double>(covered) / static_cast<double>(video_length)
                     : static_cast<double>(covered);
    s.combined = w_visual * s.visual + w_temporal * s.temporal;
    return s;
}

struct CutLogEntry {
    std::vector<int> members;
    PathScore score;
};

// Part 2b: iteratively select the best-scoring path as a final track and cut
// its tracklets out of every other path. Ties break to the path with the
// earliest member begin frame, then the lower leaf id.
inline std::vector<Track> cut_paths(std::vector<PathHypothesis> paths, const std::vector<Tracklet>& tracklets,
                                    const SimilarityMatrix& v, int video_length, double w_visual,
                                    double w_temporal, DensityMode density_mode,
                                    std::vector<CutLogEntry>* cut_log = nullptr) {
    std::vector<Track> tracks;
    auto min_begin = [&](const PathHypothesis& p) {
        int b = tracklets[p.members.front()].begin_frame;
        for (int id : p.members)
            b = std::min(b, tracklets[id].begin_frame);
        return b;
    };
    while (!paths.empty()) {
        std::size_t best = 0;
        PathScore best_score = score_path(paths[0], tracklets, v, video_length, w_visual, w_temporal, density_mode);
        for (std::size_t i = 1; i < paths.size(); ++i) {
            PathScore s = score_path(paths[i], tracklets, v, video_length, w_visual, w_temporal, density_mode);
            bool better = s.combined > best_score.combined;
            if (s.combined == best_score.combined) {
                int bi = min_begin(paths[i]);
                int bb = min_begin(paths[best]);
                better = bi < bb || (bi == bb && paths[i].leaf_id() < paths[best].leaf_id());
            }
            if (better) {
                best = i;
                best_score = s;
            }
        }
        PathHypothesis selected = std::move(paths[best]);
        paths.erase(paths.begin() + static_cast<std::ptrdiff_t>(best));
        if (cut_log)
            cut_log->push_back({selected.members, best_score});
        std::vector<PathHypothesis> remaining;
        for (PathHypothesis& p : paths) {
            std::vector<int> kept;
            std::set_difference(p.members.begin(), p.members.end(), selected.members.begin(),
                                selected.members.end(), std::back_inserter(kept));
            if (!kept.empty()) {
                p.members = std::move(kept);
                remaining.push_back(std::move(p));
            }
        }
        paths = std::move(remaining);
        tracks.push_back(Track{std::move(selected.members)});
    }
    return tracks;
}

// Convenience wrapper: full FPC on a tracklet list.
inline std::vector<Track> forest_path_cutting(const std::vector<Tracklet>& tracklets, int video_length,
                                              double w_visual, double w_temporal, DensityMode density_mode,
                                              PredecessorForest* forest_out = nullptr,
                                              std::vector<CutLogEntry>* cut_log = nullptr) {
    if (tracklets.empty())
        return {};
    SimilarityMatrix v = visual_similarity(tracklets);
    PredecessorForest forest = build_forest(tracklets, v);
    if (forest_out)
        *forest_out = forest;
    return cut_paths(enumerate_paths(forest), tracklets, v, video_length, w_visual, w_temporal, density_mode,
                     cut_log);
}

} // namespace unovost
