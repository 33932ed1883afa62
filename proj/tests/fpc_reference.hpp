// Test-only naive reference for the forest path cutting stage: a direct
// transliteration with sets and full recomputation every iteration,
// independent of the library implementation.
#pragma once

#include <cmath>
#include <set>
#include <vector>

#include "unovost/synth.hpp"
#include "unovost/tracklet.hpp"

namespace fpcref {

struct RefTracklet {
    int begin = 0;
    int end = 0;
    std::vector<double> embedding;
};

inline std::vector<std::vector<double>> similarity(const std::vector<RefTracklet>& tracklets) {
    std::size_t n = tracklets.size();
    std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
    double d_max = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double sq = 0.0;
            for (std::size_t d = 0; d < tracklets[i].embedding.size(); ++d) {
                double diff = tracklets[i].embedding[d] - tracklets[j].embedding[d];
                sq += diff * diff;
            }
            dist[i][j] = dist[j][i] = std::sqrt(sq);
            if (dist[i][j] > d_max)
                d_max = dist[i][j];
        }
    std::vector<std::vector<double>> v(n, std::vector<double>(n, 1.0));
    if (d_max > 0.0)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j)
                    v[i][j] = 1.0 - dist[i][j] / d_max;
    return v;
}

inline std::vector<int> predecessors(const std::vector<RefTracklet>& tracklets,
                                     const std::vector<std::vector<double>>& v) {
    int n = static_cast<int>(tracklets.size());
    std::vector<int> m(n, -1);
    for (int i = 0; i < n; ++i) {
        std::set<int> earlier;
        for (int j = 0; j < n; ++j)
            if (tracklets[j].end < tracklets[i].begin)
                earlier.insert(j);
        if (earlier.empty())
            continue;
        int k = -1;
        for (int j : earlier)
            if (k < 0 || v[i][j] > v[i][k])
                k = j;
        while (true) {
            std::set<int> between;
            for (int j : earlier)
                if (tracklets[j].begin > tracklets[k].end && m[j] == k)
                    between.insert(j);
            if (between.empty())
                break;
            int l = -1;
            for (int j : earlier) {
                if (j == k)
                    continue;
                if (l < 0 || v[i][j] > v[i][l])
                    l = j;
            }
            if (l >= 0 && between.count(l))
                k = l;
            else
                break;
        }
        m[i] = k;
    }
    return m;
}

// Full Algorithm-1-style run; returns the final track member sets in
// selection order.
inline std::vector<std::set<int>> run(const std::vector<RefTracklet>& tracklets, int video_length,
                                      double w_visual, double w_temporal, bool normalized) {
    if (tracklets.empty())
        return {};
    auto v = similarity(tracklets);
    auto m = predecessors(tracklets, v);
    int n = static_cast<int>(tracklets.size());

    std::set<int> preds(m.begin(), m.end());
    std::vector<std::set<int>> paths;
    for (int leaf = 0; leaf < n; ++leaf) {
        if (preds.count(leaf))
            continue;
        std::set<int> path;
        int cur = leaf;
        while (cur >= 0) {
            path.insert(cur);
            cur = m[cur];
        }
        paths.push_back(path);
    }

    std::vector<std::set<int>> tracks;
    while (!paths.empty()) {
        std::size_t best = paths.size();
        double best_c = 0.0;
        int best_b = 0, best_leaf = 0;
        for (std::size_t i = 0; i < paths.size(); ++i) {
            double cv = 1.0;
            for (int a : paths[i])
                for (int b : paths[i])
                    if (a < b && v[a][b] < cv)
                        cv = v[a][b];
            std::int64_t covered = 0;
            int min_b = video_length;
            int leaf = -1;
            for (int a : paths[i]) {
                covered += tracklets[a].end - tracklets[a].begin + 1;
                if (tracklets[a].begin < min_b)
                    min_b = tracklets[a].begin;
                if (a > leaf)
                    leaf = a;
            }
            double ct = normalized ? static_cast<double>(covered) / static_cast<double>(video_length)
                                   : static_cast<double>(covered);
            double c = w_visual * cv + w_temporal * ct;
            bool take = best == paths.size() || c > best_c ||
                        (c == best_c && (min_b < best_b || (min_b == best_b && leaf < best_leaf)));
            if (take) {
                best = i;
                best_c = c;
                best_b = min_b;
                best_leaf = leaf;
            }
        }
        std::set<int> selected = paths[best];
        paths.erase(paths.begin() + static_cast<std::ptrdiff_t>(best));
        std::vector<std::set<int>> next;
        for (auto& p : paths) {
            for (int a : selected)
                p.erase(a);
            if (!p.empty())
                next.push_back(p);
        }
        paths = std::move(next);
        tracks.push_back(selected);
    }
    return tracks;
}

// Random tracklet configuration shared by the differential tests.
inline std::vector<unovost::Tracklet> random_tracklets(unovost::SplitMix64& rng, int max_count,
                                                       int video_length, int dim = 3) {
    int n = rng.uniform_int(1, max_count);
    std::vector<unovost::Tracklet> tracklets(n);
    for (auto& tk : tracklets) {
        tk.begin_frame = rng.uniform_int(0, video_length - 1);
        tk.end_frame = std::min(video_length - 1, tk.begin_frame + rng.uniform_int(0, 5));
        tk.mean_embedding.resize(dim);
        for (double& e : tk.mean_embedding)
            e = rng.uniform();
    }
    std::sort(tracklets.begin(), tracklets.end(),
              [](const auto& a, const auto& b) { return a.begin_frame < b.begin_frame; });
    for (int i = 0; i < n; ++i)
        tracklets[i].id = i;
    return tracklets;
}

inline std::vector<RefTracklet> to_ref(const std::vector<unovost::Tracklet>& tracklets) {
    std::vector<RefTracklet> ref(tracklets.size());
    for (std::size_t i = 0; i < tracklets.size(); ++i)
        ref[i] = {tracklets[i].begin_frame, tracklets[i].end_frame, tracklets[i].mean_embedding};
    return ref;
}

} // namespace fpcref
