// Final track scoring by video saliency and top-K selection.
#pragma once

#include <algorithm>
#include <vector>

#include "unovost/error.hpp"
#include "unovost/fpc.hpp"
#include "unovost/tracklet.hpp"

namespace unovost {

struct ScoredTrack {
    Track track;
    double saliency = 0.0;
};

// Sum over member tracklets of temporal length times mean proposal
// confidence.
inline double saliency(const Track& track, const std::vector<Tracklet>& tracklets) {
    if (track.tracklet_ids.empty())
        throw ContractError("saliency: empty track");
    double total = 0.0;
    for (int id : track.tracklet_ids) {
        const Tracklet& tk = tracklets[id];
        double conf = 0.0;
        for (const Proposal& p : tk.proposals)
            conf += p.score;
        conf /= static_cast<double>(tk.proposals.size());
        total += static_cast<double>(tk.length()) * conf;
    }
    return total;
}

// Sort by descending saliency (ties: earlier start frame, then lower leading
// tracklet id) and keep at most max_tracks; 0 means unlimited.
inline std::vector<ScoredTrack> select_top(const std::vector<Track>& tracks,
                                           const std::vector<Tracklet>& tracklets, int max_tracks) {
    std::vector<ScoredTrack> scored;
    scored.reserve(tracks.size());
    for (const Track& t : tracks)
        scored.push_back({t, saliency(t, tracklets)});
    auto start_frame = [&](const ScoredTrack& st) {
        int b = tracklets[st.track.tracklet_ids.front()].begin_frame;
        for (int id : st.track.tracklet_ids)
            b = std::min(b, tracklets[id].begin_frame);
        return b;
    };
    std::stable_sort(scored.begin(), scored.end(), [&](const ScoredTrack& a, const ScoredTrack& b) {
        if (a.saliency != b.saliency)
            return a.saliency > b.saliency;
        int sa = start_frame(a), sb = start_frame(b);
        if (sa != sb)
            return sa < sb;
        return a.track.tracklet_ids.front() < b.track.tracklet_ids.front();
    });
    if (max_tracks > 0 && static_cast<int>(scored.size()) > max_tracks)
        scored.resize(static_cast<std::size_t>(max_tracks));
    return scored;
}

} // namespace unovost
