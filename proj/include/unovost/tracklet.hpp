// Stage one of tracking: merge clipped proposals in contiguous frames into
// tracklets using spatio-temporal consistency under flow warping.
#pragma once

#include <algorithm>
#include <future>
#include <string>
#include <vector>

#include "unovost/assignment.hpp"
#include "unovost/error.hpp"
#include "unovost/mask.hpp"
#include "unovost/proposal.hpp"

namespace unovost {

enum class MatcherKind { Hungarian, Greedy };

struct Tracklet {
    int id = 0;
    int begin_frame = 0;
    int end_frame = 0;
    std::vector<Proposal> proposals; // one per frame, begin..end inclusive
    std::vector<double> mean_embedding;

    int length() const { return end_frame - begin_frame + 1; }
};

inline std::vector<double> mean_embedding_of(const std::vector<Proposal>& proposals) {
    std::vector<double> mean;
    for (const Proposal& p : proposals) {
        if (p.embedding.empty())
            return {};
        if (mean.empty())
            mean.assign(p.embedding.size(), 0.0);
        if (p.embedding.size() != mean.size())
            throw ContractError("embedding length mismatch within tracklet");
        for (std::size_t d = 0; d < mean.size(); ++d)
            mean[d] += p.embedding[d];
    }
    for (double& v : mean)
        v /= static_cast<double>(proposals.size());
    return mean;
}

// IoU between the flow-warped earlier mask and the later mask.
inline double consistency_score(const Proposal& p, const Proposal& q, const FlowField& flow) {
    if (p.frame + 1 != q.frame)
        throw ContractError("consistency_score: proposals are not in contiguous frames");
    return iou(warp(p.mask, flow), q.mask);
}

namespace detail {

// Consistency matrix for one contiguous frame pair; entries below edge_min
// are forbidden.
inline ScoreMatrix pair_matrix(const FrameProposalSet& a, const FrameProposalSet& b,
                               const FlowField& flow, double edge_min) {
    ScoreMatrix m(static_cast<int>(a.proposals.size()), static_cast<int>(b.proposals.size()));
    for (int r = 0; r < m.rows; ++r) {
        Mask warped = warp(a.proposals[r].mask, flow);
        for (int c = 0; c < m.cols; ++c) {
            double s = iou(warped, b.proposals[c].mask);
            if (s >= edge_min)
                m.set(r, c, s);
        }
    }
    return m;
}

} // namespace detail

// Frame-by-frame chaining: solve one bipartite matching per contiguous frame
// pair; matched pairs extend tracklets, unmatched proposals start new ones.
// Tracklet ids are assigned by (begin frame, first-proposal source id).
inline std::vector<Tracklet> build_tracklets(const std::vector<FrameProposalSet>& frames,
                                             const std::vector<FlowField>& flows, double edge_min,
                                             MatcherKind matcher, int threads = 1) {
    const int num_frames = static_cast<int>(frames.size());
    if (num_frames > 1 && static_cast<int>(flows.size()) < num_frames - 1)
        throw InputError("missing flow fields: need one per contiguous frame pair");

    // Score matrices are independent per frame pair; gather order is fixed so
    // results do not depend on the thread count.
    std::vector<ScoreMatrix> matrices(num_frames > 0 ? num_frames - 1 : 0);
    if (threads > 1 && matrices.size() > 1) {
        std::vector<std::future<void>> work;
        int stride = std::max(threads, 1);
        for (int w = 0; w < stride; ++w) {
            work.push_back(std::async(std::launch::async, [&, w] {
                for (std::size_t t = w; t < matrices.size(); t += stride)
                    matrices[t] = detail::pair_matrix(frames[t], frames[t + 1], flows[t], edge_min);
            }));
        }
        for (auto& f : work)
            f.get();
    } else {
        for (std::size_t t = 0; t < matrices.size(); ++t)
            matrices[t] = detail::pair_matrix(frames[t], frames[t + 1], flows[t], edge_min);
    }

    std::vector<std::vector<Proposal>> chains;
    std::vector<int> active; // chain index per proposal of the current frame
    if (num_frames > 0) {
        for (const Proposal& p : frames[0].proposals) {
            active.push_back(static_cast<int>(chains.size()));
            chains.push_back({p});
        }
    }
    for (int t = 0; t + 1 < num_frames; ++t) {
        const ScoreMatrix& m = matrices[t];
        Matching match = matcher == MatcherKind::Hungarian ? hungarian_max(m) : greedy_max(m);
        std::vector<int> next(frames[t + 1].proposals.size(), -1);
        for (auto [r, c] : match.pairs)
            next[c] = active[r];
        std::vector<int> next_active(frames[t + 1].proposals.size(), -1);
        for (std::size_t c = 0; c < next.size(); ++c) {
            const Proposal& p = frames[t + 1].proposals[c];
            if (next[c] >= 0) {
                chains[next[c]].push_back(p);
                next_active[c] = next[c];
            } else {
                next_active[c] = static_cast<int>(chains.size());
                chains.push_back({p});
            }
        }
        active.assign(next_active.begin(), next_active.end());
    }

    std::vector<Tracklet> tracklets;
    tracklets.reserve(chains.size());
    for (auto& chain : chains) {
        Tracklet tk;
        tk.begin_frame = chain.front().frame;
        tk.end_frame = chain.back().frame;
        tk.mean_embedding = mean_embedding_of(chain);
        tk.proposals = std::move(chain);
        tracklets.push_back(std::move(tk));
    }
    std::sort(tracklets.begin(), tracklets.end(), [](const Tracklet& a, const Tracklet& b) {
        if (a.begin_frame != b.begin_frame)
            return a.begin_frame < b.begin_frame;
        return a.proposals.front().source_id < b.proposals.front().source_id;
    });
    for (std::size_t i = 0; i < tracklets.size(); ++i)
        tracklets[i].id = static_cast<int>(i);
    return tracklets;
}

} // namespace unovost
