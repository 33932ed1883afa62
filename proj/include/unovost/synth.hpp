// Deterministic synthetic-scenario generator: rectangle objects on linear
// trajectories with exact flow, noisy scored proposals, identity-clustered
// embeddings and ground-truth tracks. Also the purity metric used by the
// acceptance tests.
//
// All randomness comes from a splitmix64 stream seeded from the scenario, so
// generated files are byte-identical across runs and platforms.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "unovost/error.hpp"
#include "unovost/io.hpp"
#include "unovost/mask.hpp"
#include "unovost/proposal.hpp"

namespace unovost {

// splitmix64 (Steele, Lea, Flood 2014). Constants: increment
// 0x9e3779b97f4a7c15, mix multipliers 0xbf58476d1ce4e5b9 and
// 0x94d049bb133111eb.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }

    int uniform_int(int lo, int hi) { // inclusive bounds
        return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
    }

    // standard normal via Box-Muller
    double gaussian() {
        double u1 = (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

private:
    std::uint64_t state_;
};

struct Waypoint {
    int frame = 0;
    double x = 0.0; // column of the top-left corner
    double y = 0.0; // row of the top-left corner
};

struct ObjectSpec {
    int rect_width = 0;
    int rect_height = 0;
    std::vector<Waypoint> waypoints;               // sorted by frame
    std::vector<std::pair<int, int>> visible;      // inclusive frame intervals
};

struct NoiseSpec {
    double score_lo = 0.8;
    double score_hi = 1.0;
    double embedding_sigma = 0.0; // relative to the unit inter-identity distance
    double dropout_prob = 0.0;
    double clutter_rate = 0.0; // expected spurious proposals per frame
};

struct ScenarioSpec {
    std::uint64_t seed = 0;
    int frames = 0;
    int height = 0;
    int width = 0;
    std::vector<ObjectSpec> objects;
    NoiseSpec noise;
};

struct SynthOutput {
    VideoProposals proposals;
    std::vector<FlowField> flows; // frames-1 fields
    TrackFile ground_truth;
};

inline ScenarioSpec parse_scenario(const nlohmann::json& j) {
    ScenarioSpec spec;
    try {
        spec.seed = j.at("seed").get<std::uint64_t>();
        spec.frames = j.at("frames").get<int>();
        spec.height = j.at("height").get<int>();
        spec.width = j.at("width").get<int>();
        for (const auto& jo : j.value("objects", nlohmann::json::array())) {
            ObjectSpec obj;
            auto size = jo.at("size").get<std::vector<int>>();
            if (size.size() != 2)
                throw ConfigError("scenario: object size must be [width, height]");
            obj.rect_width = size[0];
            obj.rect_height = size[1];
            for (const auto& jw : jo.at("waypoints")) {
                auto wp = jw.get<std::vector<double>>();
                if (wp.size() != 3)
                    throw ConfigError("scenario: waypoint must be [frame, x, y]");
                obj.waypoints.push_back({static_cast<int>(wp[0]), wp[1], wp[2]});
            }
            if (jo.contains("visible")) {
                for (const auto& jv : jo.at("visible")) {
                    auto iv = jv.get<std::vector<int>>();
                    if (iv.size() != 2)
                        throw ConfigError("scenario: visible interval must be [first, last]");
                    obj.visible.emplace_back(iv[0], iv[1]);
                }
            } else {
                obj.visible.emplace_back(0, spec.frames - 1);
            }
            spec.objects.push_back(std::move(obj));
        }
        if (j.contains("noise")) {
            const auto& jn = j.at("noise");
            if (jn.contains("score_range")) {
                auto r = jn.at("score_range").get<std::vector<double>>();
                if (r.size() != 2)
                    throw ConfigError("scenario: score_range must be [lo, hi]");
                spec.noise.score_lo = r[0];
                spec.noise.score_hi = r[1];
            }
            spec.noise.embedding_sigma = jn.value("embedding_sigma", 0.0);
            spec.noise.dropout_prob = jn.value("dropout_prob", 0.0);
            spec.noise.clutter_rate = jn.value("clutter_rate", 0.0);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("scenario: ") + e.what());
    }
    return spec;
}

inline ScenarioSpec load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open scenario file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return parse_scenario(j);
}

namespace detail {

inline bool object_visible(const ObjectSpec& obj, int frame) {
    for (auto [s, e] : obj.visible)
        if (frame >= s && frame <= e)
            return true;
    return false;
}

// Piecewise-linear interpolation of the top-left corner, clamped to the
// first/last waypoint outside their frame range.
inline std::pair<double, double> object_position(const ObjectSpec& obj, int frame) {
    const auto& wp = obj.waypoints;
    if (frame <= wp.front().frame)
        return {wp.front().x, wp.front().y};
    if (frame >= wp.back().frame)
        return {wp.back().x, wp.back().y};
    for (std::size_t i = 1; i < wp.size(); ++i) {
        if (frame <= wp[i].frame) {
            double t = static_cast<double>(frame - wp[i - 1].frame) /
                       static_cast<double>(wp[i].frame - wp[i - 1].frame);
            return {wp[i - 1].x + t * (wp[i].x - wp[i - 1].x), wp[i - 1].y + t * (wp[i].y - wp[i - 1].y)};
        }
    }
    return {wp.back().x, wp.back().y};
}

inline std::pair<int, int> rounded_position(const ObjectSpec& obj, int frame) {
    auto [x, y] = object_position(obj, frame);
    return {static_cast<int>(std::lround(x)), static_cast<int>(std::lround(y))};
}

inline Mask rect_mask(int height, int width, int x, int y, int rw, int rh) {
    PixelGrid grid(static_cast<std::size_t>(height) * width, 0);
    for (int col = std::max(0, x); col < std::min(width, x + rw); ++col)
        for (int row = std::max(0, y); row < std::min(height, y + rh); ++row)
            grid[grid_index(height, row, col)] = 1;
    return encode(grid, height, width);
}

} // namespace detail

inline void validate_scenario(const ScenarioSpec& spec) {
    if (spec.frames <= 0 || spec.height <= 0 || spec.width <= 0)
        throw ConfigError("scenario: frames and grid dimensions must be positive");
    if (spec.noise.score_lo <= 0.0 || spec.noise.score_hi > 1.0 || spec.noise.score_lo > spec.noise.score_hi)
        throw ConfigError("scenario: score_range must satisfy 0 < lo <= hi <= 1");
    if (spec.noise.dropout_prob < 0.0 || spec.noise.dropout_prob >= 1.0)
        throw ConfigError("scenario: dropout_prob must lie in [0, 1)");
    if (spec.noise.clutter_rate < 0.0 || spec.noise.embedding_sigma < 0.0)
        throw ConfigError("scenario: noise rates must be non-negative");
    for (std::size_t o = 0; o < spec.objects.size(); ++o) {
        const ObjectSpec& obj = spec.objects[o];
        if (obj.rect_width <= 0 || obj.rect_height <= 0)
            throw ConfigError("scenario: object " + std::to_string(o) + " has empty rectangle");
        if (obj.waypoints.empty())
            throw ConfigError("scenario: object " + std::to_string(o) + " has no waypoints");
        for (std::size_t i = 1; i < obj.waypoints.size(); ++i)
            if (obj.waypoints[i].frame <= obj.waypoints[i - 1].frame)
                throw ConfigError("scenario: object " + std::to_string(o) + " waypoints not increasing");
        for (auto [s, e] : obj.visible)
            if (s < 0 || e >= spec.frames || s > e)
                throw ConfigError("scenario: object " + std::to_string(o) + " visible range out of bounds");
        for (int t = 0; t < spec.frames; ++t) {
            if (!detail::object_visible(obj, t))
                continue;
            auto [x, y] = detail::rounded_position(obj, t);
            if (x < 0 || y < 0 || x + obj.rect_width > spec.width || y + obj.rect_height > spec.height)
                throw ConfigError("scenario: object " + std::to_string(o) + " leaves the grid at frame " +
                                  std::to_string(t));
        }
    }
}

// Generates proposals, exact flow and ground truth for one scenario.
// Occlusion: the later object in the list is on top. Identity centroids are
// scaled one-hot vectors with pairwise distance exactly 1; clutter draws a
// fresh random centroid per proposal. Clutter scores are drawn from
// [0.12, 0.45] so real objects keep clipping priority under the default
// score range.
inline SynthOutput generate(const ScenarioSpec& spec) {
    validate_scenario(spec);
    SplitMix64 rng(spec.seed);
    const int num_objects = static_cast<int>(spec.objects.size());
    const std::size_t dim = static_cast<std::size_t>(std::max(8, num_objects));
    const double centroid_scale = 1.0 / std::sqrt(2.0); // one-hot pair distance becomes 1

    SynthOutput out;
    out.proposals.height = spec.height;
    out.proposals.width = spec.width;
    out.proposals.num_frames = spec.frames;
    out.proposals.frames.resize(static_cast<std::size_t>(spec.frames));
    out.ground_truth.height = spec.height;
    out.ground_truth.width = spec.width;
    out.ground_truth.num_frames = spec.frames;
    out.ground_truth.tracks.resize(static_cast<std::size_t>(num_objects));
    for (int o = 0; o < num_objects; ++o)
        out.ground_truth.tracks[o].track_id = o + 1;

    // Per-frame occluded ground-truth masks plus pixel ownership for flow.
    std::vector<std::vector<Mask>> gt_masks(static_cast<std::size_t>(spec.frames));
    for (int t = 0; t < spec.frames; ++t) {
        out.proposals.frames[t].frame = t;
        std::vector<int> owner(static_cast<std::size_t>(spec.height) * spec.width, -1);
        for (int o = num_objects - 1; o >= 0; --o) { // later objects occlude earlier ones
            const ObjectSpec& obj = spec.objects[o];
            if (!detail::object_visible(obj, t))
                continue;
            auto [x, y] = detail::rounded_position(obj, t);
            for (int col = x; col < x + obj.rect_width; ++col)
                for (int row = y; row < y + obj.rect_height; ++row) {
                    std::size_t p = grid_index(spec.height, row, col);
                    if (owner[p] < 0)
                        owner[p] = o;
                }
        }
        gt_masks[t].resize(static_cast<std::size_t>(num_objects));
        std::vector<PixelGrid> grids(static_cast<std::size_t>(num_objects),
                                     PixelGrid(owner.size(), 0));
        for (std::size_t p = 0; p < owner.size(); ++p)
            if (owner[p] >= 0)
                grids[static_cast<std::size_t>(owner[p])][p] = 1;
        for (int o = 0; o < num_objects; ++o) {
            gt_masks[t][o] = encode(grids[o], spec.height, spec.width);
            if (!is_empty(gt_masks[t][o]))
                out.ground_truth.tracks[o].segments.emplace(t, gt_masks[t][o]);
        }

        // Exact flow implied by each object's motion; background zero.
        if (t + 1 < spec.frames) {
            FlowField flow;
            flow.height = spec.height;
            flow.width = spec.width;
            flow.data.assign(2 * owner.size(), 0.0f);
            for (int o = 0; o < num_objects; ++o) {
                if (!detail::object_visible(spec.objects[o], t))
                    continue;
                auto [x0, y0] = detail::rounded_position(spec.objects[o], t);
                auto [x1, y1] = detail::rounded_position(spec.objects[o], t + 1);
                float dx = static_cast<float>(x1 - x0);
                float dy = static_cast<float>(y1 - y0);
                for (auto [lo, hi] : foreground_intervals(gt_masks[t][o]))
                    for (std::int64_t p = lo; p < hi; ++p) {
                        int col = static_cast<int>(p / spec.height);
                        int row = static_cast<int>(p % spec.height);
                        flow.data[2 * (static_cast<std::size_t>(row) * spec.width + col)] = dx;
                        flow.data[2 * (static_cast<std::size_t>(row) * spec.width + col) + 1] = dy;
                    }
            }
            out.flows.push_back(std::move(flow));
        }
    }

    // Proposals: object masks with noisy scores/embeddings plus clutter.
    int next_id = 0;
    for (int t = 0; t < spec.frames; ++t) {
        for (int o = 0; o < num_objects; ++o) {
            if (!detail::object_visible(spec.objects[o], t) || is_empty(gt_masks[t][o]))
                continue;
            double score = rng.uniform(spec.noise.score_lo, spec.noise.score_hi);
            bool dropped = spec.noise.dropout_prob > 0.0 && rng.uniform() < spec.noise.dropout_prob;
            std::vector<double> embedding(dim, 0.0);
            embedding[static_cast<std::size_t>(o)] = centroid_scale;
            if (spec.noise.embedding_sigma > 0.0)
                for (double& v : embedding)
                    v += spec.noise.embedding_sigma * rng.gaussian();
            if (dropped)
                continue;
            Proposal p;
            p.frame = t;
            p.source_id = next_id++;
            p.score = score;
            p.mask = gt_masks[t][o];
            p.embedding = std::move(embedding);
            out.proposals.frames[t].proposals.push_back(std::move(p));
        }
        int clutter = static_cast<int>(spec.noise.clutter_rate);
        double frac = spec.noise.clutter_rate - clutter;
        if (frac > 0.0 && rng.uniform() < frac)
            ++clutter;
        for (int c = 0; c < clutter; ++c) {
            int rw = rng.uniform_int(4, std::max(4, spec.width / 8));
            int rh = rng.uniform_int(4, std::max(4, spec.height / 8));
            rw = std::min(rw, spec.width);
            rh = std::min(rh, spec.height);
            int x = rng.uniform_int(0, spec.width - rw);
            int y = rng.uniform_int(0, spec.height - rh);
            Proposal p;
            p.frame = t;
            p.source_id = next_id++;
            p.score = rng.uniform(0.12, 0.45);
            p.mask = detail::rect_mask(spec.height, spec.width, x, y, rw, rh);
            std::vector<double> centroid(dim, 0.0);
            double norm = 0.0;
            for (double& v : centroid) {
                v = rng.gaussian();
                norm += v * v;
            }
            norm = std::sqrt(norm);
            for (double& v : centroid)
                v = v / norm * centroid_scale;
            if (spec.noise.embedding_sigma > 0.0)
                for (double& v : centroid)
                    v += spec.noise.embedding_sigma * rng.gaussian();
            p.embedding = std::move(centroid);
            out.proposals.frames[t].proposals.push_back(std::move(p));
        }
    }

    // Ground-truth saliency: visible frame count (confidence 1 by definition).
    for (int o = 0; o < num_objects; ++o)
        out.ground_truth.tracks[o].saliency = static_cast<double>(out.ground_truth.tracks[o].segments.size());
    return out;
}

inline nlohmann::json proposals_to_json(const VideoProposals& video) {
    nlohmann::json j;
    j["height"] = video.height;
    j["width"] = video.width;
    j["num_frames"] = video.num_frames;
    j["frames"] = nlohmann::json::array();
    for (const FrameProposalSet& fs : video.frames) {
        if (fs.proposals.empty())
            continue;
        nlohmann::json jf;
        jf["frame"] = fs.frame;
        jf["proposals"] = nlohmann::json::array();
        for (const Proposal& p : fs.proposals) {
            nlohmann::json jp;
            jp["id"] = p.source_id;
            jp["score"] = p.score;
            jp["rle"] = p.mask.runs;
            if (!p.embedding.empty())
                jp["embedding"] = p.embedding;
            jf["proposals"].push_back(std::move(jp));
        }
        j["frames"].push_back(std::move(jf));
    }
    return j;
}

// Writes proposals.json, flow/NNNNNN.flo and ground_truth.json under out_dir.
inline void write_synth_output(const SynthOutput& out, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    std::filesystem::create_directories(out_dir + "/flow");
    write_json_atomic(proposals_to_json(out.proposals), out_dir + "/proposals.json");
    for (std::size_t t = 0; t < out.flows.size(); ++t)
        write_flo(out.flows[t], flow_path(out_dir + "/flow", static_cast<int>(t)));
    write_json_atomic(track_file_to_json(out.ground_truth), out_dir + "/ground_truth.json");
}

// ---------------------------------------------------------------------------
// Purity: each predicted track is assigned the ground-truth identity with
// which it shares the most frame overlaps (per-frame IoU >= 0.5 is a hit);
// an object's purity is its best assigned track's hit count over its visible
// frames.

struct PurityReport {
    std::vector<double> per_object;
    double mean = 0.0;
};

inline PurityReport purity(const TrackFile& predictions, const TrackFile& ground_truth) {
    PurityReport report;
    const std::size_t num_gt = ground_truth.tracks.size();
    report.per_object.assign(num_gt, 0.0);
    if (num_gt == 0)
        return report;
    std::vector<std::vector<int>> hits(predictions.tracks.size(), std::vector<int>(num_gt, 0));
    for (std::size_t p = 0; p < predictions.tracks.size(); ++p) {
        for (std::size_t g = 0; g < num_gt; ++g) {
            for (const auto& [frame, gt_mask] : ground_truth.tracks[g].segments) {
                auto it = predictions.tracks[p].segments.find(frame);
                if (it == predictions.tracks[p].segments.end())
                    continue;
                if (iou(it->second, gt_mask) >= 0.5)
                    ++hits[p][g];
            }
        }
    }
    std::vector<int> best_hits(num_gt, 0);
    for (std::size_t p = 0; p < predictions.tracks.size(); ++p) {
        std::size_t assigned = 0;
        for (std::size_t g = 1; g < num_gt; ++g)
            if (hits[p][g] > hits[p][assigned])
                assigned = g;
        best_hits[assigned] = std::max(best_hits[assigned], hits[p][assigned]);
    }
    double sum = 0.0;
    for (std::size_t g = 0; g < num_gt; ++g) {
        std::size_t visible = ground_truth.tracks[g].segments.size();
        report.per_object[g] = visible == 0 ? 0.0 : static_cast<double>(best_hits[g]) / static_cast<double>(visible);
        sum += report.per_object[g];
    }
    report.mean = sum / static_cast<double>(num_gt);
    return report;
}

} // namespace unovost
