// Configuration file parsing, the track JSON format and PGM rendering.
#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "unovost/error.hpp"
#include "unovost/finalize.hpp"
#include "unovost/mask.hpp"
#include "unovost/tracklet.hpp"

namespace unovost {

struct Config {
    double detection_score_min = 0.1;
    double nms_iou = 0.2;
    double edge_min = 0.05;
    MatcherKind matcher = MatcherKind::Hungarian;
    double w_visual = 0.1;
    double w_temporal = 0.9;
    DensityMode density_mode = DensityMode::Normalized;
    int max_tracks = 20; // 0 = unlimited
    int threads = 1;

    void validate() const {
        auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
        if (!in_unit(detection_score_min) || !in_unit(nms_iou) || !in_unit(edge_min))
            throw ConfigError("thresholds must lie in [0,1]");
        if (w_visual < 0.0 || w_temporal < 0.0 || w_visual + w_temporal <= 0.0)
            throw ConfigError("score weights must be non-negative with positive sum");
        if (max_tracks < 0)
            throw ConfigError("max_tracks must be >= 0");
        if (threads < 1)
            throw ConfigError("threads must be >= 1");
    }
};

// Flat "key = value" text file; '#' starts a comment; unknown keys are an
// error.
inline Config parse_config(std::istream& in) {
    Config cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t\r");
            auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        std::string stripped = trim(line);
        if (stripped.empty())
            continue;
        auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(stripped.substr(0, eq));
        std::string value = trim(stripped.substr(eq + 1));
        auto as_double = [&] {
            try {
                std::size_t pos = 0;
                double v = std::stod(value, &pos);
                if (pos != value.size())
                    throw std::invalid_argument(value);
                return v;
            } catch (const std::exception&) {
                throw ConfigError("config line " + std::to_string(lineno) + ": bad number '" + value + "'");
            }
        };
        auto as_int = [&] {
            try {
                std::size_t pos = 0;
                int v = std::stoi(value, &pos);
                if (pos != value.size())
                    throw std::invalid_argument(value);
                return v;
            } catch (const std::exception&) {
                throw ConfigError("config line " + std::to_string(lineno) + ": bad integer '" + value + "'");
            }
        };
        if (key == "detection_score_min")
            cfg.detection_score_min = as_double();
        else if (key == "nms_iou")
            cfg.nms_iou = as_double();
        else if (key == "edge_min")
            cfg.edge_min = as_double();
        else if (key == "matcher") {
            if (value == "hungarian")
                cfg.matcher = MatcherKind::Hungarian;
            else if (value == "greedy")
                cfg.matcher = MatcherKind::Greedy;
            else
                throw ConfigError("config line " + std::to_string(lineno) + ": matcher must be hungarian|greedy");
        } else if (key == "w_visual")
            cfg.w_visual = as_double();
        else if (key == "w_temporal")
            cfg.w_temporal = as_double();
        else if (key == "density_mode") {
            if (value == "normalized")
                cfg.density_mode = DensityMode::Normalized;
            else if (value == "raw")
                cfg.density_mode = DensityMode::Raw;
            else
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": density_mode must be normalized|raw");
        } else if (key == "max_tracks")
            cfg.max_tracks = as_int();
        else if (key == "threads")
            cfg.threads = as_int();
        else
            throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    cfg.validate();
    return cfg;
}

inline Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file: " + path);
    return parse_config(in);
}

// ---------------------------------------------------------------------------
// Track JSON: { "height", "width", "num_frames",
//   "tracks": [ { "track_id", "saliency", "segments": { "NNNNNN": [rle] } } ] }
// Frame keys are zero-padded to six digits so sorted JSON keys follow frame
// order. All JSON is written with sorted keys for diffable output.

inline std::string frame_key(int frame) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%06d", frame);
    return buf;
}

struct TrackRecord {
    int track_id = 0;
    double saliency = 0.0;
    std::map<int, Mask> segments; // frame -> mask
};

struct TrackFile {
    int height = 0;
    int width = 0;
    int num_frames = 0;
    std::vector<TrackRecord> tracks;
};

inline nlohmann::json track_file_to_json(const TrackFile& tf) {
    nlohmann::json j;
    j["height"] = tf.height;
    j["width"] = tf.width;
    j["num_frames"] = tf.num_frames;
    j["tracks"] = nlohmann::json::array();
    for (const TrackRecord& tr : tf.tracks) {
        nlohmann::json jt;
        jt["track_id"] = tr.track_id;
        jt["saliency"] = tr.saliency;
        jt["segments"] = nlohmann::json::object();
        for (const auto& [frame, mask] : tr.segments)
            jt["segments"][frame_key(frame)] = mask.runs;
        j["tracks"].push_back(std::move(jt));
    }
    return j;
}

inline TrackFile track_file_from_json(const nlohmann::json& j) {
    TrackFile tf;
    try {
        tf.height = j.at("height").get<int>();
        tf.width = j.at("width").get<int>();
        tf.num_frames = j.at("num_frames").get<int>();
        for (const auto& jt : j.at("tracks")) {
            TrackRecord tr;
            tr.track_id = jt.at("track_id").get<int>();
            tr.saliency = jt.at("saliency").get<double>();
            for (const auto& [key, runs] : jt.at("segments").items()) {
                int frame = std::stoi(key);
                if (frame < 0 || frame >= tf.num_frames)
                    throw FormatError("track file: frame key out of range: " + key);
                Mask m;
                m.height = tf.height;
                m.width = tf.width;
                m.runs = runs.get<std::vector<std::int64_t>>();
                m.validate();
                tr.segments.emplace(frame, std::move(m));
            }
            tf.tracks.push_back(std::move(tr));
        }
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("track file: ") + e.what());
    }
    return tf;
}

// Per-frame masks across tracks must be pixel-disjoint.
inline void validate_disjoint(const TrackFile& tf) {
    for (int t = 0; t < tf.num_frames; ++t) {
        PixelGrid occupancy(static_cast<std::size_t>(tf.height) * tf.width, 0);
        for (const TrackRecord& tr : tf.tracks) {
            auto it = tr.segments.find(t);
            if (it == tr.segments.end())
                continue;
            for (auto [lo, hi] : foreground_intervals(it->second))
                for (std::int64_t p = lo; p < hi; ++p) {
                    if (occupancy[static_cast<std::size_t>(p)])
                        throw FormatError("track file: overlapping masks at frame " + std::to_string(t));
                    occupancy[static_cast<std::size_t>(p)] = 1;
                }
        }
    }
}

inline void write_json_atomic(const nlohmann::json& j, const std::string& path) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out)
            throw InputError("cannot write file: " + path);
        out << j.dump(2) << '\n';
        if (!out)
            throw InputError("failed writing file: " + path);
    }
    std::filesystem::rename(tmp, path);
}

inline TrackFile load_track_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open track file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path + ": " + e.what());
    }
    TrackFile tf = track_file_from_json(j);
    validate_disjoint(tf);
    return tf;
}

// Assemble the output file from selected tracks; track ids run 1..K in
// selection order.
inline TrackFile make_track_file(const std::vector<ScoredTrack>& selected,
                                 const std::vector<Tracklet>& tracklets, int height, int width,
                                 int num_frames) {
    TrackFile tf;
    tf.height = height;
    tf.width = width;
    tf.num_frames = num_frames;
    for (std::size_t i = 0; i < selected.size(); ++i) {
        TrackRecord tr;
        tr.track_id = static_cast<int>(i) + 1;
        tr.saliency = selected[i].saliency;
        for (int id : selected[i].track.tracklet_ids)
            for (const Proposal& p : tracklets[id].proposals)
                tr.segments.emplace(p.frame, p.mask);
        tf.tracks.push_back(std::move(tr));
    }
    return tf;
}

// ---------------------------------------------------------------------------
// PGM rendering: one P5 file per frame, pixel value = track_id, 0 background.

inline void render_pgm(const TrackFile& tf, const std::string& out_dir) {
    for (const TrackRecord& tr : tf.tracks)
        if (tr.track_id < 0 || tr.track_id > 255)
            throw ConfigError("render: track_id " + std::to_string(tr.track_id) + " exceeds PGM range");
    std::filesystem::create_directories(out_dir);
    for (int t = 0; t < tf.num_frames; ++t) {
        std::vector<std::uint8_t> image(static_cast<std::size_t>(tf.height) * tf.width, 0);
        for (const TrackRecord& tr : tf.tracks) {
            auto it = tr.segments.find(t);
            if (it == tr.segments.end())
                continue;
            PixelGrid grid = decode(it->second);
            for (int col = 0; col < tf.width; ++col)
                for (int row = 0; row < tf.height; ++row)
                    if (grid[grid_index(tf.height, row, col)])
                        image[static_cast<std::size_t>(row) * tf.width + col] =
                            static_cast<std::uint8_t>(tr.track_id);
        }
        std::string path = out_dir + "/" + frame_key(t) + ".pgm";
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out)
            throw InputError("cannot write " + path);
        out << "P5\n" << tf.width << " " << tf.height << "\n255\n";
        out.write(reinterpret_cast<const char*>(image.data()), static_cast<std::streamsize>(image.size()));
        if (!out)
            throw InputError("failed writing " + path);
    }
}

// Flow directory convention: NNNNNN.flo maps frame NNNNNN to NNNNNN+1.
inline std::string flow_path(const std::string& dir, int frame) {
    return dir + "/" + frame_key(frame) + ".flo";
}

} // namespace unovost
