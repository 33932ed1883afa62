// Run-length-encoded binary masks, dense flow fields and the geometric
// primitives used throughout the tracker: IoU, area, forward warping and
// score-ordered clipping.
//
// RLE convention: COCO-style uncompressed runs in column-major pixel order,
// alternating background/foreground counts, first run is background. The
// canonical form has no zero-length run except possibly a single leading one.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "unovost/error.hpp"

namespace unovost {

struct Mask {
    int height = 0;
    int width = 0;
    std::vector<std::int64_t> runs; // alternating bg/fg counts, bg first

    std::int64_t pixel_count() const {
        return static_cast<std::int64_t>(height) * width;
    }

    // Throws FormatError unless the run list is well formed for this grid.
    void validate() const {
        if (height <= 0 || width <= 0)
            throw FormatError("mask dimensions must be positive");
        std::int64_t sum = 0;
        for (std::size_t i = 0; i < runs.size(); ++i) {
            if (runs[i] < 0)
                throw FormatError("negative run length in mask RLE");
            if (runs[i] == 0 && i > 0 && runs[i - 1] == 0)
                throw FormatError("consecutive zero-length runs in mask RLE");
            sum += runs[i];
        }
        if (sum != pixel_count())
            throw FormatError("mask RLE run sum does not match grid size");
    }
};

// Dense per-pixel (dx, dy) displacement, frame t -> t+1. Row-major storage,
// two floats per pixel.
struct FlowField {
    int height = 0;
    int width = 0;
    std::vector<float> data; // 2 * height * width floats

    float dx(int row, int col) const { return data[2 * (static_cast<std::size_t>(row) * width + col)]; }
    float dy(int row, int col) const { return data[2 * (static_cast<std::size_t>(row) * width + col) + 1]; }
};

using PixelGrid = std::vector<std::uint8_t>; // column-major, height*width entries

// Column-major flat index.
inline std::size_t grid_index(int height, int row, int col) {
    return static_cast<std::size_t>(col) * height + row;
}

inline PixelGrid decode(const Mask& mask) {
    mask.validate();
    PixelGrid grid(static_cast<std::size_t>(mask.pixel_count()), 0);
    std::size_t pos = 0;
    bool foreground = false;
    for (std::int64_t run : mask.runs) {
        if (foreground)
            std::fill(grid.begin() + pos, grid.begin() + pos + run, std::uint8_t{1});
        pos += static_cast<std::size_t>(run);
        foreground = !foreground;
    }
    return grid;
}

inline Mask encode(const PixelGrid& grid, int height, int width) {
    if (static_cast<std::int64_t>(grid.size()) != static_cast<std::int64_t>(height) * width)
        throw ContractError("grid size does not match dimensions");
    Mask mask;
    mask.height = height;
    mask.width = width;
    bool current = false; // runs start with background
    std::int64_t count = 0;
    for (std::uint8_t px : grid) {
        bool fg = px != 0;
        if (fg == current) {
            ++count;
        } else {
            mask.runs.push_back(count);
            current = fg;
            count = 1;
        }
    }
    mask.runs.push_back(count);
    return mask;
}

inline std::int64_t area(const Mask& mask) {
    std::int64_t total = 0;
    for (std::size_t i = 1; i < mask.runs.size(); i += 2)
        total += mask.runs[i];
    return total;
}

inline bool is_empty(const Mask& mask) { return area(mask) == 0; }

// Foreground runs as half-open [start, end) intervals of the flat
// column-major index.
inline std::vector<std::pair<std::int64_t, std::int64_t>> foreground_intervals(const Mask& mask) {
    std::vector<std::pair<std::int64_t, std::int64_t>> spans;
    std::int64_t pos = 0;
    bool foreground = false;
    for (std::int64_t run : mask.runs) {
        if (foreground && run > 0)
            spans.emplace_back(pos, pos + run);
        pos += run;
        foreground = !foreground;
    }
    return spans;
}

// Intersection area computed directly on the run lists.
inline std::int64_t intersection_area(const Mask& a, const Mask& b) {
    auto sa = foreground_intervals(a);
    auto sb = foreground_intervals(b);
    std::int64_t inter = 0;
    std::size_t i = 0, j = 0;
    while (i < sa.size() && j < sb.size()) {
        std::int64_t lo = std::max(sa[i].first, sb[j].first);
        std::int64_t hi = std::min(sa[i].second, sb[j].second);
        if (lo < hi)
            inter += hi - lo;
        if (sa[i].second < sb[j].second)
            ++i;
        else
            ++j;
    }
    return inter;
}

// IoU of two equally sized masks. Both empty -> 0.
inline double iou(const Mask& a, const Mask& b) {
    if (a.height != b.height || a.width != b.width)
        throw ContractError("iou: mask dimensions differ");
    std::int64_t inter = intersection_area(a, b);
    std::int64_t uni = area(a) + area(b) - inter;
    if (uni == 0)
        return 0.0;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

// Mask from sorted, de-duplicated flat column-major foreground indices.
inline Mask mask_from_sorted_indices(int height, int width, const std::vector<std::int64_t>& indices) {
    Mask mask;
    mask.height = height;
    mask.width = width;
    std::int64_t pos = 0;
    std::size_t i = 0;
    while (i < indices.size()) {
        std::size_t j = i;
        while (j + 1 < indices.size() && indices[j + 1] == indices[j] + 1)
            ++j;
        mask.runs.push_back(indices[i] - pos);         // background gap
        mask.runs.push_back(indices[j] - indices[i] + 1); // foreground run
        pos = indices[j] + 1;
        i = j + 1;
    }
    if (mask.runs.empty() || pos < mask.pixel_count())
        mask.runs.push_back(mask.pixel_count() - pos);
    return mask;
}

// Forward splat: each foreground pixel (x, y) moves to
// (round(x + dx), round(y + dy)); out-of-grid destinations are dropped and
// collisions set the destination once.
inline Mask warp(const Mask& mask, const FlowField& flow) {
    if (mask.height != flow.height || mask.width != flow.width)
        throw ContractError("warp: flow dimensions differ from mask");
    mask.validate();
    std::vector<std::int64_t> dest;
    for (auto [lo, hi] : foreground_intervals(mask)) {
        for (std::int64_t p = lo; p < hi; ++p) {
            int col = static_cast<int>(p / mask.height);
            int row = static_cast<int>(p % mask.height);
            long nc = std::lround(col + flow.dx(row, col));
            long nr = std::lround(row + flow.dy(row, col));
            if (nr < 0 || nr >= mask.height || nc < 0 || nc >= mask.width)
                continue;
            dest.push_back(grid_index(mask.height, static_cast<int>(nr), static_cast<int>(nc)));
        }
    }
    std::sort(dest.begin(), dest.end());
    dest.erase(std::unique(dest.begin(), dest.end()), dest.end());
    return mask_from_sorted_indices(mask.height, mask.width, dest);
}

// Resolve overlaps by priority: each pixel is kept only by the first mask in
// the list that covers it. Outputs may be empty; callers decide whether to
// drop those.
inline std::vector<Mask> clip_stack(const std::vector<Mask>& masks) {
    if (masks.empty())
        return {};
    int height = masks.front().height;
    int width = masks.front().width;
    for (const Mask& m : masks)
        if (m.height != height || m.width != width)
            throw ContractError("clip_stack: mask dimensions differ");
    std::vector<int> owner(static_cast<std::size_t>(height) * width, -1);
    for (std::size_t k = 0; k < masks.size(); ++k) {
        for (auto [lo, hi] : foreground_intervals(masks[k]))
            for (std::int64_t p = lo; p < hi; ++p)
                if (owner[static_cast<std::size_t>(p)] < 0)
                    owner[static_cast<std::size_t>(p)] = static_cast<int>(k);
    }
    std::vector<Mask> out;
    out.reserve(masks.size());
    std::vector<PixelGrid> grids(masks.size(), PixelGrid(owner.size(), 0));
    for (std::size_t p = 0; p < owner.size(); ++p)
        if (owner[p] >= 0)
            grids[static_cast<std::size_t>(owner[p])][p] = 1;
    for (std::size_t k = 0; k < masks.size(); ++k)
        out.push_back(encode(grids[k], height, width));
    return out;
}

// ---------------------------------------------------------------------------
// Middlebury .flo files: float magic 202021.25, int32 width, int32 height,
// then row-major interleaved (dx, dy) float32 pairs. Little-endian.

inline constexpr float kFloMagic = 202021.25f;

inline FlowField read_flo(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError("cannot open flow file: " + path);
    float magic = 0.f;
    std::int32_t w = 0, h = 0;
    in.read(reinterpret_cast<char*>(&magic), sizeof magic);
    in.read(reinterpret_cast<char*>(&w), sizeof w);
    in.read(reinterpret_cast<char*>(&h), sizeof h);
    if (!in || magic != kFloMagic)
        throw FormatError("bad .flo magic in " + path);
    if (w <= 0 || h <= 0)
        throw FormatError("bad .flo dimensions in " + path);
    FlowField flow;
    flow.width = w;
    flow.height = h;
    flow.data.resize(2 * static_cast<std::size_t>(w) * h);
    in.read(reinterpret_cast<char*>(flow.data.data()),
            static_cast<std::streamsize>(flow.data.size() * sizeof(float)));
    if (!in)
        throw FormatError("truncated .flo file: " + path);
    for (float v : flow.data)
        if (!std::isfinite(v))
            throw FormatError("non-finite flow value in " + path);
    return flow;
}

inline void write_flo(const FlowField& flow, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw InputError("cannot write flow file: " + path);
    float magic = kFloMagic;
    std::int32_t w = flow.width, h = flow.height;
    out.write(reinterpret_cast<const char*>(&magic), sizeof magic);
    out.write(reinterpret_cast<const char*>(&w), sizeof w);
    out.write(reinterpret_cast<const char*>(&h), sizeof h);
    out.write(reinterpret_cast<const char*>(flow.data.data()),
              static_cast<std::streamsize>(flow.data.size() * sizeof(float)));
    if (!out)
        throw InputError("failed writing flow file: " + path);
}

} // namespace unovost
