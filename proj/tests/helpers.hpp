// Shared helpers for the test suites.
#pragma once

#include <vector>

#include "unovost/mask.hpp"
#include "unovost/synth.hpp"

namespace testutil {

inline unovost::Mask random_mask(unovost::SplitMix64& rng, int height, int width, double density = 0.3) {
    unovost::PixelGrid grid(static_cast<std::size_t>(height) * width, 0);
    for (auto& px : grid)
        px = rng.uniform() < density ? 1 : 0;
    return unovost::encode(grid, height, width);
}

inline unovost::Mask mask_from_pixels(int height, int width,
                                      const std::vector<std::pair<int, int>>& row_col) {
    unovost::PixelGrid grid(static_cast<std::size_t>(height) * width, 0);
    for (auto [r, c] : row_col)
        grid[unovost::grid_index(height, r, c)] = 1;
    return unovost::encode(grid, height, width);
}

inline unovost::Mask rect(int height, int width, int x, int y, int rw, int rh) {
    std::vector<std::pair<int, int>> px;
    for (int r = y; r < y + rh; ++r)
        for (int c = x; c < x + rw; ++c)
            px.emplace_back(r, c);
    return mask_from_pixels(height, width, px);
}

// Reference IoU on decoded grids.
inline double grid_iou(const unovost::Mask& a, const unovost::Mask& b) {
    auto ga = unovost::decode(a);
    auto gb = unovost::decode(b);
    long inter = 0, uni = 0;
    for (std::size_t i = 0; i < ga.size(); ++i) {
        if (ga[i] && gb[i])
            ++inter;
        if (ga[i] || gb[i])
            ++uni;
    }
    return uni == 0 ? 0.0 : static_cast<double>(inter) / uni;
}

inline unovost::FlowField uniform_flow(int height, int width, float dx, float dy) {
    unovost::FlowField f;
    f.height = height;
    f.width = width;
    f.data.resize(2 * static_cast<std::size_t>(height) * width);
    for (std::size_t i = 0; i < f.data.size(); i += 2) {
        f.data[i] = dx;
        f.data[i + 1] = dy;
    }
    return f;
}

} // namespace testutil
