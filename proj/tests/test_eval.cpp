#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "unovost/eval.hpp"
#include "unovost/synth.hpp"

using namespace unovost;
using testutil::rect;

namespace {

TrackFile empty_file(int h, int w, int frames) {
    TrackFile tf;
    tf.height = h;
    tf.width = w;
    tf.num_frames = frames;
    return tf;
}

TrackRecord record(int id, const std::map<int, Mask>& segments) {
    TrackRecord tr;
    tr.track_id = id;
    tr.segments = segments;
    return tr;
}

} // namespace

TEST_CASE("identical prediction and ground truth score 1.0") {
    ScenarioSpec spec;
    spec.seed = 5;
    spec.frames = 12;
    spec.height = 20;
    spec.width = 30;
    for (int o = 0; o < 2; ++o) {
        ObjectSpec obj;
        obj.rect_width = 4;
        obj.rect_height = 4;
        obj.waypoints = {{0, 2.0 + 12.0 * o, 3.0}, {11, 8.0 + 12.0 * o, 12.0}};
        obj.visible = {{0, 11}};
        spec.objects.push_back(obj);
    }
    SynthOutput out = generate(spec);
    EvalReport report = mean_j(out.ground_truth, out.ground_truth);
    CHECK(report.mean_j == 1.0);
    CHECK(report.matched == 2);
    CHECK(report.unmatched_predictions == 0);
    for (const TrackJ& t : report.per_track)
        CHECK(t.j == 1.0);
}

TEST_CASE("five predictions, two ground-truth tracks: exactly two matches") {
    TrackFile gt = empty_file(10, 20, 4);
    TrackFile pred = gt;
    for (int o = 0; o < 2; ++o) {
        std::map<int, Mask> segs;
        for (int t = 0; t < 4; ++t)
            segs[t] = rect(10, 20, 10 * o + 1, 1, 3, 3);
        gt.tracks.push_back(record(o + 1, segs));
        pred.tracks.push_back(record(o + 1, segs));
    }
    // three clutter predictions that overlap nothing
    for (int c = 0; c < 3; ++c) {
        std::map<int, Mask> segs;
        segs[c % 4] = rect(10, 20, 6, 6 + c, 2, 1);
        pred.tracks.push_back(record(3 + c, segs));
    }
    EvalReport report = mean_j(pred, gt);
    CHECK(report.matched == 2);
    CHECK(report.unmatched_predictions == 3);
    CHECK(report.mean_j == 1.0);
}

TEST_CASE("the matcher recovers swapped identities") {
    TrackFile gt = empty_file(10, 20, 3);
    std::map<int, Mask> a, b;
    for (int t = 0; t < 3; ++t) {
        a[t] = rect(10, 20, 1, 1, 3, 3);
        b[t] = rect(10, 20, 12, 5, 3, 3);
    }
    gt.tracks = {record(1, a), record(2, b)};
    TrackFile pred = empty_file(10, 20, 3);
    pred.tracks = {record(1, b), record(2, a)}; // ids flipped
    EvalReport report = mean_j(pred, gt);
    CHECK(report.mean_j == 1.0);
    CHECK(report.per_track[0].matched_pred_id == 2);
    CHECK(report.per_track[1].matched_pred_id == 1);
}

TEST_CASE("half-covered track scores 0.5") {
    TrackFile gt = empty_file(10, 20, 6);
    std::map<int, Mask> full, half;
    for (int t = 0; t < 6; ++t) {
        full[t] = rect(10, 20, 2, 2, 4, 4);
        if (t < 3)
            half[t] = full[t];
    }
    gt.tracks = {record(1, full)};
    TrackFile pred = empty_file(10, 20, 6);
    pred.tracks = {record(1, half)};
    EvalReport report = mean_j(pred, gt);
    CHECK(report.mean_j == Catch::Approx(0.5));

    // an unmatched ground-truth track contributes 0
    TrackFile none = empty_file(10, 20, 6);
    CHECK(mean_j(none, gt).mean_j == 0.0);
}

TEST_CASE("extra predictions never lower the score") {
    TrackFile gt = empty_file(12, 16, 5);
    std::map<int, Mask> segs;
    for (int t = 0; t < 5; ++t)
        segs[t] = rect(12, 16, 1 + t, 2, 3, 3);
    gt.tracks = {record(1, segs)};

    TrackFile pred = empty_file(12, 16, 5);
    pred.tracks = {record(1, segs)};
    double base = mean_j(pred, gt).mean_j;

    for (int c = 0; c < 5; ++c) {
        std::map<int, Mask> clutter;
        clutter[c] = rect(12, 16, 10, 8, 2, 2);
        pred.tracks.push_back(record(2 + c, clutter));
    }
    CHECK(mean_j(pred, gt).mean_j == base);
}

TEST_CASE("track order does not change the report totals") {
    TrackFile gt = empty_file(10, 20, 4);
    TrackFile pred = empty_file(10, 20, 4);
    for (int o = 0; o < 3; ++o) {
        std::map<int, Mask> segs;
        for (int t = 0; t < 4; ++t)
            segs[t] = rect(10, 20, 6 * o + 1, 1 + t, 3, 3);
        gt.tracks.push_back(record(o + 1, segs));
        // predictions shifted by one pixel so J is strictly between 0 and 1
        std::map<int, Mask> shifted;
        for (int t = 0; t < 4; ++t)
            shifted[t] = rect(10, 20, 6 * o + 2, 1 + t, 3, 3);
        pred.tracks.push_back(record(o + 1, shifted));
    }
    double base = mean_j(pred, gt).mean_j;
    std::reverse(pred.tracks.begin(), pred.tracks.end());
    CHECK(mean_j(pred, gt).mean_j == Catch::Approx(base).margin(1e-12));
}

TEST_CASE("grid mismatch is rejected") {
    TrackFile gt = empty_file(10, 20, 4);
    TrackFile pred = empty_file(10, 21, 4);
    CHECK_THROWS_AS(mean_j(pred, gt), InputError);
}
