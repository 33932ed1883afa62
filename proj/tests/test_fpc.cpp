#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "fpc_reference.hpp"
#include "unovost/fpc.hpp"
#include "unovost/synth.hpp"

using namespace unovost;

namespace {

Tracklet tk(int id, int b, int e, std::vector<double> embedding) {
    Tracklet t;
    t.id = id;
    t.begin_frame = b;
    t.end_frame = e;
    t.mean_embedding = std::move(embedding);
    return t;
}

} // namespace

TEST_CASE("visual similarity normalization") {
    auto v = visual_similarity({tk(0, 0, 0, {0.0}), tk(1, 1, 1, {1.0}), tk(2, 2, 2, {2.0})});
    CHECK(v[0][0] == 1.0);
    CHECK(v[0][1] == Catch::Approx(0.5));
    CHECK(v[0][2] == 0.0); // the pair attaining the maximum distance
    CHECK(v[1][2] == Catch::Approx(0.5));
    CHECK(v[0][1] == v[1][0]);

    // identical embeddings -> everything similar
    auto ones = visual_similarity({tk(0, 0, 0, {3.0, 4.0}), tk(1, 1, 1, {3.0, 4.0})});
    CHECK(ones[0][1] == 1.0);

    CHECK_THROWS_AS(visual_similarity({tk(0, 0, 0, {1.0}), tk(1, 1, 1, {1.0, 2.0})}), ContractError);
    CHECK_THROWS_AS(visual_similarity({}), ContractError);
}

TEST_CASE("scaling embeddings leaves similarity unchanged") {
    SplitMix64 rng(3);
    auto tracklets = fpcref::random_tracklets(rng, 8, 20);
    auto v1 = visual_similarity(tracklets);
    for (auto& t : tracklets)
        for (double& e : t.mean_embedding)
            e *= 7.5;
    auto v2 = visual_similarity(tracklets);
    for (std::size_t i = 0; i < v1.size(); ++i)
        for (std::size_t j = 0; j < v1.size(); ++j)
            CHECK(v1[i][j] == Catch::Approx(v2[i][j]).margin(1e-12));
}

TEST_CASE("build_forest base cases") {
    auto single = build_forest({tk(0, 0, 5, {1.0})}, visual_similarity({tk(0, 0, 5, {1.0})}));
    CHECK(single == PredecessorForest{-1});

    std::vector<Tracklet> two{tk(0, 0, 2, {0.0}), tk(1, 4, 6, {1.0})};
    auto forest = build_forest(two, visual_similarity(two));
    CHECK(forest == PredecessorForest{-1, 0});

    std::vector<Tracklet> unsorted{tk(0, 4, 6, {0.0}), tk(1, 0, 2, {1.0})};
    CHECK_THROWS_AS(build_forest(unsorted, visual_similarity(unsorted)), ContractError);
}

TEST_CASE("build_forest walks to the in-between tracklet") {
    // A(0..2), B(4..5), C(7..9); V(C,A)=0.9 > V(C,B)=0.1, but B sits between
    // and points at A, so C's predecessor becomes B.
    std::vector<Tracklet> ts{tk(0, 0, 2, {0.0}), tk(1, 4, 5, {1.0}), tk(2, 7, 9, {0.1})};
    auto v = visual_similarity(ts);
    REQUIRE(v[2][0] > v[2][1]);
    auto forest = build_forest(ts, v);
    CHECK(forest == PredecessorForest{-1, 0, 1});
}

TEST_CASE("enumerate_paths") {
    // chain 0 <- 1 <- 2
    auto chain = enumerate_paths({-1, 0, 1});
    REQUIRE(chain.size() == 1);
    CHECK(chain[0].members == std::vector<int>{0, 1, 2});

    // fork: 0 is the predecessor of both 1 and 2
    auto fork = enumerate_paths({-1, 0, 0});
    REQUIRE(fork.size() == 2);
    CHECK(fork[0].members == std::vector<int>{0, 1});
    CHECK(fork[1].members == std::vector<int>{0, 2});

    // two isolated tracklets
    auto isolated = enumerate_paths({-1, -1});
    REQUIRE(isolated.size() == 2);
    CHECK(isolated[0].members == std::vector<int>{0});
    CHECK(isolated[1].members == std::vector<int>{1});
}

TEST_CASE("score_path formula") {
    std::vector<Tracklet> ts{tk(0, 0, 4, {0.0})};
    SimilarityMatrix v{{1.0}};
    PathScore s = score_path({{0}}, ts, v, 10, 0.1, 0.9, DensityMode::Normalized);
    CHECK(s.visual == 1.0);
    CHECK(s.temporal == Catch::Approx(0.5));
    CHECK(s.combined == Catch::Approx(0.55));

    // full coverage, identical embeddings -> 1.0
    std::vector<Tracklet> full{tk(0, 0, 4, {1.0}), tk(1, 5, 9, {1.0})};
    auto vf = visual_similarity(full);
    PathScore sf = score_path({{0, 1}}, full, vf, 10, 0.1, 0.9, DensityMode::Normalized);
    CHECK(sf.combined == Catch::Approx(1.0));

    // V = 0 between the two members, full coverage -> 0.9
    std::vector<Tracklet> far{tk(0, 0, 4, {0.0}), tk(1, 5, 9, {1.0})};
    auto vd = visual_similarity(far);
    PathScore sd = score_path({{0, 1}}, far, vd, 10, 0.1, 0.9, DensityMode::Normalized);
    CHECK(sd.visual == 0.0);
    CHECK(sd.combined == Catch::Approx(0.9));

    // raw density mode keeps the frame count
    PathScore sraw = score_path({{0, 1}}, far, vd, 10, 0.1, 0.9, DensityMode::Raw);
    CHECK(sraw.temporal == 10.0);

    CHECK_THROWS_AS(score_path({{}}, ts, v, 10, 0.1, 0.9, DensityMode::Normalized), ContractError);
}

TEST_CASE("cut_paths hand traces") {
    // two non-conflicting singleton paths, the longer first
    std::vector<Tracklet> ts{tk(0, 0, 7, {0.0}), tk(1, 2, 3, {1.0})};
    SimilarityMatrix v = visual_similarity(ts);
    auto tracks = cut_paths({{{0}}, {{1}}}, ts, v, 10, 0.1, 0.9, DensityMode::Normalized);
    REQUIRE(tracks.size() == 2);
    CHECK(tracks[0].tracklet_ids == std::vector<int>{0});
    CHECK(tracks[1].tracklet_ids == std::vector<int>{1});

    // fork {A,B} vs {A,C}; {A,B} wins, C survives as a singleton
    std::vector<Tracklet> fork{tk(0, 0, 3, {0.0}), tk(1, 5, 9, {0.1}), tk(2, 5, 6, {0.9})};
    SimilarityMatrix vf = visual_similarity(fork);
    auto ftracks = cut_paths({{{0, 1}}, {{0, 2}}}, fork, vf, 10, 0.1, 0.9, DensityMode::Normalized);
    REQUIRE(ftracks.size() == 2);
    CHECK(ftracks[0].tracklet_ids == std::vector<int>{0, 1});
    CHECK(ftracks[1].tracklet_ids == std::vector<int>{2});

    // cutting the selected path may empty a competitor entirely
    std::vector<Tracklet> pair{tk(0, 0, 3, {0.0}), tk(1, 5, 9, {0.1})};
    SimilarityMatrix vp = visual_similarity(pair);
    auto ptracks = cut_paths({{{0, 1}}, {{0}}}, pair, vp, 10, 0.1, 0.9, DensityMode::Normalized);
    REQUIRE(ptracks.size() == 1);
    CHECK(ptracks[0].tracklet_ids == std::vector<int>{0, 1});
}

TEST_CASE("fpc properties on random instances") {
    SplitMix64 rng(404);
    for (int iter = 0; iter < 200; ++iter) {
        auto tracklets = fpcref::random_tracklets(rng, 12, 30);
        auto tracks = forest_path_cutting(tracklets, 30, 0.1, 0.9, DensityMode::Normalized);

        // partition: every tracklet in exactly one track
        std::set<int> seen;
        std::size_t total = 0;
        for (const Track& t : tracks) {
            for (int id : t.tracklet_ids)
                seen.insert(id);
            total += t.tracklet_ids.size();
        }
        CHECK(seen.size() == total);
        CHECK(total == tracklets.size());

        // members of one track are temporally disjoint
        for (const Track& t : tracks)
            for (std::size_t a = 0; a < t.tracklet_ids.size(); ++a)
                for (std::size_t b = a + 1; b < t.tracklet_ids.size(); ++b) {
                    const Tracklet& x = tracklets[t.tracklet_ids[a]];
                    const Tracklet& y = tracklets[t.tracklet_ids[b]];
                    CHECK((x.end_frame < y.begin_frame || y.end_frame < x.begin_frame));
                }
    }
}

TEST_CASE("fpc matches the naive transliteration") {
    SplitMix64 rng(777);
    for (int iter = 0; iter < 200; ++iter) {
        auto tracklets = fpcref::random_tracklets(rng, 12, 30);
        auto tracks = forest_path_cutting(tracklets, 30, 0.1, 0.9, DensityMode::Normalized);
        auto ref = fpcref::run(fpcref::to_ref(tracklets), 30, 0.1, 0.9, true);
        REQUIRE(tracks.size() == ref.size());
        for (std::size_t i = 0; i < tracks.size(); ++i) {
            std::set<int> got(tracks[i].tracklet_ids.begin(), tracks[i].tracklet_ids.end());
            CHECK(got == ref[i]);
        }
    }
}

TEST_CASE("selected scores are maximal at each iteration") {
    SplitMix64 rng(55);
    for (int iter = 0; iter < 50; ++iter) {
        auto tracklets = fpcref::random_tracklets(rng, 10, 25);
        SimilarityMatrix v = visual_similarity(tracklets);
        auto forest = build_forest(tracklets, v);
        auto paths = enumerate_paths(forest);
        std::vector<CutLogEntry> log;
        cut_paths(paths, tracklets, v, 25, 0.1, 0.9, DensityMode::Normalized, &log);
        // replay the cuts and verify each selection was an argmax
        std::vector<PathHypothesis> current = paths;
        for (const CutLogEntry& entry : log) {
            for (const PathHypothesis& p : current) {
                PathScore s = score_path(p, tracklets, v, 25, 0.1, 0.9, DensityMode::Normalized);
                CHECK(s.combined <= entry.score.combined + 1e-12);
            }
            std::vector<PathHypothesis> next;
            std::set<int> cut(entry.members.begin(), entry.members.end());
            for (const PathHypothesis& p : current) {
                if (p.members == entry.members)
                    continue;
                PathHypothesis q;
                for (int id : p.members)
                    if (!cut.count(id))
                        q.members.push_back(id);
                if (!q.members.empty())
                    next.push_back(q);
            }
            current = std::move(next);
        }
        CHECK(current.empty());
    }
}
