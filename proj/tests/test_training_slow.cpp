// SPDX-License-Identifier: Apache-2.0
// Training oracles that need real optimization time; kept in their own
// binary so the fast suite stays fast.
#include <doctest.h>

#include <cmath>

#include "p2p/dataset.hpp"
#include "p2p/decode.hpp"
#include "p2p/networks.hpp"

using namespace p2p;

namespace {

Dataset repeated_frame_dataset(int copies, int persons, uint64_t seed) {
    SceneConfig scfg;
    SensorConfig sensor;
    Frame f = generate_frame(scfg, sensor, persons, seed, 0, false);
    Dataset ds;
    ds.sensor = sensor;
    ds.persons_per_frame = persons;
    ds.frames.assign(static_cast<size_t>(copies), f);
    ds.frames.back().validation = 1;
    return ds;
}

Dataset varied_dataset(int frames, int persons, uint64_t seed, int val) {
    SceneConfig scfg;
    SensorConfig sensor;
    return generate_dataset(frames, persons, scfg, sensor, seed, val);
}

}  // namespace

TEST_CASE("depth training overfits one repeated frame below 1e-3") {
    Dataset ds = repeated_frame_dataset(9, 1, 100);
    Pixels2Depth net(1);
    TrainConfig cfg;
    cfg.epochs = 200;
    cfg.batch_size = 8;
    cfg.seed = 5;
    TrainResult result = train_depth(net, ds, cfg);
    double best_train = result.log.front().train_loss;
    for (const EpochLog& e : result.log) best_train = std::min(best_train, e.train_loss);
    CHECK(best_train < 1e-3);  // squared meters
    // And far below the initial loss (gradient sanity).
    CHECK(best_train < 1e-3 * result.log.front().train_loss + 1e-9);
}

TEST_CASE("pose training overfits 20 repeated frames to sharp heatmaps") {
    Dataset ds = varied_dataset(21, 1, 200, 1);
    // 20 training frames + 1 validation frame.
    Depth2Pose net(2);
    TrainConfig cfg;
    cfg.epochs = 120;
    cfg.batch_size = 8;
    cfg.seed = 6;
    TrainResult result = train_pose(net, ds, cfg);
    CHECK(result.log.back().train_loss < result.log.front().train_loss);

    // Heatmap argmax within 1 px of the label peak on the training frames.
    DecodeConfig dcfg;
    const float scale = 1.0f / static_cast<float>(ds.sensor.crop_range_m());
    int checked = 0, within = 0;
    for (size_t fi = 1; fi < ds.frames.size(); ++fi) {
        const Frame& f = ds.frames[fi];
        Tensor x({1, 1, 32, 32});
        for (int64_t i = 0; i < 1024; ++i) x[i] = f.depth32[i] * scale;
        PoseMaps maps;
        {
            std::vector<PoseMaps> heads = net.forward(x);
            maps = std::move(heads.back());
        }
        for (int j = 0; j < kNumJoints; ++j) {
            if (!f.persons[0].visible[j]) continue;
            const float* plane = maps.heatmaps.data() + static_cast<int64_t>(j) * 1024;
            int best = 0;
            for (int i = 1; i < 1024; ++i) {
                if (plane[i] > plane[best]) best = i;
            }
            const double bu = best % 32, bv = best / 32;
            ++checked;
            const double du = bu - f.persons[0].u[j], dv = bv - f.persons[0].v[j];
            if (std::sqrt(du * du + dv * dv) <= 1.0) ++within;
        }
    }
    // Overfit oracle: nearly every label peak is reproduced.
    CHECK(checked > 0);
    CHECK(within >= checked * 9 / 10);
}

TEST_CASE("training runs are bit-identical") {
    Dataset ds = varied_dataset(14, 1, 300, 3);
    auto run = [&]() {
        Pixels2Depth net(9);
        TrainConfig cfg;
        cfg.epochs = 4;
        cfg.batch_size = 4;
        cfg.seed = 17;
        return train_depth(net, ds, cfg);
    };
    TrainResult a = run();
    TrainResult b = run();
    REQUIRE(a.log.size() == b.log.size());
    for (size_t i = 0; i < a.log.size(); ++i) {
        CHECK(a.log[i].train_loss == b.log[i].train_loss);
        CHECK(a.log[i].val_loss == b.log[i].val_loss);
    }
}

TEST_CASE("checkpoint selection returns the best validation epoch") {
    Dataset ds = varied_dataset(30, 1, 400, 6);
    Pixels2Depth net(3);
    TrainConfig cfg;
    cfg.epochs = 6;
    cfg.batch_size = 8;
    cfg.seed = 21;
    TrainResult result = train_depth(net, ds, cfg);
    for (const EpochLog& e : result.log) {
        CHECK(result.best_val_loss <= e.val_loss + 1e-12);
    }
    CHECK(result.best_epoch >= 0);
    CHECK(result.best_epoch < cfg.epochs);
}
