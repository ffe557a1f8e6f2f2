// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>

#include "p2p/common.hpp"
#include "p2p/networks.hpp"
#include "p2p/nn/ops.hpp"
#include "p2p/rng.hpp"

namespace p2p {

namespace {

std::vector<size_t> split_indices(const Dataset& ds, bool validation) {
    std::vector<size_t> idx;
    for (size_t i = 0; i < ds.frames.size(); ++i) {
        if ((ds.frames[i].validation != 0) == validation) idx.push_back(i);
    }
    return idx;
}

void shuffle_indices(std::vector<size_t>& idx, uint64_t seed, int epoch) {
    Pcg32 rng(derive_seed(seed, "shuffle", static_cast<uint64_t>(epoch)));
    for (size_t i = idx.size(); i > 1; --i) {
        size_t j = rng.next_below(static_cast<uint32_t>(i));
        std::swap(idx[i - 1], idx[j]);
    }
}

std::vector<Tensor> snapshot(const Model& m) {
    std::vector<Tensor> s;
    s.reserve(m.params.size());
    for (const nn::Parameter& p : m.params) s.push_back(p.value);
    return s;
}

void restore(Model& m, const std::vector<Tensor>& s) {
    for (size_t i = 0; i < s.size(); ++i) m.params[i].value = s[i];
}

template <typename StepFn, typename EvalFn>
TrainResult run_epochs(Model& model, const TrainConfig& cfg, std::vector<size_t> train_idx,
                       const StepFn& step_batches, const EvalFn& eval_val) {
    TrainResult result;
    nn::Adam::Config acfg;
    acfg.lr = cfg.lr;
    nn::Adam opt(acfg);
    std::vector<nn::Parameter*> params = model.param_ptrs();
    std::vector<Tensor> best;

    const float lr_final = cfg.lr * cfg.lr_decay;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        if (cfg.epochs > 1) {
            const double t = static_cast<double>(epoch) / (cfg.epochs - 1);
            opt.set_lr(lr_final +
                       0.5f * (cfg.lr - lr_final) * static_cast<float>(1.0 + std::cos(M_PI * t)));
        }
        shuffle_indices(train_idx, cfg.seed, epoch);
        double train_loss = step_batches(train_idx, opt, params);
        if (!std::isfinite(train_loss)) {
            throw NumericError("training loss is not finite at epoch " + std::to_string(epoch));
        }
        double val_loss = eval_val();
        result.log.push_back({epoch, train_loss, val_loss});
        if (result.best_epoch < 0 || val_loss < result.best_val_loss) {
            result.best_val_loss = val_loss;
            result.best_epoch = epoch;
            best = snapshot(model);
        }
    }
    if (!best.empty()) restore(model, best);
    return result;
}

}  // namespace

TrainResult train_depth(Pixels2Depth& model, const Dataset& ds, const TrainConfig& cfg) {
    cfg.validate();
    std::vector<size_t> train_idx = split_indices(ds, false);
    std::vector<size_t> val_idx = split_indices(ds, true);
    require(!train_idx.empty(), "train_depth: no training frames");
    require(!val_idx.empty(), "train_depth: no validation split present");

    // Pre-normalized inputs, kept flat.
    std::vector<std::vector<float>> inputs(ds.frames.size());
    for (size_t i = 0; i < ds.frames.size(); ++i) {
        inputs[i] = histogram_to_input(ds.frames[i].hist).vec();
    }

    auto fill_batch = [&](const std::vector<size_t>& idx, size_t from, size_t count, Tensor& x,
                          Tensor& t) {
        x = Tensor({static_cast<int64_t>(count), 1, 100, 4, 4});
        t = Tensor({static_cast<int64_t>(count), 1, 32, 32});
        for (size_t b = 0; b < count; ++b) {
            const size_t f = idx[from + b];
            std::copy(inputs[f].begin(), inputs[f].end(), x.data() + b * 1600);
            std::copy(ds.frames[f].depth32.data(), ds.frames[f].depth32.data() + 1024,
                      t.data() + b * 1024);
        }
    };

    auto step_batches = [&](const std::vector<size_t>& idx, nn::Adam& opt,
                            std::vector<nn::Parameter*>& params) {
        double loss_sum = 0.0;
        size_t seen = 0;
        for (size_t at = 0; at < idx.size(); at += static_cast<size_t>(cfg.batch_size)) {
            const size_t count = std::min(static_cast<size_t>(cfg.batch_size), idx.size() - at);
            Tensor x, t;
            fill_batch(idx, at, count, x, t);
            Pixels2Depth::Cache cache;
            Tensor y = model.forward(x, &cache);
            double loss = cfg.w_depth * nn::mse_loss(y, t);
            Tensor dy = nn::mse_backward(y, t);
            for (int64_t i = 0; i < dy.numel(); ++i) dy[i] *= cfg.w_depth;
            opt.zero_grad(params);
            model.backward(cache, dy);
            opt.step(params);
            loss_sum += loss * static_cast<double>(count);
            seen += count;
        }
        return loss_sum / static_cast<double>(seen);
    };

    auto eval_val = [&]() {
        double loss_sum = 0.0;
        size_t seen = 0;
        for (size_t at = 0; at < val_idx.size(); at += static_cast<size_t>(cfg.batch_size)) {
            const size_t count = std::min(static_cast<size_t>(cfg.batch_size), val_idx.size() - at);
            Tensor x, t;
            fill_batch(val_idx, at, count, x, t);
            Tensor y = model.forward(x);
            loss_sum += cfg.w_depth * nn::mse_loss(y, t) * static_cast<double>(count);
            seen += count;
        }
        return loss_sum / static_cast<double>(seen);
    };

    return run_epochs(model, cfg, std::move(train_idx), step_batches, eval_val);
}

TrainResult train_pose(Depth2Pose& model, const Dataset& ds, const TrainConfig& cfg,
                       const Pixels2Depth* depth_source) {
    cfg.validate();
    std::vector<size_t> train_idx = split_indices(ds, false);
    std::vector<size_t> val_idx = split_indices(ds, true);
    require(!train_idx.empty(), "train_pose: no training frames");
    require(!val_idx.empty(), "train_pose: no validation split present");
    require(!ds.frames.empty() && ds.frames[0].heatmaps.numel() == kNumJoints * 1024 &&
                ds.frames[0].pafs.numel() == kNumPafChannels * 1024,
            "train_pose: dataset labels do not match the pose head");

    const float depth_scale = 1.0f / static_cast<float>(ds.sensor.crop_range_m());

    // Depth inputs, normalized once; reconstructed rather than labeled when a
    // histogram network is supplied.
    std::vector<std::vector<float>> inputs(ds.frames.size());
#pragma omp parallel for schedule(dynamic, 8)
    for (size_t i = 0; i < ds.frames.size(); ++i) {
        const Frame& f = ds.frames[i];
        std::vector<float> in(1024);
        if (depth_source) {
            Tensor d = infer_depth(*depth_source, f.hist, ds.sensor);
            for (int64_t j = 0; j < 1024; ++j) in[static_cast<size_t>(j)] = d[j] * depth_scale;
        } else {
            for (int64_t j = 0; j < 1024; ++j)
                in[static_cast<size_t>(j)] = f.depth32[j] * depth_scale;
        }
        inputs[i] = std::move(in);
    }

    auto fill_batch = [&](const std::vector<size_t>& idx, size_t from, size_t count, Tensor& x,
                          Tensor& th, Tensor& tp) {
        x = Tensor({static_cast<int64_t>(count), 1, 32, 32});
        th = Tensor({static_cast<int64_t>(count), kNumJoints, 32, 32});
        tp = Tensor({static_cast<int64_t>(count), kNumPafChannels, 32, 32});
        for (size_t b = 0; b < count; ++b) {
            const Frame& f = ds.frames[idx[from + b]];
            std::copy(inputs[idx[from + b]].begin(), inputs[idx[from + b]].end(),
                      x.data() + static_cast<int64_t>(b) * 1024);
            std::copy(f.heatmaps.data(), f.heatmaps.data() + f.heatmaps.numel(),
                      th.data() + static_cast<int64_t>(b) * kNumJoints * 1024);
            std::copy(f.pafs.data(), f.pafs.data() + f.pafs.numel(),
                      tp.data() + static_cast<int64_t>(b) * kNumPafChannels * 1024);
        }
    };

    auto batch_loss = [&](const std::vector<PoseMaps>& heads, const Tensor& th, const Tensor& tp,
                          std::vector<PoseMaps>* d_heads) {
        double loss = 0.0;
        if (d_heads) d_heads->resize(heads.size());
        for (size_t s = 0; s < heads.size(); ++s) {
            loss += cfg.w_heatmap * nn::mse_loss(heads[s].heatmaps, th);
            loss += cfg.w_paf * nn::mse_loss(heads[s].pafs, tp);
            if (d_heads) {
                Tensor dh = nn::mse_backward(heads[s].heatmaps, th);
                for (int64_t i = 0; i < dh.numel(); ++i) dh[i] *= cfg.w_heatmap;
                Tensor dp = nn::mse_backward(heads[s].pafs, tp);
                for (int64_t i = 0; i < dp.numel(); ++i) dp[i] *= cfg.w_paf;
                (*d_heads)[s] = {std::move(dh), std::move(dp)};
            }
        }
        return loss;
    };

    auto step_batches = [&](const std::vector<size_t>& idx, nn::Adam& opt,
                            std::vector<nn::Parameter*>& params) {
        double loss_sum = 0.0;
        size_t seen = 0;
        for (size_t at = 0; at < idx.size(); at += static_cast<size_t>(cfg.batch_size)) {
            const size_t count = std::min(static_cast<size_t>(cfg.batch_size), idx.size() - at);
            Tensor x, th, tp;
            fill_batch(idx, at, count, x, th, tp);
            Depth2Pose::Cache cache;
            std::vector<PoseMaps> heads = model.forward(x, &cache);
            std::vector<PoseMaps> d_heads;
            double loss = batch_loss(heads, th, tp, &d_heads);
            opt.zero_grad(params);
            model.backward(cache, d_heads);
            opt.step(params);
            loss_sum += loss * static_cast<double>(count);
            seen += count;
        }
        return loss_sum / static_cast<double>(seen);
    };

    auto eval_val = [&]() {
        double loss_sum = 0.0;
        size_t seen = 0;
        for (size_t at = 0; at < val_idx.size(); at += static_cast<size_t>(cfg.batch_size)) {
            const size_t count = std::min(static_cast<size_t>(cfg.batch_size), val_idx.size() - at);
            Tensor x, th, tp;
            fill_batch(val_idx, at, count, x, th, tp);
            std::vector<PoseMaps> heads = model.forward(x);
            loss_sum += batch_loss(heads, th, tp, nullptr) * static_cast<double>(count);
            seen += count;
        }
        return loss_sum / static_cast<double>(seen);
    };

    return run_epochs(model, cfg, std::move(train_idx), step_batches, eval_val);
}

}  // namespace p2p
