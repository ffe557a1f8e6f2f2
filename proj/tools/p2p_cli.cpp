// SPDX-License-Identifier: Apache-2.0
// Command-line pipeline: synth, train, infer, eval, quantize, bench.
// Exit codes: 0 success, 2 usage/config error, 3 data/format error,
// 4 numeric failure.

#include <omp.h>

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <filesystem>

#include "p2p/pipeline.hpp"

using namespace p2p;

namespace {

double now_s() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

void write_text(const std::string& path, const std::string& text) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw IoError("cannot open for writing: " + path);
    std::fwrite(text.data(), 1, text.size(), f);
    std::fclose(f);
}

struct GlobalArgs {
    std::string config_path;
    uint64_t seed = 1;
    int threads = 0;
    std::string out;
};

PipelineConfig load_or_default(const GlobalArgs& g) {
    if (g.config_path.empty()) return PipelineConfig{};
    return load_config(g.config_path);
}

void apply_threads(int threads) {
    if (threads > 0) omp_set_num_threads(threads);
}

int cmd_synth(const GlobalArgs& g, int frames, int persons, int val_frames) {
    PipelineConfig cfg = load_or_default(g);
    SeedPlan seeds{g.seed};
    const double t0 = now_s();
    Dataset ds = generate_dataset(frames, persons, cfg.scene, cfg.sensor, seeds.synth(),
                                  val_frames);
    const double dt = now_s() - t0;
    save_dataset(ds, g.out);
    std::printf("synth: %d frames (%d validation), %d person(s) -> %s\n", frames, val_frames,
                persons, g.out.c_str());
    std::printf("synth: generation rate %.1f frames/s\n", frames / dt);
    return 0;
}

int cmd_train(const GlobalArgs& g, const std::string& dataset_path, const std::string& which,
              const std::string& depth_model) {
    PipelineConfig cfg = load_or_default(g);
    SeedPlan seeds{g.seed};
    Dataset ds = load_dataset(dataset_path);
    TrainConfig tc = cfg.train;

    TrainResult result;
    if (which == "depth") {
        tc.epochs = cfg.epochs_depth;
        tc.seed = seeds.train_depth();
        Pixels2Depth net(seeds.init_depth());
        std::printf("%s", net.summary().c_str());
        result = train_depth(net, ds, tc);
        save_model(net, g.out);
    } else if (which == "pose") {
        tc.epochs = cfg.epochs_pose;
        tc.seed = seeds.train_pose();
        Depth2Pose net(seeds.init_pose());
        std::printf("%s", net.summary().c_str());
        if (!depth_model.empty()) {
            // Train against depth maps reconstructed by the histogram
            // network, the same inputs the pose stage sees at inference.
            Pixels2Depth source(seeds.init_depth());
            load_model_any(depth_model, source);
            result = train_pose(net, ds, tc, &source);
        } else {
            result = train_pose(net, ds, tc);
        }
        save_model(net, g.out);
    } else {
        throw ConfigError("train: --which must be depth or pose");
    }

    save_loss_log(result.log, g.out + ".loss.txt");
    for (const EpochLog& e : result.log) {
        std::printf("epoch %d train %.6g val %.6g\n", e.epoch, e.train_loss, e.val_loss);
    }
    std::printf("best epoch %d (val %.6g) -> %s\n", result.best_epoch, result.best_val_loss,
                g.out.c_str());
    if (result.log.size() > 1 && result.log.back().val_loss >= result.log.front().val_loss) {
        std::printf("warning: final validation loss is not below the initial one\n");
    }
    return 0;
}

int cmd_infer(const GlobalArgs& g, const std::string& depth_model, const std::string& pose_model,
              const std::string& dataset_path, const std::string& depth_out,
              bool validation_only) {
    PipelineConfig cfg = load_or_default(g);
    SeedPlan seeds{g.seed};
    Dataset ds = load_dataset(dataset_path);

    Pixels2Depth depth_net(seeds.init_depth());
    load_model_any(depth_model, depth_net);
    Depth2Pose pose_net(seeds.init_pose());
    load_model_any(pose_model, pose_net);

    InferenceResult result = run_inference(ds, depth_net, pose_net, cfg.decode, validation_only,
                                           !depth_out.empty());
    save_pose_records(result.poses, g.out);

    if (!depth_out.empty()) {
        std::FILE* f = std::fopen(depth_out.c_str(), "wb");
        if (!f) throw IoError("cannot open for writing: " + depth_out);
        const uint32_t n = static_cast<uint32_t>(result.depth_maps.size());
        std::fwrite("P2PZ", 1, 4, f);
        std::fwrite(&n, sizeof(n), 1, f);
        for (const Tensor& d : result.depth_maps) std::fwrite(d.data(), sizeof(float), 1024, f);
        std::fclose(f);
    }

    std::printf("infer: %zu frames -> %s\n", result.poses.size(), g.out.c_str());
    std::printf("infer: %.1f fps single-stream (medians: %.4fs + %.4fs + %.4fs)\n",
                result.times.fps(), result.times.median(result.times.depth_s),
                result.times.median(result.times.pose_s),
                result.times.median(result.times.post_s));
    return 0;
}

int cmd_eval(const GlobalArgs& g, const std::string& poses_path, const std::string& dataset_path,
             bool validation_only) {
    Dataset ds = load_dataset(dataset_path);
    std::vector<FramePoses> predicted = load_pose_records(poses_path);
    std::vector<FramePoses> truth = truth_poses(ds, validation_only);
    EvalReport report = build_report(predicted, truth);

    const std::string table = report.to_table();
    std::printf("%s", table.c_str());
    write_text(g.out, table);
    const std::string jsonl_path = g.out + ".jsonl";
    write_text(jsonl_path, report.to_jsonl());
    std::printf("eval: report -> %s, machine-readable twin -> %s\n", g.out.c_str(),
                jsonl_path.c_str());
    return 0;
}

int cmd_quantize(const GlobalArgs& g, const std::string& model_in) {
    if (peek_model_dtype(model_in) == ModelDtype::kInt8) {
        throw DomainError("quantize: input is already an int8 model");
    }
    SeedPlan seeds{g.seed};
    QuantizedModel q;
    uintmax_t before = std::filesystem::file_size(model_in);
    const std::string arch = peek_model_arch(model_in);
    if (arch == "pixels2depth-v1") {
        Pixels2Depth net(seeds.init_depth());
        load_model(model_in, net);
        q = quantize_weights(net);
    } else if (arch == "depth2pose-v1") {
        Depth2Pose net(seeds.init_pose());
        load_model(model_in, net);
        q = quantize_weights(net);
    } else {
        throw FormatError("quantize: unknown architecture " + arch);
    }
    save_model(q, g.out);
    uintmax_t after = std::filesystem::file_size(g.out);
    std::printf("quantize: %s (%ju bytes) -> %s (%ju bytes), ratio %.3f\n", model_in.c_str(),
                before, g.out.c_str(), after,
                static_cast<double>(after) / static_cast<double>(before));
    return 0;
}

int cmd_bench(const GlobalArgs& g, const std::string& depth_model, const std::string& pose_model,
              const std::string& dataset_path, int min_frames, int repeats) {
    PipelineConfig cfg = load_or_default(g);
    SeedPlan seeds{g.seed};
    Dataset ds = load_dataset(dataset_path);
    require(static_cast<int>(ds.frames.size()) >= 1, "bench: empty dataset");

    Pixels2Depth depth_net(seeds.init_depth());
    load_model_any(depth_model, depth_net);
    Depth2Pose pose_net(seeds.init_pose());
    load_model_any(pose_model, pose_net);

    // Repeat the dataset until at least min_frames are timed.
    Dataset looped = ds;
    while (static_cast<int>(looped.frames.size()) < min_frames) {
        looped.frames.insert(looped.frames.end(), ds.frames.begin(), ds.frames.end());
    }

    auto run_mode = [&](int threads, const char* label) {
        apply_threads(threads);
        std::vector<double> fps_runs;
        StageTimes last;
        for (int r = 0; r < repeats; ++r) {
            InferenceResult res =
                run_inference(looped, depth_net, pose_net, cfg.decode, false, false);
            fps_runs.push_back(res.times.fps());
            last = res.times;
        }
        double fmin = fps_runs[0], fmax = fps_runs[0];
        for (double v : fps_runs) {
            fmin = std::min(fmin, v);
            fmax = std::max(fmax, v);
        }
        std::printf("[%s] per frame: %.4fs depth, %.4fs pose, %.4fs post-processing\n", label,
                    last.median(last.depth_s), last.median(last.pose_s),
                    last.median(last.post_s));
        std::printf("[%s] p95: %.4fs / %.4fs / %.4fs; total fps %.2f (spread %.2f..%.2f over %d runs)\n",
                    label, last.p95(last.depth_s), last.p95(last.pose_s), last.p95(last.post_s),
                    last.fps(), fmin, fmax, repeats);
        return last.fps();
    };

    run_mode(1, "serial");
    const int hw = g.threads > 0 ? g.threads : omp_get_num_procs();
    run_mode(hw, "parallel");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Low-resolution ToF histogram to multi-person 3D pose pipeline"};
    app.require_subcommand(0, 1);

    GlobalArgs g;
    std::string write_config_path;
    app.add_option("--config", g.config_path, "configuration file");
    app.add_option("--seed", g.seed, "master seed (fans out to every stage)");
    app.add_option("--threads", g.threads, "worker cap; 1 = serial reference mode");
    app.add_option("--write-config", write_config_path,
                   "write the reference configuration file and exit");

    auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
    int frames = 100, persons = 1, val_frames = 0;
    synth->add_option("--frames", frames, "number of frames")->required();
    synth->add_option("--persons", persons, "persons per frame (1..3)");
    synth->add_option("--val-frames", val_frames, "leading frames flagged as validation");
    synth->add_option("--out", g.out, "output dataset path")->required();

    auto* train = app.add_subcommand("train", "train one of the two networks");
    std::string dataset_path, which, train_depth_model;
    train->add_option("--dataset", dataset_path, "training dataset")->required();
    train->add_option("--which", which, "depth | pose")->required();
    train->add_option("--out", g.out, "output model path")->required();
    train->add_option("--depth-model", train_depth_model,
                      "pose training: feed depth maps reconstructed by this model");

    auto* infer = app.add_subcommand("infer", "run the full pipeline over a dataset");
    std::string depth_model, pose_model, depth_out;
    bool validation_only = false;
    infer->add_option("--depth-model", depth_model)->required();
    infer->add_option("--pose-model", pose_model)->required();
    infer->add_option("--dataset", dataset_path)->required();
    infer->add_option("--out", g.out, "pose records output")->required();
    infer->add_option("--save-depth", depth_out, "also write predicted depth maps");
    infer->add_flag("--validation-only", validation_only, "restrict to the validation split");

    auto* eval = app.add_subcommand("eval", "evaluate pose records against a dataset");
    std::string poses_path;
    eval->add_option("--poses", poses_path)->required();
    eval->add_option("--dataset", dataset_path)->required();
    eval->add_option("--out", g.out, "report path")->required();
    eval->add_flag("--validation-only", validation_only,
                   "poses were produced with --validation-only");

    auto* quant = app.add_subcommand("quantize", "post-training int8 weight quantization");
    std::string model_in;
    quant->add_option("--model", model_in)->required();
    quant->add_option("--out", g.out, "quantized model path")->required();

    auto* bench = app.add_subcommand("bench", "per-stage timing breakdown");
    int bench_frames = 100, repeats = 3;
    bench->add_option("--depth-model", depth_model)->required();
    bench->add_option("--pose-model", pose_model)->required();
    bench->add_option("--dataset", dataset_path)->required();
    bench->add_option("--min-frames", bench_frames, "minimum frames per timing run");
    bench->add_option("--repeats", repeats, "timing repetitions");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // --help and --version exit cleanly
    }

    try {
        apply_threads(g.threads);
        if (!write_config_path.empty()) {
            write_reference_config(write_config_path);
            std::printf("wrote reference config to %s\n", write_config_path.c_str());
            return 0;
        }
        if (synth->parsed()) return cmd_synth(g, frames, persons, val_frames);
        if (train->parsed()) return cmd_train(g, dataset_path, which, train_depth_model);
        if (infer->parsed())
            return cmd_infer(g, depth_model, pose_model, dataset_path, depth_out, validation_only);
        if (eval->parsed()) return cmd_eval(g, poses_path, dataset_path, validation_only);
        if (quant->parsed()) return cmd_quantize(g, model_in);
        if (bench->parsed())
            return cmd_bench(g, depth_model, pose_model, dataset_path, bench_frames, repeats);
        std::fprintf(stderr, "%s", app.help().c_str());
        return 2;
    } catch (const NumericError& e) {
        std::fprintf(stderr, "numeric error: %s\n", e.what());
        return 4;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 2;
    } catch (const CLI::Error& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 2;
    } catch (const IoError& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return 3;
    } catch (const ShapeError& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return 3;
    } catch (const DomainError& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
