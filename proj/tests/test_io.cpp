// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "p2p/config.hpp"
#include "p2p/io.hpp"
#include "p2p/pipeline.hpp"

using namespace p2p;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("p2p_io_test_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

std::vector<char> slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    return std::vector<char>((std::istreambuf_iterator<char>(f)),
                             std::istreambuf_iterator<char>());
}

void spit(const std::string& path, const std::vector<char>& bytes) {
    std::ofstream f(path, std::ios::binary);
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

Dataset small_dataset(uint64_t seed, int frames = 4, int persons = 1) {
    SceneConfig scfg;
    SensorConfig sensor;
    return generate_dataset(frames, persons, scfg, sensor, seed, 1);
}

}  // namespace

TEST_CASE("dataset files round trip byte-identically") {
    TempDir tmp;
    Dataset ds = small_dataset(42);
    const std::string p1 = tmp.file("a.p2pd"), p2 = tmp.file("b.p2pd");
    save_dataset(ds, p1);
    Dataset loaded = load_dataset(p1);
    save_dataset(loaded, p2);
    CHECK(slurp(p1) == slurp(p2));

    REQUIRE(loaded.frames.size() == ds.frames.size());
    CHECK(loaded.persons_per_frame == ds.persons_per_frame);
    CHECK(loaded.frames[0].validation == 1);
    CHECK(loaded.frames[3].validation == 0);
    CHECK(loaded.frames[2].hist.counts == ds.frames[2].hist.counts);
    for (int64_t i = 0; i < ds.frames[1].depth32.numel(); ++i) {
        CHECK(loaded.frames[1].depth32[i] == ds.frames[1].depth32[i]);
    }
}

TEST_CASE("dataset generation is deterministic and thread-count independent") {
    Dataset a = small_dataset(7);
    Dataset b = small_dataset(7);
    TempDir tmp;
    save_dataset(a, tmp.file("a.p2pd"));
    save_dataset(b, tmp.file("b.p2pd"));
    CHECK(slurp(tmp.file("a.p2pd")) == slurp(tmp.file("b.p2pd")));
}

TEST_CASE("corrupt dataset files raise distinct errors") {
    TempDir tmp;
    Dataset ds = small_dataset(1, 2);
    const std::string good = tmp.file("good.p2pd");
    save_dataset(ds, good);
    std::vector<char> bytes = slurp(good);

    SUBCASE("bad magic") {
        std::vector<char> bad = bytes;
        bad[0] = 'X';
        spit(tmp.file("bad.p2pd"), bad);
        CHECK_THROWS_WITH_AS(load_dataset(tmp.file("bad.p2pd")),
                             doctest::Contains("bad magic"), FormatError);
    }
    SUBCASE("wrong version") {
        std::vector<char> bad = bytes;
        bad[4] = 99;
        spit(tmp.file("ver.p2pd"), bad);
        CHECK_THROWS_WITH_AS(load_dataset(tmp.file("ver.p2pd")),
                             doctest::Contains("unsupported dataset version"), FormatError);
    }
    SUBCASE("truncation") {
        std::vector<char> bad(bytes.begin(), bytes.begin() + static_cast<long>(bytes.size() / 2));
        spit(tmp.file("cut.p2pd"), bad);
        CHECK_THROWS_WITH_AS(load_dataset(tmp.file("cut.p2pd")),
                             doctest::Contains("unexpected end of file"), FormatError);
    }
}

TEST_CASE("model files save, load and re-save identically") {
    TempDir tmp;
    Pixels2Depth net(5);
    const std::string p1 = tmp.file("m1.p2pw"), p2 = tmp.file("m2.p2pw");
    save_model(net, p1);
    Pixels2Depth other(99);  // different init, overwritten by load
    load_model(p1, other);
    save_model(other, p2);
    CHECK(slurp(p1) == slurp(p2));
    for (size_t i = 0; i < net.params.size(); ++i) {
        for (int64_t j = 0; j < net.params[i].value.numel(); ++j) {
            CHECK(net.params[i].value[j] == other.params[i].value[j]);
        }
    }
    CHECK(peek_model_dtype(p1) == ModelDtype::kFloat32);
    CHECK(peek_model_arch(p1) == "pixels2depth-v1");

    // Architecture mismatch is rejected.
    Depth2Pose wrong(1);
    CHECK_THROWS_WITH_AS(load_model(p1, wrong), doctest::Contains("architecture mismatch"),
                         FormatError);
}

TEST_CASE("corrupt model files raise distinct errors") {
    TempDir tmp;
    Pixels2Depth net(5);
    const std::string good = tmp.file("m.p2pw");
    save_model(net, good);
    std::vector<char> bytes = slurp(good);

    std::vector<char> bad = bytes;
    bad[1] = '?';
    spit(tmp.file("mag.p2pw"), bad);
    CHECK_THROWS_WITH_AS(load_model(tmp.file("mag.p2pw"), net), doctest::Contains("bad magic"),
                         FormatError);

    std::vector<char> cut(bytes.begin(), bytes.begin() + 64);
    spit(tmp.file("cut.p2pw"), cut);
    CHECK_THROWS_WITH_AS(load_model(tmp.file("cut.p2pw"), net),
                         doctest::Contains("unexpected end of file"), FormatError);

    std::vector<char> ver = bytes;
    ver[4] = 42;
    spit(tmp.file("ver.p2pw"), ver);
    CHECK_THROWS_WITH_AS(load_model(tmp.file("ver.p2pw"), net),
                         doctest::Contains("unsupported model version"), FormatError);
}

TEST_CASE("quantized models round trip exactly in the int8 domain") {
    TempDir tmp;
    Depth2Pose net(3);
    QuantizedModel q = quantize_weights(net);
    const std::string p1 = tmp.file("q1.p2pw"), p2 = tmp.file("q2.p2pw");
    save_model(q, p1);
    QuantizedModel loaded = load_quantized_model(p1);
    save_model(loaded, p2);
    CHECK(slurp(p1) == slurp(p2));
    CHECK(peek_model_dtype(p1) == ModelDtype::kInt8);

    // load_model_any dequantizes into a float model.
    Depth2Pose via_any(77);
    load_model_any(p1, via_any);
    for (size_t i = 0; i < q.tensors.size(); ++i) {
        const QuantizedTensor& t = q.tensors[i];
        for (int64_t j = 0; j < via_any.params[i].value.numel(); ++j) {
            const float expect =
                t.scale * static_cast<float>(static_cast<int32_t>(t.data[static_cast<size_t>(j)]) -
                                             t.zero_point);
            CHECK(via_any.params[i].value[j] == expect);
        }
    }
}

TEST_CASE("quantized file is at most 30% of the float file") {
    TempDir tmp;
    Pixels2Depth p2d(1);
    Depth2Pose d2p(2);
    save_model(p2d, tmp.file("p2d.p2pw"));
    save_model(d2p, tmp.file("d2p.p2pw"));
    save_model(quantize_weights(p2d), tmp.file("p2d.i8.p2pw"));
    save_model(quantize_weights(d2p), tmp.file("d2p.i8.p2pw"));
    const double float_bytes = static_cast<double>(fs::file_size(tmp.file("p2d.p2pw")) +
                                                   fs::file_size(tmp.file("d2p.p2pw")));
    const double int8_bytes = static_cast<double>(fs::file_size(tmp.file("p2d.i8.p2pw")) +
                                                  fs::file_size(tmp.file("d2p.i8.p2pw")));
    CHECK(int8_bytes / float_bytes <= 0.30);
}

TEST_CASE("pose records round trip through text") {
    TempDir tmp;
    std::vector<FramePoses> frames(2);
    frames[0].frame_id = 0;
    frames[1].frame_id = 1;
    Skeleton3D s;
    s.score = 0.875;
    for (int j = 0; j < kNumJoints; ++j) {
        s.joints[j].valid = j % 3 != 0;
        s.joints[j].xyz = Vec3{0.123456 + j, -0.654321, 1.234567};
    }
    frames[1].persons = {s};
    const std::string path = tmp.file("poses.txt");
    save_pose_records(frames, path);
    std::vector<FramePoses> loaded = load_pose_records(path);
    REQUIRE(loaded.size() == 2);
    CHECK(loaded[0].persons.empty());
    REQUIRE(loaded[1].persons.size() == 1);
    for (int j = 0; j < kNumJoints; ++j) {
        CHECK(loaded[1].persons[0].joints[j].valid == s.joints[j].valid);
        // 6 significant digits survive the round trip.
        CHECK(loaded[1].persons[0].joints[j].xyz.x ==
              doctest::Approx(s.joints[j].xyz.x).epsilon(1e-5));
    }

    // Re-saving the loaded records reproduces the bytes.
    const std::string path2 = tmp.file("poses2.txt");
    save_pose_records(loaded, path2);
    CHECK(slurp(path) == slurp(path2));
}

TEST_CASE("config round trips and rejects unknown keys") {
    PipelineConfig defaults;
    const std::string text = config_to_text(defaults);
    PipelineConfig parsed = parse_config_text(text);
    CHECK(parsed == defaults);
    CHECK(config_to_text(parsed) == text);

    CHECK_THROWS_WITH_AS(parse_config_text("[sensor]\nnot_a_key = 3\n"),
                         doctest::Contains("unknown key"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[sensor]\ngrid_x 4\n"), ConfigError);

    TempDir tmp;
    write_reference_config(tmp.file("ref.ini"));
    PipelineConfig ref = load_config(tmp.file("ref.ini"));
    CHECK(ref == defaults);
}

TEST_CASE("config overrides apply") {
    PipelineConfig cfg = parse_config_text(
        "[sensor]\nambient_rate = 0.25\n[train]\nepochs_pose = 3\n[decode]\nmin_joints = 5\n");
    CHECK(cfg.sensor.ambient_rate == doctest::Approx(0.25));
    CHECK(cfg.epochs_pose == 3);
    CHECK(cfg.decode.min_joints == 5);
}
