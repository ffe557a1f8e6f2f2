// SPDX-License-Identifier: Apache-2.0
#include "p2p/io.hpp"

#include "io_util.hpp"

namespace p2p {

namespace {

constexpr uint8_t kDtypeF32 = 0;
constexpr uint8_t kDtypeI8 = 1;

void write_header(std::FILE* f, const std::string& arch_id, uint8_t dtype, uint32_t n_tensors,
                  const std::string& path) {
    io::write_raw(f, "P2PW", 4, path);
    io::write_pod<uint32_t>(f, kModelVersion, path);
    io::write_string(f, arch_id, path);
    io::write_pod<uint8_t>(f, dtype, path);
    io::write_pod<uint32_t>(f, n_tensors, path);
}

struct Header {
    std::string arch_id;
    uint8_t dtype = 0;
    uint32_t n_tensors = 0;
};

Header read_header(std::FILE* f, const std::string& path) {
    io::check_magic(f, "P2PW", path);
    const uint32_t version = io::read_pod<uint32_t>(f, path);
    if (version != kModelVersion) {
        throw FormatError("unsupported model version " + std::to_string(version) + ": " + path);
    }
    Header h;
    h.arch_id = io::read_string(f, path);
    h.dtype = io::read_pod<uint8_t>(f, path);
    if (h.dtype != kDtypeF32 && h.dtype != kDtypeI8) {
        throw FormatError("unknown tensor dtype tag: " + path);
    }
    h.n_tensors = io::read_pod<uint32_t>(f, path);
    return h;
}

void write_shape(std::FILE* f, const std::vector<int64_t>& shape, const std::string& path) {
    io::write_pod<uint32_t>(f, static_cast<uint32_t>(shape.size()), path);
    for (int64_t d : shape) io::write_pod<int64_t>(f, d, path);
}

std::vector<int64_t> read_shape(std::FILE* f, const std::string& path) {
    const uint32_t ndim = io::read_pod<uint32_t>(f, path);
    if (ndim > 8) throw FormatError("implausible tensor rank: " + path);
    std::vector<int64_t> shape(ndim);
    for (uint32_t i = 0; i < ndim; ++i) shape[i] = io::read_pod<int64_t>(f, path);
    return shape;
}

}  // namespace

void save_model(const Model& model, const std::string& path) {
    io::File f = io::open_write(path);
    write_header(f.get(), model.arch_id, kDtypeF32, static_cast<uint32_t>(model.params.size()),
                 path);
    for (const nn::Parameter& p : model.params) {
        io::write_string(f.get(), p.name, path);
        write_shape(f.get(), p.value.shape(), path);
        io::write_raw(f.get(), p.value.data(), sizeof(float) * static_cast<size_t>(p.value.numel()),
                      path);
    }
}

void save_model(const QuantizedModel& model, const std::string& path) {
    io::File f = io::open_write(path);
    write_header(f.get(), model.arch_id, kDtypeI8, static_cast<uint32_t>(model.tensors.size()),
                 path);
    for (const QuantizedTensor& t : model.tensors) {
        io::write_string(f.get(), t.name, path);
        write_shape(f.get(), t.shape, path);
        io::write_pod<float>(f.get(), t.scale, path);
        io::write_pod<int32_t>(f.get(), t.zero_point, path);
        io::write_raw(f.get(), t.data.data(), t.data.size(), path);
    }
}

ModelDtype peek_model_dtype(const std::string& path) {
    io::File f = io::open_read(path);
    Header h = read_header(f.get(), path);
    return h.dtype == kDtypeI8 ? ModelDtype::kInt8 : ModelDtype::kFloat32;
}

std::string peek_model_arch(const std::string& path) {
    io::File f = io::open_read(path);
    return read_header(f.get(), path).arch_id;
}

void load_model(const std::string& path, Model& model) {
    io::File f = io::open_read(path);
    Header h = read_header(f.get(), path);
    if (h.dtype != kDtypeF32) throw FormatError("expected a float32 model file: " + path);
    if (h.arch_id != model.arch_id) {
        throw FormatError("architecture mismatch: file " + h.arch_id + " vs model " +
                          model.arch_id);
    }
    if (h.n_tensors != model.params.size()) {
        throw FormatError("tensor count mismatch in " + path);
    }
    for (nn::Parameter& p : model.params) {
        const std::string name = io::read_string(f.get(), path);
        if (name != p.name) throw FormatError("tensor order mismatch at " + name + ": " + path);
        const std::vector<int64_t> shape = read_shape(f.get(), path);
        if (shape != p.value.shape()) throw FormatError("tensor shape mismatch at " + name);
        io::read_raw(f.get(), p.value.data(), sizeof(float) * static_cast<size_t>(p.value.numel()),
                     path);
    }
}

QuantizedModel load_quantized_model(const std::string& path) {
    io::File f = io::open_read(path);
    Header h = read_header(f.get(), path);
    if (h.dtype != kDtypeI8) throw FormatError("expected an int8 model file: " + path);
    QuantizedModel q;
    q.arch_id = h.arch_id;
    q.tensors.resize(h.n_tensors);
    for (QuantizedTensor& t : q.tensors) {
        t.name = io::read_string(f.get(), path);
        t.shape = read_shape(f.get(), path);
        t.scale = io::read_pod<float>(f.get(), path);
        t.zero_point = io::read_pod<int32_t>(f.get(), path);
        int64_t numel = 1;
        for (int64_t d : t.shape) numel *= d;
        t.data.resize(static_cast<size_t>(numel));
        io::read_raw(f.get(), t.data.data(), t.data.size(), path);
    }
    return q;
}

void load_model_any(const std::string& path, Model& model) {
    if (peek_model_dtype(path) == ModelDtype::kInt8) {
        dequantize_weights(load_quantized_model(path), model);
    } else {
        load_model(path, model);
    }
}

}  // namespace p2p
