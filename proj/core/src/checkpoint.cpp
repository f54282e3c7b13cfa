#include "n2n/checkpoint.hpp"

#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace n2n {
namespace {

constexpr const char* kFormatTag = "n2n-checkpoint-v1";

nlohmann::json tensor_json(const Matrix& m) {
    return {{"shape", {m.rows, m.cols}}, {"data", m.data}};
}

nlohmann::json tensor_json(const std::vector<double>& v) {
    return {{"shape", {v.size()}}, {"data", v}};
}

Matrix matrix_from_json(const nlohmann::json& t, const std::string& name) {
    const auto& shape = t.at("shape");
    if (shape.size() != 2) throw std::runtime_error("checkpoint: tensor " + name + " is not 2-d");
    Matrix m(shape[0].get<std::size_t>(), shape[1].get<std::size_t>());
    const auto& data = t.at("data");
    if (data.size() != m.size()) {
        throw std::runtime_error("checkpoint: tensor " + name + " data/shape mismatch");
    }
    m.data = data.get<std::vector<double>>();
    return m;
}

std::vector<double> vector_from_json(const nlohmann::json& t, const std::string& name) {
    const auto& shape = t.at("shape");
    if (shape.size() != 1) throw std::runtime_error("checkpoint: tensor " + name + " is not 1-d");
    auto v = t.at("data").get<std::vector<double>>();
    if (v.size() != shape[0].get<std::size_t>()) {
        throw std::runtime_error("checkpoint: tensor " + name + " data/shape mismatch");
    }
    return v;
}

}  // namespace

void save_checkpoint(const MlpParams& params, const std::filesystem::path& path) {
    nlohmann::json j;
    j["format"] = kFormatTag;
    j["arch"] = to_string(params.arch);
    nlohmann::json tensors;
    tensors["w1"] = tensor_json(params.w1);
    tensors["b1"] = tensor_json(params.b1);
    if (params.arch == Arch::TwoHiddenPlusHead) {
        tensors["w2"] = tensor_json(params.w2);
        tensors["b2"] = tensor_json(params.b2);
    }
    tensors["whead"] = tensor_json(params.whead);
    tensors["bhead"] = tensor_json(params.bhead);
    j["tensors"] = std::move(tensors);

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write checkpoint " + path.string());
    out << j.dump(2) << '\n';
}

MlpParams load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read checkpoint " + path.string());
    nlohmann::json j = nlohmann::json::parse(in);
    if (!j.contains("format") || j["format"].get<std::string>() != kFormatTag) {
        throw std::runtime_error("checkpoint: unrecognized format in " + path.string());
    }
    MlpParams p;
    p.arch = arch_from_string(j.at("arch").get<std::string>());
    const auto& tensors = j.at("tensors");
    p.w1 = matrix_from_json(tensors.at("w1"), "w1");
    p.b1 = vector_from_json(tensors.at("b1"), "b1");
    if (p.arch == Arch::TwoHiddenPlusHead) {
        p.w2 = matrix_from_json(tensors.at("w2"), "w2");
        p.b2 = vector_from_json(tensors.at("b2"), "b2");
    }
    p.whead = matrix_from_json(tensors.at("whead"), "whead");
    p.bhead = vector_from_json(tensors.at("bhead"), "bhead");
    return p;
}

}  // namespace n2n
