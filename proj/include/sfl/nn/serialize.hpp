#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "sfl/core/csv.hpp"
#include "sfl/core/error.hpp"
#include "sfl/nn/network.hpp"

namespace sfl::nn {

using ojson = nlohmann::ordered_json;

inline LayerKind parse_layer_kind(const std::string& s) {
    for (auto k : {LayerKind::conv1d, LayerKind::conv2d, LayerKind::maxpool1d, LayerKind::maxpool2d, LayerKind::flatten,
                   LayerKind::concat, LayerKind::dense, LayerKind::dropout})
        if (s == kind_name(k)) return k;
    fail(ErrorKind::spec_validation, "unknown layer kind '" + s + "'");
}

inline Activation parse_activation(const std::string& s) {
    for (auto a : {Activation::none, Activation::relu, Activation::softmax})
        if (s == activation_name(a)) return a;
    fail(ErrorKind::spec_validation, "unknown activation '" + s + "'");
}

inline ojson to_json(const LayerSpec& l) {
    ojson j;
    j["kind"] = kind_name(l.kind);
    if (l.kernel_h) j["kernel"] = {l.kernel_h, l.kernel_w};
    if (l.pool_h) j["pool"] = {l.pool_h, l.pool_w};
    if (l.units) j["units"] = l.units;
    if (l.in_units) j["in_units"] = l.in_units;
    if (l.activation != Activation::none) j["activation"] = activation_name(l.activation);
    if (l.l2 != 0.0) j["l2"] = l.l2;
    if (l.dropout_rate != 0.0) j["rate"] = l.dropout_rate;
    return j;
}

inline LayerSpec layer_from_json(const ojson& j) {
    LayerSpec l;
    l.kind = parse_layer_kind(j.at("kind").get<std::string>());
    if (j.contains("kernel")) {
        l.kernel_h = j.at("kernel").at(0).get<std::size_t>();
        l.kernel_w = j.at("kernel").at(1).get<std::size_t>();
    }
    if (j.contains("pool")) {
        l.pool_h = j.at("pool").at(0).get<std::size_t>();
        l.pool_w = j.at("pool").at(1).get<std::size_t>();
    }
    l.units = j.value("units", std::size_t{0});
    l.in_units = j.value("in_units", std::size_t{0});
    l.activation = parse_activation(j.value("activation", std::string("none")));
    l.l2 = j.value("l2", 0.0);
    l.dropout_rate = j.value("rate", 0.0);
    return l;
}

inline ojson to_json(const Shape& s) { return {s.h, s.w, s.c}; }
inline Shape shape_from_json(const ojson& j) {
    return {j.at(0).get<std::size_t>(), j.at(1).get<std::size_t>(), j.at(2).get<std::size_t>()};
}

inline ojson to_json(const NetworkSpec& s) {
    auto list = [](const std::vector<LayerSpec>& v) {
        ojson a = ojson::array();
        for (const auto& l : v) a.push_back(to_json(l));
        return a;
    };
    ojson j;
    j["topology"] = topology_name(s.topology);
    j["post_fusion_conv"] = s.post_fusion_conv;
    j["bio_input"] = to_json(s.bio_input);
    j["landmark_input"] = to_json(s.landmark_input);
    j["bio_branch"] = list(s.bio_branch);
    j["landmark_branch"] = list(s.landmark_branch);
    j["trunk"] = list(s.trunk);
    j["head"] = list(s.head);
    return j;
}

inline NetworkSpec spec_from_json(const ojson& j) {
    auto list = [](const ojson& a) {
        std::vector<LayerSpec> v;
        for (const auto& l : a) v.push_back(layer_from_json(l));
        return v;
    };
    NetworkSpec s;
    s.topology = parse_topology(j.at("topology").get<std::string>());
    s.post_fusion_conv = j.at("post_fusion_conv").get<bool>();
    s.bio_input = shape_from_json(j.at("bio_input"));
    s.landmark_input = shape_from_json(j.at("landmark_input"));
    s.bio_branch = list(j.at("bio_branch"));
    s.landmark_branch = list(j.at("landmark_branch"));
    s.trunk = list(j.at("trunk"));
    s.head = list(j.at("head"));
    return s;
}

/// Model file: one line of JSON (spec, seed, history, parameter count), then
/// the parameters as little-endian IEEE-754 doubles, layer by layer, weights before biases.
inline std::string save_model(const Model& m) {
    ojson h;
    h["format"] = "sfl-model-1";
    h["seed"] = m.seed;
    h["param_count"] = m.param_count();
    h["history"] = m.history;
    h["spec"] = to_json(m.spec);
    std::string out = h.dump() + "\n";
    out.reserve(out.size() + 8 * m.param_count());
    auto put = [&](double v) {
        const auto bits = std::bit_cast<std::uint64_t>(v);
        for (int k = 0; k < 8; ++k) out.push_back(static_cast<char>((bits >> (8 * k)) & 0xff));
    };
    for (const auto& l : m.layers) {
        for (double v : l.w) put(v);
        for (double v : l.b) put(v);
    }
    return out;
}

inline Model load_model(std::string_view bytes) {
    const auto nl = bytes.find('\n');
    require(nl != std::string_view::npos, ErrorKind::invalid_input, "model file has no header line");
    Model m;
    try {
        const auto h = ojson::parse(bytes.substr(0, nl));
        require(h.at("format").get<std::string>() == "sfl-model-1", ErrorKind::invalid_input, "unknown model format");
        m = build(spec_from_json(h.at("spec")), h.at("seed").get<std::uint64_t>());
        m.history = h.at("history").get<std::vector<double>>();
        require(h.at("param_count").get<std::size_t>() == m.param_count(), ErrorKind::invalid_input,
                "model header parameter count does not match its spec");
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::invalid_input, std::string("model header: ") + e.what());
    }
    const auto body = bytes.substr(nl + 1);
    require(body.size() == 8 * m.param_count(), ErrorKind::invalid_input,
            "model parameter block has " + std::to_string(body.size()) + " bytes, expected " +
                std::to_string(8 * m.param_count()));
    std::size_t at = 0;
    auto get = [&]() {
        std::uint64_t bits = 0;
        for (int k = 0; k < 8; ++k) bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(body[at + k])) << (8 * k);
        at += 8;
        return std::bit_cast<double>(bits);
    };
    for (auto& l : m.layers) {
        for (auto& v : l.w) v = get();
        for (auto& v : l.b) v = get();
    }
    return m;
}

}  // namespace sfl::nn
