#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "sfl/core/error.hpp"

namespace sfl::nn {

/// Height × width × channels, stored row-major with channels innermost.
struct Shape {
    std::size_t h = 0;
    std::size_t w = 1;
    std::size_t c = 1;
    std::size_t size() const noexcept { return h * w * c; }
    bool operator==(const Shape&) const = default;
    std::string str() const { return std::to_string(h) + "x" + std::to_string(w) + "x" + std::to_string(c); }
};

enum class LayerKind { conv1d, conv2d, maxpool1d, maxpool2d, flatten, concat, dense, dropout };
enum class Activation { none, relu, softmax };

inline const char* kind_name(LayerKind k) noexcept {
    switch (k) {
    case LayerKind::conv1d: return "conv1d";
    case LayerKind::conv2d: return "conv2d";
    case LayerKind::maxpool1d: return "maxpool1d";
    case LayerKind::maxpool2d: return "maxpool2d";
    case LayerKind::flatten: return "flatten";
    case LayerKind::concat: return "concat";
    case LayerKind::dense: return "dense";
    case LayerKind::dropout: return "dropout";
    }
    return "?";
}

inline const char* activation_name(Activation a) noexcept {
    switch (a) {
    case Activation::none: return "none";
    case Activation::relu: return "relu";
    case Activation::softmax: return "softmax";
    }
    return "?";
}

struct LayerSpec {
    LayerKind kind = LayerKind::dense;
    std::size_t kernel_h = 0, kernel_w = 0;  // conv
    std::size_t pool_h = 0, pool_w = 0;      // maxpool
    std::size_t units = 0;                   // conv filters or dense units
    std::size_t in_units = 0;                // dense only; 0 = inferred
    Activation activation = Activation::none;
    double l2 = 0.0;
    double dropout_rate = 0.0;

    bool operator==(const LayerSpec&) const = default;
};

inline LayerSpec conv1d(std::size_t filters, std::size_t k = 3) {
    return {LayerKind::conv1d, k, 1, 0, 0, filters, 0, Activation::relu, 0.0, 0.0};
}
inline LayerSpec conv2d(std::size_t filters, std::size_t k = 3) {
    return {LayerKind::conv2d, k, k, 0, 0, filters, 0, Activation::relu, 0.0, 0.0};
}
inline LayerSpec maxpool1d(std::size_t p = 2) { return {LayerKind::maxpool1d, 0, 0, p, 1, 0, 0, Activation::none, 0.0, 0.0}; }
inline LayerSpec maxpool2d(std::size_t p = 2) { return {LayerKind::maxpool2d, 0, 0, p, p, 0, 0, Activation::none, 0.0, 0.0}; }
inline LayerSpec flatten() { return {LayerKind::flatten}; }
inline LayerSpec concat() { return {LayerKind::concat}; }
inline LayerSpec dense(std::size_t units, Activation a, double l2 = 0.0) {
    return {LayerKind::dense, 0, 0, 0, 0, units, 0, a, l2, 0.0};
}
inline LayerSpec dropout(double rate) { return {LayerKind::dropout, 0, 0, 0, 0, 0, 0, Activation::none, 0.0, rate}; }

enum class Topology { unimodal_bio, unimodal_landmarks, early_fusion, intermediate_fusion };

inline constexpr Topology all_topologies[] = {Topology::unimodal_bio, Topology::unimodal_landmarks,
                                              Topology::early_fusion, Topology::intermediate_fusion};

inline const char* topology_name(Topology t) noexcept {
    switch (t) {
    case Topology::unimodal_bio: return "unimodal-bio";
    case Topology::unimodal_landmarks: return "unimodal-landmarks";
    case Topology::early_fusion: return "early-fusion";
    case Topology::intermediate_fusion: return "intermediate-fusion";
    }
    return "?";
}

inline Topology parse_topology(const std::string& s) {
    for (auto t : all_topologies)
        if (s == topology_name(t)) return t;
    fail(ErrorKind::invalid_argument, "unknown topology '" + s +
                                          "' (expected unimodal-bio, unimodal-landmarks, early-fusion, intermediate-fusion)");
}

inline bool uses_bio(Topology t) noexcept { return t != Topology::unimodal_landmarks; }
inline bool uses_landmarks(Topology t) noexcept { return t != Topology::unimodal_bio; }
inline bool is_fusion(Topology t) noexcept { return t == Topology::early_fusion || t == Topology::intermediate_fusion; }

/// Layer graph: branches run on their modality input; for fusion topologies
/// the trunk starts with a concat of both branch outputs; the head follows.
struct NetworkSpec {
    Topology topology = Topology::intermediate_fusion;
    bool post_fusion_conv = true;
    Shape bio_input{20, 1, 1};
    Shape landmark_input{7, 7, 1};
    std::vector<LayerSpec> bio_branch;
    std::vector<LayerSpec> landmark_branch;
    std::vector<LayerSpec> trunk;
    std::vector<LayerSpec> head;

    bool operator==(const NetworkSpec&) const = default;
};

/// Filter counts per network. The defaults are the configurations whose
/// parameter totals come closest to the published 5,043 / 2,675 / 5,043 / 82,099.
struct FilterConfig {
    std::size_t bio_unimodal = 33;
    std::size_t landmark_unimodal = 34;
    std::size_t early = 9;
    std::size_t intermediate_bio = 10;
    std::size_t intermediate_landmark = 26;
    std::size_t post_fusion = 53;

    bool operator==(const FilterConfig&) const = default;
};

inline std::vector<LayerSpec> classifier_head() {
    return {dense(16, Activation::relu), dropout(0.2), dense(8, Activation::relu, 0.01), dropout(0.2),
            dense(3, Activation::softmax)};
}

inline NetworkSpec make_spec(Topology t, const FilterConfig& f = {}, bool post_fusion_conv = true,
                             std::size_t bio_dims = 20, std::size_t landmark_side = 7) {
    NetworkSpec s;
    s.topology = t;
    s.post_fusion_conv = t == Topology::intermediate_fusion && post_fusion_conv;
    s.bio_input = {bio_dims, 1, 1};
    s.landmark_input = {landmark_side, landmark_side, 1};
    switch (t) {
    case Topology::unimodal_bio:
        s.bio_branch = {conv1d(f.bio_unimodal), maxpool1d(), flatten()};
        break;
    case Topology::unimodal_landmarks:
        s.landmark_branch = {conv2d(f.landmark_unimodal), maxpool2d(), flatten()};
        break;
    case Topology::early_fusion:
        s.trunk = {concat(), conv1d(f.early), maxpool1d(), flatten()};
        break;
    case Topology::intermediate_fusion:
        s.bio_branch = {conv1d(f.intermediate_bio), maxpool1d(), flatten()};
        s.landmark_branch = {conv2d(f.intermediate_landmark), maxpool2d(), flatten()};
        s.trunk = {concat()};
        if (s.post_fusion_conv) s.trunk.insert(s.trunk.end(), {conv1d(f.post_fusion), maxpool1d(), flatten()});
        break;
    }
    s.head = classifier_head();
    return s;
}

/// Where a layer sits in the flattened layer list.
enum class Segment { bio_branch, landmark_branch, trunk, head };

struct PlannedLayer {
    LayerSpec spec;
    Segment segment;
    Shape in;
    Shape out;
    std::size_t weights = 0;
    std::size_t biases = 0;
};

namespace detail {

inline std::string layer_label(Segment seg, std::size_t i, const LayerSpec& l) {
    static const char* names[] = {"bio_branch", "landmark_branch", "trunk", "head"};
    return std::string(names[static_cast<int>(seg)]) + "[" + std::to_string(i) + "] (" + kind_name(l.kind) + ")";
}

inline PlannedLayer plan_layer(const LayerSpec& l, Segment seg, std::size_t idx, Shape in) {
    const auto who = layer_label(seg, idx, l);
    auto bad = [&](const std::string& why) { fail(ErrorKind::spec_validation, who + ": " + why); };
    PlannedLayer p{l, seg, in, in};
    switch (l.kind) {
    case LayerKind::conv1d:
    case LayerKind::conv2d: {
        const bool one_d = l.kind == LayerKind::conv1d;
        if (l.units == 0 || l.kernel_h == 0 || l.kernel_w == 0) bad("needs filters and a kernel");
        if (one_d && (l.kernel_w != 1 || in.w != 1)) bad("1-D convolution needs a k×1 kernel on an n×1 input");
        if (l.kernel_h > in.h || l.kernel_w > in.w)
            bad("kernel " + std::to_string(l.kernel_h) + "x" + std::to_string(l.kernel_w) + " larger than input " + in.str());
        if (l.activation == Activation::softmax) bad("softmax is only allowed on the final dense layer");
        p.out = {in.h - l.kernel_h + 1, in.w - l.kernel_w + 1, l.units};
        p.weights = l.kernel_h * l.kernel_w * in.c * l.units;
        p.biases = l.units;
        break;
    }
    case LayerKind::maxpool1d:
    case LayerKind::maxpool2d:
        if (l.pool_h == 0 || l.pool_w == 0) bad("pool size must be positive");
        if (l.kind == LayerKind::maxpool1d && l.pool_w != 1) bad("1-D pooling needs a p×1 window");
        if (in.h / l.pool_h == 0 || in.w / l.pool_w == 0) bad("pool window larger than input " + in.str());
        p.out = {in.h / l.pool_h, in.w / l.pool_w, in.c};
        break;
    case LayerKind::flatten:
        p.out = {in.size(), 1, 1};
        break;
    case LayerKind::dense:
        if (in.w != 1 || in.c != 1) bad("dense input " + in.str() + " must be flattened first");
        if (l.units == 0) bad("needs at least one unit");
        if (l.in_units != 0 && l.in_units != in.h)
            bad("declared input size " + std::to_string(l.in_units) + " does not match " + std::to_string(in.h));
        p.out = {l.units, 1, 1};
        p.weights = l.units * in.h;
        p.biases = l.units;
        break;
    case LayerKind::dropout:
        if (!(l.dropout_rate >= 0.0 && l.dropout_rate < 1.0)) bad("dropout rate must lie in [0, 1)");
        break;
    case LayerKind::concat:
        bad("concat may only open the trunk of a fusion topology");
    }
    if (l.l2 < 0.0) bad("l2 coefficient must be nonnegative");
    if (l.l2 > 0.0 && l.kind != LayerKind::dense) bad("l2 applies to dense layers only");
    return p;
}

inline Shape plan_segment(const std::vector<LayerSpec>& layers, Segment seg, Shape in, std::size_t first,
                          std::vector<PlannedLayer>& out) {
    for (std::size_t i = first; i < layers.size(); ++i) {
        out.push_back(plan_layer(layers[i], seg, i, in));
        in = out.back().out;
    }
    return in;
}

}  // namespace detail

/// Shape inference over the whole graph; raises spec-validation naming the offending layer.
inline std::vector<PlannedLayer> plan(const NetworkSpec& s) {
    std::vector<PlannedLayer> out;
    const bool fusion = is_fusion(s.topology);
    if (!uses_bio(s.topology) && !s.bio_branch.empty())
        fail(ErrorKind::spec_validation, "bio_branch must be empty for " + std::string(topology_name(s.topology)));
    if (!uses_landmarks(s.topology) && !s.landmark_branch.empty())
        fail(ErrorKind::spec_validation, "landmark_branch must be empty for " + std::string(topology_name(s.topology)));
    if (s.bio_input.size() == 0 || s.landmark_input.size() == 0)
        fail(ErrorKind::spec_validation, "input shapes must be non-empty");
    Shape cur;
    Shape bio_out = s.bio_input;
    Shape lm_out = s.landmark_input;
    if (uses_bio(s.topology)) bio_out = detail::plan_segment(s.bio_branch, Segment::bio_branch, s.bio_input, 0, out);
    if (uses_landmarks(s.topology))
        lm_out = detail::plan_segment(s.landmark_branch, Segment::landmark_branch, s.landmark_input, 0, out);
    std::size_t trunk_first = 0;
    if (fusion) {
        if (s.trunk.empty() || s.trunk.front().kind != LayerKind::concat)
            fail(ErrorKind::spec_validation, "trunk[0] must be concat for " + std::string(topology_name(s.topology)));
        cur = {bio_out.size() + lm_out.size(), 1, 1};
        out.push_back({s.trunk.front(), Segment::trunk, cur, cur, 0, 0});
        trunk_first = 1;
    } else {
        cur = uses_bio(s.topology) ? bio_out : lm_out;
    }
    cur = detail::plan_segment(s.trunk, Segment::trunk, cur, trunk_first, out);
    cur = detail::plan_segment(s.head, Segment::head, cur, 0, out);
    if (s.head.empty() || s.head.back().kind != LayerKind::dense || s.head.back().activation != Activation::softmax ||
        s.head.back().units != 3)
        fail(ErrorKind::spec_validation, "head must end in a 3-unit softmax dense layer");
    for (std::size_t i = 0; i + 1 < out.size(); ++i)
        if (out[i].spec.activation == Activation::softmax)
            fail(ErrorKind::spec_validation, "softmax is only allowed on the final dense layer");
    return out;
}

inline std::size_t count_params(const NetworkSpec& s) {
    std::size_t n = 0;
    for (const auto& p : plan(s)) n += p.weights + p.biases;
    return n;
}

}  // namespace sfl::nn
