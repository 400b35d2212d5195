#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "sfl/core/error.hpp"
#include "sfl/core/matrix.hpp"
#include "sfl/core/rng.hpp"
#include "sfl/nn/spec.hpp"

namespace sfl::nn {

// Only guards log(0) after underflow; a larger floor would flatten the loss
// while backward() still returns p - onehot.
inline constexpr double kProbabilityFloor = std::numeric_limits<double>::min();

struct Layer {
    PlannedLayer plan;
    std::vector<double> w;  // conv: (filter, ky, kx, cin); dense: (unit, input)
    std::vector<double> b;
};

inline constexpr std::ptrdiff_t kBioInput = -1;
inline constexpr std::ptrdiff_t kLandmarkInput = -2;

struct Model {
    NetworkSpec spec;
    std::uint64_t seed = 0;
    std::vector<Layer> layers;
    // Producer of each layer's input: a layer index or one of the input tags.
    // Concat has two producers (bio side first).
    std::vector<std::array<std::ptrdiff_t, 2>> sources;
    std::vector<double> history;  // mean loss per epoch

    std::size_t param_count() const noexcept {
        std::size_t n = 0;
        for (const auto& l : layers) n += l.w.size() + l.b.size();
        return n;
    }
};

/// Glorot-uniform weights from RngStream(seed, layer index), zero biases.
inline Model build(const NetworkSpec& spec, std::uint64_t seed) {
    Model m{spec, seed, {}, {}, {}};
    const auto planned = plan(spec);
    std::ptrdiff_t bio_tail = kBioInput;
    std::ptrdiff_t lm_tail = kLandmarkInput;
    std::ptrdiff_t prev = -3;
    for (std::size_t i = 0; i < planned.size(); ++i) {
        const auto me = static_cast<std::ptrdiff_t>(i);
        switch (planned[i].segment) {
        case Segment::bio_branch:
            m.sources.push_back({bio_tail, 0});
            bio_tail = me;
            break;
        case Segment::landmark_branch:
            m.sources.push_back({lm_tail, 0});
            lm_tail = me;
            break;
        case Segment::trunk:
        case Segment::head:
            if (planned[i].spec.kind == LayerKind::concat)
                m.sources.push_back({bio_tail, lm_tail});
            else if (prev == -3)
                m.sources.push_back({uses_bio(spec.topology) ? bio_tail : lm_tail, 0});
            else
                m.sources.push_back({prev, 0});
            prev = me;
            break;
        }
    }
    for (std::size_t i = 0; i < planned.size(); ++i) {
        Layer l{planned[i], std::vector<double>(planned[i].weights), std::vector<double>(planned[i].biases, 0.0)};
        if (!l.w.empty()) {
            const auto& s = l.plan.spec;
            double fan_in = 0.0;
            double fan_out = 0.0;
            if (s.kind == LayerKind::dense) {
                fan_in = static_cast<double>(l.plan.in.h);
                fan_out = static_cast<double>(s.units);
            } else {
                const double area = static_cast<double>(s.kernel_h * s.kernel_w);
                fan_in = area * static_cast<double>(l.plan.in.c);
                fan_out = area * static_cast<double>(s.units);
            }
            const double limit = std::sqrt(6.0 / (fan_in + fan_out));
            RngStream rng(seed, i);
            for (auto& v : l.w) v = rng.uniform(-limit, limit);
        }
        m.layers.push_back(std::move(l));
    }
    return m;
}

/// Same-shaped container for parameter gradients (or optimizer moments).
struct ParamSet {
    std::vector<std::vector<double>> w;
    std::vector<std::vector<double>> b;

    static ParamSet zeros_like(const Model& m) {
        ParamSet g;
        for (const auto& l : m.layers) {
            g.w.emplace_back(l.w.size(), 0.0);
            g.b.emplace_back(l.b.size(), 0.0);
        }
        return g;
    }
    void clear() {
        for (auto& v : w) std::fill(v.begin(), v.end(), 0.0);
        for (auto& v : b) std::fill(v.begin(), v.end(), 0.0);
    }
};

/// Per-sample activations, pooling routes and dropout masks kept for backprop.
struct Workspace {
    std::vector<std::vector<double>> in;   // input of layer i (concat: unused)
    std::vector<std::vector<double>> out;  // output of layer i
    std::vector<std::vector<std::size_t>> argmax;
    std::vector<std::vector<double>> mask;
    std::vector<std::vector<double>> grad;  // d loss / d out of layer i
    std::vector<double> bio_grad;
    std::vector<double> lm_grad;
    // Training-mode dropout draws masks from dropout_rng; with reuse_masks the
    // masks of the previous pass are kept (used by gradient checks).
    RngStream dropout_rng{0, 0};
    bool reuse_masks = false;

    explicit Workspace(const Model& m) {
        const auto n = m.layers.size();
        in.resize(n);
        out.resize(n);
        argmax.resize(n);
        mask.resize(n);
        grad.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            in[i].resize(m.layers[i].plan.in.size());
            out[i].resize(m.layers[i].plan.out.size());
            grad[i].resize(m.layers[i].plan.out.size());
            if (m.layers[i].plan.spec.kind == LayerKind::dropout) mask[i].assign(m.layers[i].plan.out.size(), 1.0);
            if (m.layers[i].plan.spec.kind == LayerKind::maxpool1d || m.layers[i].plan.spec.kind == LayerKind::maxpool2d)
                argmax[i].resize(m.layers[i].plan.out.size());
        }
    }
};

namespace detail {

inline void activate(std::vector<double>& v, Activation a) {
    if (a == Activation::relu) {
        for (auto& x : v) x = x > 0.0 ? x : 0.0;
    } else if (a == Activation::softmax) {
        const double mx = *std::max_element(v.begin(), v.end());
        double sum = 0.0;
        for (auto& x : v) {
            x = std::exp(x - mx);
            sum += x;
        }
        for (auto& x : v) x /= sum;
    }
}

inline void layer_forward(const Layer& layer, std::span<const double> x, Workspace& ws, std::size_t idx, bool training) {
    const auto& s = layer.plan.spec;
    const Shape in = layer.plan.in;
    const Shape out = layer.plan.out;
    auto& y = ws.out[idx];
    std::copy(x.begin(), x.end(), ws.in[idx].begin());
    switch (s.kind) {
    case LayerKind::conv1d:
    case LayerKind::conv2d: {
        const std::size_t kh = s.kernel_h, kw = s.kernel_w, cin = in.c;
        for (std::size_t oy = 0; oy < out.h; ++oy)
            for (std::size_t ox = 0; ox < out.w; ++ox)
                for (std::size_t f = 0; f < out.c; ++f) {
                    double acc = layer.b[f];
                    const double* wf = layer.w.data() + f * kh * kw * cin;
                    for (std::size_t ky = 0; ky < kh; ++ky) {
                        const double* row = x.data() + ((oy + ky) * in.w + ox) * cin;
                        const double* wr = wf + ky * kw * cin;
                        for (std::size_t j = 0; j < kw * cin; ++j) acc += wr[j] * row[j];
                    }
                    y[(oy * out.w + ox) * out.c + f] = acc;
                }
        activate(y, s.activation);
        break;
    }
    case LayerKind::maxpool1d:
    case LayerKind::maxpool2d: {
        auto& route = ws.argmax[idx];
        for (std::size_t oy = 0; oy < out.h; ++oy)
            for (std::size_t ox = 0; ox < out.w; ++ox)
                for (std::size_t c = 0; c < out.c; ++c) {
                    std::size_t best = ((oy * s.pool_h) * in.w + ox * s.pool_w) * in.c + c;
                    for (std::size_t py = 0; py < s.pool_h; ++py)
                        for (std::size_t px = 0; px < s.pool_w; ++px) {
                            const std::size_t at = ((oy * s.pool_h + py) * in.w + ox * s.pool_w + px) * in.c + c;
                            if (x[at] > x[best]) best = at;  // strict: first maximum wins ties
                        }
                    const std::size_t o = (oy * out.w + ox) * out.c + c;
                    route[o] = best;
                    y[o] = x[best];
                }
        break;
    }
    case LayerKind::flatten:
        std::copy(x.begin(), x.end(), y.begin());
        break;
    case LayerKind::dense: {
        const std::size_t n_in = in.h;
        for (std::size_t u = 0; u < out.h; ++u) {
            double acc = layer.b[u];
            const double* wu = layer.w.data() + u * n_in;
            for (std::size_t j = 0; j < n_in; ++j) acc += wu[j] * x[j];
            y[u] = acc;
        }
        activate(y, s.activation);
        break;
    }
    case LayerKind::dropout: {
        auto& m = ws.mask[idx];
        if (training && s.dropout_rate > 0.0) {
            if (!ws.reuse_masks) {
                const double keep = 1.0 - s.dropout_rate;
                for (auto& v : m) v = ws.dropout_rng.uniform01() < s.dropout_rate ? 0.0 : 1.0 / keep;
            }
            for (std::size_t i = 0; i < y.size(); ++i) y[i] = x[i] * m[i];
        } else {
            std::fill(m.begin(), m.end(), 1.0);
            std::copy(x.begin(), x.end(), y.begin());
        }
        break;
    }
    case LayerKind::concat:
        break;
    }
}

// dy = d loss / d output (post-activation); writes d loss / d input into dx and accumulates parameter grads.
inline void layer_backward(const Layer& layer, Workspace& ws, std::size_t idx, std::span<double> dy_in,
                           std::span<double> dx, std::vector<double>& gw, std::vector<double>& gb,
                           bool pre_activation_grad) {
    const auto& s = layer.plan.spec;
    const Shape in = layer.plan.in;
    const Shape out = layer.plan.out;
    const auto& x = ws.in[idx];
    const auto& y = ws.out[idx];
    std::vector<double> dz(dy_in.begin(), dy_in.end());
    if (!pre_activation_grad && s.activation == Activation::relu)
        for (std::size_t i = 0; i < dz.size(); ++i)
            if (y[i] <= 0.0) dz[i] = 0.0;
    std::fill(dx.begin(), dx.end(), 0.0);
    switch (s.kind) {
    case LayerKind::conv1d:
    case LayerKind::conv2d: {
        const std::size_t kh = s.kernel_h, kw = s.kernel_w, cin = in.c;
        for (std::size_t oy = 0; oy < out.h; ++oy)
            for (std::size_t ox = 0; ox < out.w; ++ox)
                for (std::size_t f = 0; f < out.c; ++f) {
                    const double g = dz[(oy * out.w + ox) * out.c + f];
                    if (g == 0.0) continue;
                    gb[f] += g;
                    const std::size_t wbase = f * kh * kw * cin;
                    for (std::size_t ky = 0; ky < kh; ++ky) {
                        const std::size_t xbase = ((oy + ky) * in.w + ox) * cin;
                        const std::size_t wrow = wbase + ky * kw * cin;
                        for (std::size_t j = 0; j < kw * cin; ++j) {
                            gw[wrow + j] += g * x[xbase + j];
                            dx[xbase + j] += g * layer.w[wrow + j];
                        }
                    }
                }
        break;
    }
    case LayerKind::maxpool1d:
    case LayerKind::maxpool2d: {
        const auto& route = ws.argmax[idx];
        for (std::size_t o = 0; o < dz.size(); ++o) dx[route[o]] += dz[o];
        break;
    }
    case LayerKind::flatten:
        std::copy(dz.begin(), dz.end(), dx.begin());
        break;
    case LayerKind::dense: {
        const std::size_t n_in = in.h;
        for (std::size_t u = 0; u < out.h; ++u) {
            const double g = dz[u];
            if (g == 0.0) continue;
            gb[u] += g;
            double* gwu = gw.data() + u * n_in;
            const double* wu = layer.w.data() + u * n_in;
            for (std::size_t j = 0; j < n_in; ++j) {
                gwu[j] += g * x[j];
                dx[j] += g * wu[j];
            }
        }
        break;
    }
    case LayerKind::dropout: {
        const auto& m = ws.mask[idx];
        for (std::size_t i = 0; i < dz.size(); ++i) dx[i] = dz[i] * m[i];
        break;
    }
    case LayerKind::concat:
        break;
    }
}

}  // namespace detail

inline void check_input(std::span<const double> v, std::size_t expected, const char* what) {
    require(v.size() == expected, ErrorKind::invalid_input,
            std::string(what) + " input has " + std::to_string(v.size()) + " values, network expects " +
                std::to_string(expected));
    require(all_finite(v), ErrorKind::invalid_input, std::string(what) + " input contains non-finite values");
}

/// Class probabilities for one sample; the unused modality may be empty.
inline std::span<const double> forward(const Model& m, Workspace& ws, std::span<const double> bio,
                                       std::span<const double> landmarks, bool training) {
    const Topology t = m.spec.topology;
    if (uses_bio(t)) check_input(bio, m.spec.bio_input.size(), "bio");
    if (uses_landmarks(t)) check_input(landmarks, m.spec.landmark_input.size(), "landmark");
    auto value = [&](std::ptrdiff_t src) -> std::span<const double> {
        if (src == kBioInput) return bio;
        if (src == kLandmarkInput) return landmarks;
        return ws.out[static_cast<std::size_t>(src)];
    };
    for (std::size_t i = 0; i < m.layers.size(); ++i) {
        const auto& l = m.layers[i];
        if (l.plan.spec.kind == LayerKind::concat) {
            const auto a = value(m.sources[i][0]);
            const auto b = value(m.sources[i][1]);
            auto& y = ws.out[i];
            std::copy(a.begin(), a.end(), y.begin());
            std::copy(b.begin(), b.end(), y.begin() + static_cast<std::ptrdiff_t>(a.size()));
        } else {
            detail::layer_forward(l, value(m.sources[i][0]), ws, i, training);
        }
    }
    return ws.out.back();
}

inline double sample_loss(std::span<const double> probs, int label) {
    return -std::log(std::max(probs[static_cast<std::size_t>(label)], kProbabilityFloor));
}

/// Σ l2·w² over dense layers that carry an L2 coefficient (biases excluded).
inline double l2_penalty(const Model& m) {
    double total = 0.0;
    for (const auto& l : m.layers)
        if (l.plan.spec.l2 > 0.0) {
            double s = 0.0;
            for (double v : l.w) s += v * v;
            total += l.plan.spec.l2 * s;
        }
    return total;
}

/// Backpropagates `scale`·(cross-entropy of the last forward pass) into g.
/// Input gradients are left in ws.bio_grad / ws.lm_grad.
inline void backward(const Model& m, Workspace& ws, int label, double scale, ParamSet& g) {
    const std::size_t n = m.layers.size();
    for (auto& v : ws.grad) std::fill(v.begin(), v.end(), 0.0);
    ws.bio_grad.assign(m.spec.bio_input.size(), 0.0);
    ws.lm_grad.assign(m.spec.landmark_input.size(), 0.0);
    auto target = [&](std::ptrdiff_t src) -> std::vector<double>& {
        if (src == kBioInput) return ws.bio_grad;
        if (src == kLandmarkInput) return ws.lm_grad;
        return ws.grad[static_cast<std::size_t>(src)];
    };
    // Softmax + cross-entropy: d loss / d logits = p - onehot.
    auto& top = ws.grad[n - 1];
    for (std::size_t k = 0; k < top.size(); ++k)
        top[k] = scale * (ws.out[n - 1][k] - (static_cast<int>(k) == label ? 1.0 : 0.0));
    std::vector<double> dx;
    for (std::size_t i = n; i-- > 0;) {
        const auto& l = m.layers[i];
        const auto& dy = ws.grad[i];
        if (l.plan.spec.kind == LayerKind::concat) {
            auto& ga = target(m.sources[i][0]);
            auto& gb = target(m.sources[i][1]);
            for (std::size_t k = 0; k < ga.size(); ++k) ga[k] += dy[k];
            for (std::size_t k = 0; k < gb.size(); ++k) gb[k] += dy[ga.size() + k];
            continue;
        }
        dx.assign(l.plan.in.size(), 0.0);
        detail::layer_backward(l, ws, i, ws.grad[i], dx, g.w[i], g.b[i], i == n - 1);
        auto& gt = target(m.sources[i][0]);
        for (std::size_t k = 0; k < gt.size(); ++k) gt[k] += dx[k];
    }
}

}  // namespace sfl::nn
