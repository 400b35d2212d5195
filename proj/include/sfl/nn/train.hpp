#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sfl/core/error.hpp"
#include "sfl/core/matrix.hpp"
#include "sfl/core/rng.hpp"
#include "sfl/nn/network.hpp"

namespace sfl::nn {

enum class Optimizer { adam, sgd };

inline const char* optimizer_name(Optimizer o) noexcept { return o == Optimizer::adam ? "adam" : "sgd"; }

inline Optimizer parse_optimizer(const std::string& s) {
    if (s == "adam") return Optimizer::adam;
    if (s == "sgd") return Optimizer::sgd;
    fail(ErrorKind::invalid_argument, "unknown optimizer '" + s + "' (expected adam or sgd)");
}

struct TrainConfig {
    Optimizer optimizer = Optimizer::adam;
    double learning_rate = 1e-3;
    std::size_t batch_size = 32;
    std::size_t epochs = 100;
    std::uint64_t seed = 42;

    bool operator==(const TrainConfig&) const = default;
};

inline void validate(const TrainConfig& c) {
    require(std::isfinite(c.learning_rate) && c.learning_rate > 0.0, ErrorKind::invalid_argument,
            "learning_rate must be > 0");
    require(c.batch_size >= 1, ErrorKind::invalid_argument, "batch_size must be >= 1");
}

/// Network inputs, row-aligned; a modality the topology ignores may be empty.
struct NetData {
    Matrix bio;
    Matrix landmarks;
    std::vector<int> labels;

    std::size_t rows() const noexcept { return bio.rows() ? bio.rows() : landmarks.rows(); }
    std::span<const double> bio_row(std::size_t i) const {
        return bio.rows() ? bio.row(i) : std::span<const double>{};
    }
    std::span<const double> landmark_row(std::size_t i) const {
        return landmarks.rows() ? landmarks.row(i) : std::span<const double>{};
    }
    NetData select(std::span<const std::size_t> idx) const {
        NetData d{bio.rows() ? bio.select_rows(idx) : Matrix(), landmarks.rows() ? landmarks.select_rows(idx) : Matrix(), {}};
        for (auto i : idx) d.labels.push_back(labels[i]);
        return d;
    }
};

/// Mean cross-entropy over the rows plus the L2 term; gradients of exactly
/// this quantity are accumulated into g.
inline double batch_gradient(const Model& m, Workspace& ws, const NetData& data, std::span<const std::size_t> rows,
                             bool training, ParamSet& g) {
    const double scale = 1.0 / static_cast<double>(rows.size());
    double loss = 0.0;
    for (auto r : rows) {
        const auto p = forward(m, ws, data.bio_row(r), data.landmark_row(r), training);
        loss += sample_loss(p, data.labels[r]);
        backward(m, ws, data.labels[r], scale, g);
    }
    for (std::size_t i = 0; i < m.layers.size(); ++i) {
        const double l2 = m.layers[i].plan.spec.l2;
        if (l2 > 0.0)
            for (std::size_t k = 0; k < m.layers[i].w.size(); ++k) g.w[i][k] += 2.0 * l2 * m.layers[i].w[k];
    }
    return loss * scale + l2_penalty(m);
}

/// Mean cross-entropy + L2 with dropout off.
inline double loss(const Model& m, const NetData& data, std::span<const std::size_t> rows) {
    require(!rows.empty(), ErrorKind::invalid_input, "loss over an empty batch");
    require(data.labels.size() == data.rows(), ErrorKind::invalid_input, "labels are not row-aligned");
    Workspace ws(m);
    double total = 0.0;
    for (auto r : rows) total += sample_loss(forward(m, ws, data.bio_row(r), data.landmark_row(r), false), data.labels[r]);
    return total / static_cast<double>(rows.size()) + l2_penalty(m);
}

inline double loss(const Model& m, const NetData& data) {
    const auto all = iota_indices(data.rows());
    return loss(m, data, all);
}

class Adam {
public:
    explicit Adam(const Model& m) : m_(ParamSet::zeros_like(m)), v_(ParamSet::zeros_like(m)) {}

    void step(Model& model, const ParamSet& g, double lr) {
        ++t_;
        const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
        const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
        for (std::size_t i = 0; i < model.layers.size(); ++i) {
            update(model.layers[i].w, g.w[i], m_.w[i], v_.w[i], lr, c1, c2);
            update(model.layers[i].b, g.b[i], m_.b[i], v_.b[i], lr, c1, c2);
        }
    }

private:
    static constexpr double kBeta1 = 0.9;
    static constexpr double kBeta2 = 0.999;
    static constexpr double kEps = 1e-8;

    static void update(std::vector<double>& p, const std::vector<double>& g, std::vector<double>& m,
                       std::vector<double>& v, double lr, double c1, double c2) {
        for (std::size_t k = 0; k < p.size(); ++k) {
            m[k] = kBeta1 * m[k] + (1.0 - kBeta1) * g[k];
            v[k] = kBeta2 * v[k] + (1.0 - kBeta2) * g[k] * g[k];
            p[k] -= lr * (m[k] / c1) / (std::sqrt(v[k] / c2) + kEps);
        }
    }

    ParamSet m_;
    ParamSet v_;
    std::uint64_t t_ = 0;
};

inline void sgd_step(Model& model, const ParamSet& g, double lr) {
    for (std::size_t i = 0; i < model.layers.size(); ++i) {
        for (std::size_t k = 0; k < g.w[i].size(); ++k) model.layers[i].w[k] -= lr * g.w[i][k];
        for (std::size_t k = 0; k < g.b[i].size(); ++k) model.layers[i].b[k] -= lr * g.b[i][k];
    }
}

/// Dropout masks for epoch e come from this stream; batch order from RngStream(seed, e).
inline constexpr std::uint64_t kDropoutSalt = 0x64726f706f7574ULL;

/// Mini-batch training; history gets the mean training loss of every epoch.
inline Model train(Model model, const NetData& data, const TrainConfig& cfg) {
    validate(cfg);
    require(data.rows() > 0, ErrorKind::empty_dataset, "training set is empty");
    require(data.labels.size() == data.rows(), ErrorKind::invalid_input, "training labels are not row-aligned");
    Workspace ws(model);
    ParamSet g = ParamSet::zeros_like(model);
    Adam adam(model);
    std::vector<std::size_t> order = iota_indices(data.rows());
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        order = iota_indices(data.rows());
        RngStream shuffler(cfg.seed, epoch);
        shuffler.shuffle(std::span<std::size_t>(order));
        ws.dropout_rng = RngStream(mix_seed(cfg.seed, kDropoutSalt), epoch);
        double epoch_loss = 0.0;
        for (std::size_t start = 0, batch = 0; start < order.size(); start += cfg.batch_size, ++batch) {
            const std::size_t len = std::min(cfg.batch_size, order.size() - start);
            const std::span<const std::size_t> rows(order.data() + start, len);
            g.clear();
            const double l = batch_gradient(model, ws, data, rows, true, g);
            if (!std::isfinite(l))
                fail(ErrorKind::divergence, "non-finite loss at epoch " + std::to_string(epoch + 1) + ", batch " +
                                                std::to_string(batch + 1));
            if (cfg.optimizer == Optimizer::adam)
                adam.step(model, g, cfg.learning_rate);
            else
                sgd_step(model, g, cfg.learning_rate);
            epoch_loss += l * static_cast<double>(len);
        }
        model.history.push_back(epoch_loss / static_cast<double>(order.size()));
    }
    return model;
}

/// Argmax class; ties go to the smaller index.
inline int argmax3(std::span<const double> p) {
    int best = 0;
    for (int k = 1; k < static_cast<int>(p.size()); ++k)
        if (p[static_cast<std::size_t>(k)] > p[static_cast<std::size_t>(best)]) best = k;
    return best;
}

inline std::vector<int> predict(const Model& m, const NetData& data) {
    Workspace ws(m);
    std::vector<int> out(data.rows());
    for (std::size_t i = 0; i < data.rows(); ++i) out[i] = argmax3(forward(m, ws, data.bio_row(i), data.landmark_row(i), false));
    return out;
}

}  // namespace sfl::nn
