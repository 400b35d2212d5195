#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "sfl/core/error.hpp"

namespace sfl::eval {

/// Accuracy plus macro-averaged precision, recall and F1 over the 3 classes.
struct Metrics {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::array<double, 3> class_f1{};

    bool operator==(const Metrics&) const = default;
};

using Confusion = std::array<std::array<std::size_t, 3>, 3>;  // [true][pred]

inline Confusion confusion(std::span<const int> y_true, std::span<const int> y_pred) {
    require(y_true.size() == y_pred.size(), ErrorKind::invalid_input, "label vectors differ in length");
    Confusion c{};
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        require(y_true[i] >= 0 && y_true[i] <= 2 && y_pred[i] >= 0 && y_pred[i] <= 2, ErrorKind::invalid_input,
                "labels must lie in {0,1,2}");
        ++c[static_cast<std::size_t>(y_true[i])][static_cast<std::size_t>(y_pred[i])];
    }
    return c;
}

/// Per-class 0/0 ratios are defined as 0.
inline Metrics compute_metrics(std::span<const int> y_true, std::span<const int> y_pred) {
    require(!y_true.empty(), ErrorKind::invalid_input, "metrics need at least one prediction");
    const auto c = confusion(y_true, y_pred);
    Metrics m;
    std::size_t hits = 0;
    for (std::size_t k = 0; k < 3; ++k) {
        hits += c[k][k];
        std::size_t predicted = 0;
        std::size_t actual = 0;
        for (std::size_t j = 0; j < 3; ++j) {
            predicted += c[j][k];
            actual += c[k][j];
        }
        const double p = predicted ? static_cast<double>(c[k][k]) / static_cast<double>(predicted) : 0.0;
        const double r = actual ? static_cast<double>(c[k][k]) / static_cast<double>(actual) : 0.0;
        const double f = p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
        m.precision += p / 3.0;
        m.recall += r / 3.0;
        m.class_f1[k] = f;
        m.f1 += f / 3.0;
    }
    m.accuracy = static_cast<double>(hits) / static_cast<double>(y_true.size());
    return m;
}

/// Unweighted mean over folds.
inline Metrics mean_metrics(std::span<const Metrics> folds) {
    Metrics m;
    if (folds.empty()) return m;
    const double n = static_cast<double>(folds.size());
    for (const auto& f : folds) {
        m.accuracy += f.accuracy / n;
        m.precision += f.precision / n;
        m.recall += f.recall / n;
        m.f1 += f.f1 / n;
        for (std::size_t k = 0; k < 3; ++k) m.class_f1[k] += f.class_f1[k] / n;
    }
    return m;
}

}  // namespace sfl::eval
