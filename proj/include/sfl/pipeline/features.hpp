#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "sfl/core/error.hpp"
#include "sfl/core/matrix.hpp"
#include "sfl/pipeline/types.hpp"

namespace sfl::pipeline {

enum class Catalog { bio, landmarks };

inline constexpr std::array<const char*, 14> kTimeFeatures = {
    "mean", "std", "min", "max", "median", "range", "iqr", "skewness", "kurtosis",
    "rms", "mean_abs_diff", "zero_crossings", "energy", "line_length"};

inline constexpr std::array<const char*, 11> kFrequencyFeatures = {
    "spectral_power", "spectral_entropy", "dominant_freq_index", "dominant_power_share", "spectral_centroid",
    "spectral_spread", "band_power_0", "band_power_1", "band_power_2", "band_power_3", "band_power_4"};

inline constexpr std::size_t kBands = 5;

inline std::size_t catalog_size(Catalog c) noexcept {
    return kTimeFeatures.size() + (c == Catalog::bio ? kFrequencyFeatures.size() : 0);
}

inline std::vector<std::string> catalog_names(Catalog c) {
    std::vector<std::string> names(kTimeFeatures.begin(), kTimeFeatures.end());
    if (c == Catalog::bio) names.insert(names.end(), kFrequencyFeatures.begin(), kFrequencyFeatures.end());
    return names;
}

inline std::vector<std::string> feature_names(const std::vector<std::string>& channels, Catalog c) {
    const auto cat = catalog_names(c);
    std::vector<std::string> out;
    out.reserve(channels.size() * cat.size());
    for (const auto& ch : channels)
        for (const auto& f : cat) out.push_back(ch + "." + f);
    return out;
}

namespace detail {

// Linear-interpolated quantile of sorted data (the common "type 7" rule).
inline double quantile_sorted(const std::vector<double>& s, double p) {
    const double h = static_cast<double>(s.size() - 1) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, s.size() - 1);
    return s[lo] + (h - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

// A window counts as flat when its spread is at rounding level; shape
// statistics of flat windows are 0 instead of amplified rounding noise.
inline bool is_flat(double lo, double hi) {
    return hi - lo <= 1e-12 * std::max({1.0, std::abs(lo), std::abs(hi)});
}

inline void time_features(std::span<const double> x, double* out) {
    const std::size_t n = x.size();
    const double nd = static_cast<double>(n);
    double sum = 0.0;
    double sq = 0.0;
    double lo = x[0];
    double hi = x[0];
    for (double v : x) {
        sum += v;
        sq += v * v;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double mean = sum / nd;
    const bool flat = is_flat(lo, hi);
    double m2 = 0.0;
    double m3 = 0.0;
    double m4 = 0.0;
    for (double v : x) {
        const double c = v - mean;
        m2 += c * c;
        m3 += c * c * c;
        m4 += c * c * c * c;
    }
    m2 /= nd;
    m3 /= nd;
    m4 /= nd;
    std::vector<double> sorted(x.begin(), x.end());
    std::sort(sorted.begin(), sorted.end());
    double abs_diff = 0.0;
    for (std::size_t i = 1; i < n; ++i) abs_diff += std::abs(x[i] - x[i - 1]);
    std::size_t crossings = 0;
    if (!flat) {
        int prev = 0;
        for (double v : x) {
            const double c = v - mean;
            const int s = c > 0.0 ? 1 : (c < 0.0 ? -1 : 0);
            if (s != 0) {
                if (prev != 0 && s != prev) ++crossings;
                prev = s;
            }
        }
    }
    out[0] = mean;
    out[1] = std::sqrt(m2);
    out[2] = lo;
    out[3] = hi;
    out[4] = quantile_sorted(sorted, 0.5);
    out[5] = hi - lo;
    out[6] = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
    out[7] = flat || m2 == 0.0 ? 0.0 : m3 / std::pow(m2, 1.5);
    out[8] = flat || m2 == 0.0 ? 0.0 : m4 / (m2 * m2) - 3.0;
    out[9] = std::sqrt(sq / nd);
    out[10] = abs_diff / static_cast<double>(n - 1);
    out[11] = static_cast<double>(crossings);
    out[12] = sq / nd;
    out[13] = abs_diff;
}

// One-sided power spectrum of the mean-removed window via a direct DFT:
// P_k = |X_k|^2 / n at f_k = k/n Hz for k = 1..n/2 (DC is zero after centering).
inline void frequency_features(std::span<const double> x, double* out) {
    std::fill(out, out + kFrequencyFeatures.size(), 0.0);
    const std::size_t n = x.size();
    const double lo = *std::min_element(x.begin(), x.end());
    const double hi = *std::max_element(x.begin(), x.end());
    if (is_flat(lo, hi)) return;
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
    const std::size_t half = n / 2;
    std::vector<double> power(half + 1, 0.0);
    const double w = 2.0 * std::numbers::pi / static_cast<double>(n);
    for (std::size_t k = 1; k <= half; ++k) {
        double re = 0.0;
        double im = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            // (k·t) mod n keeps the angle small and the result exact for integer phases.
            const double a = w * static_cast<double>((k * t) % n);
            re += (x[t] - mean) * std::cos(a);
            im -= (x[t] - mean) * std::sin(a);
        }
        power[k] = (re * re + im * im) / static_cast<double>(n);
    }
    double total = 0.0;
    std::size_t dominant = 1;
    for (std::size_t k = 1; k <= half; ++k) {
        total += power[k];
        if (power[k] > power[dominant]) dominant = k;
    }
    if (total <= 0.0) return;
    double entropy = 0.0;
    double centroid = 0.0;
    for (std::size_t k = 1; k <= half; ++k) {
        const double p = power[k] / total;
        if (p > 0.0) entropy -= p * std::log2(p);
        centroid += p * static_cast<double>(k) / static_cast<double>(n);
    }
    double spread = 0.0;
    for (std::size_t k = 1; k <= half; ++k) {
        const double f = static_cast<double>(k) / static_cast<double>(n) - centroid;
        spread += power[k] / total * f * f;
    }
    out[0] = total;
    out[1] = half > 1 ? entropy / std::log2(static_cast<double>(half)) : 0.0;
    out[2] = static_cast<double>(dominant);
    out[3] = power[dominant] / total;
    out[4] = centroid;
    out[5] = std::sqrt(spread);
    for (std::size_t k = 1; k <= half; ++k) {
        // Band b covers [0.1·b, 0.1·(b+1)) Hz; integer arithmetic keeps f = 0.1·b on the boundary exact.
        const std::size_t band = std::min<std::size_t>(kBands - 1, (2 * kBands * k) / n);
        out[6 + band] += power[k];
    }
}

}  // namespace detail

/// Features of one channel window in catalog order.
inline std::vector<double> compute_channel_features(std::span<const double> window, Catalog catalog) {
    require(window.size() >= 2, ErrorKind::invalid_argument, "feature window needs at least 2 samples");
    require(all_finite(window), ErrorKind::invalid_input, "feature window contains non-finite values");
    std::vector<double> out(catalog_size(catalog));
    detail::time_features(window, out.data());
    if (catalog == Catalog::bio) detail::frequency_features(window, out.data() + kTimeFeatures.size());
    return out;
}

/// Feature row for samples [begin, end) of every column of `channels`, channel-major.
inline void window_features(const Matrix& channels, std::size_t begin, std::size_t end, Catalog catalog,
                            std::span<double> out) {
    const std::size_t per = catalog_size(catalog);
    std::vector<double> buf(end - begin);
    for (std::size_t c = 0; c < channels.cols(); ++c) {
        for (std::size_t t = begin; t < end; ++t) buf[t - begin] = channels(t, c);
        const auto f = compute_channel_features(buf, catalog);
        std::copy(f.begin(), f.end(), out.begin() + static_cast<std::ptrdiff_t>(c * per));
    }
}

}  // namespace sfl::pipeline
