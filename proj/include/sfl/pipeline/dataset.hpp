#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sfl/core/error.hpp"
#include "sfl/core/parallel.hpp"
#include "sfl/core/rng.hpp"
#include "sfl/pipeline/features.hpp"
#include "sfl/pipeline/types.hpp"

namespace sfl::pipeline {

struct WindowRange {
    std::size_t begin;
    std::size_t end;  // exclusive
    bool operator==(const WindowRange&) const = default;
};

inline std::vector<WindowRange> extract_windows(std::size_t series_length, const WindowSpec& spec) {
    validate(spec);
    std::vector<WindowRange> out;
    if (series_length < spec.length) return out;
    const std::size_t count = (series_length - spec.length) / spec.step + 1;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back({i * spec.step, i * spec.step + spec.length});
    return out;
}

inline constexpr double kNoStressMax = 6.5;
inline constexpr double kMediumStressMax = 13.0;

/// 0 when the window mean is <= 6.5, 1 when <= 13, else 2.
inline int bin_stress_label(std::span<const double> stress) {
    require(!stress.empty(), ErrorKind::invalid_input, "empty stress window");
    double sum = 0.0;
    for (double s : stress) {
        require(std::isfinite(s) && s >= 0.0 && s <= kStressMax, ErrorKind::invalid_input,
                "stress value outside [0, 19]");
        sum += s;
    }
    const double m = sum / static_cast<double>(stress.size());
    if (m <= kNoStressMax) return 0;
    if (m <= kMediumStressMax) return 1;
    return 2;
}

namespace detail {

inline void normalize_groups(Matrix& m, const std::vector<std::vector<std::size_t>>& groups) {
    for (const auto& rows : groups)
        for (std::size_t c = 0; c < m.cols(); ++c) {
            double lo = std::numeric_limits<double>::infinity();
            double hi = -lo;
            for (auto r : rows) {
                lo = std::min(lo, m(r, c));
                hi = std::max(hi, m(r, c));
            }
            const double span = hi - lo;
            for (auto r : rows) m(r, c) = span > 0.0 ? (m(r, c) - lo) / span : 0.0;
        }
}

}  // namespace detail

/// Row indices per subject, subjects in sorted id order.
inline std::vector<std::pair<std::string, std::vector<std::size_t>>> rows_by_subject(
    const std::vector<std::string>& subject_ids) {
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < subject_ids.size(); ++i) groups[subject_ids[i]].push_back(i);
    return {groups.begin(), groups.end()};
}

/// Min-max scaling of every feature column within each subject; constant columns map to 0.
inline LabeledDataset normalize_per_subject(LabeledDataset d) {
    validate(d);
    std::vector<std::vector<std::size_t>> groups;
    for (auto& g : rows_by_subject(d.subject_ids)) groups.push_back(std::move(g.second));
    detail::normalize_groups(d.bio.values, groups);
    detail::normalize_groups(d.landmarks.values, groups);
    return d;
}

/// Surviving row indices (ascending) after down-sampling each class to the minority count.
inline std::vector<std::size_t> balanced_indices(std::span<const int> labels, std::span<const std::size_t> candidates,
                                                 std::uint64_t seed) {
    std::array<std::vector<std::size_t>, 3> by_class;
    for (auto i : candidates) by_class[static_cast<std::size_t>(labels[i])].push_back(i);
    for (int c = 0; c < 3; ++c)
        require(!by_class[c].empty(), ErrorKind::invalid_input,
                "class " + std::to_string(c) + " is absent; cannot balance");
    const std::size_t minority =
        std::min({by_class[0].size(), by_class[1].size(), by_class[2].size()});
    RngStream rng(seed, 0);
    std::vector<std::size_t> keep;
    keep.reserve(3 * minority);
    for (auto& members : by_class) {
        if (members.size() > minority) {
            rng.shuffle(std::span<std::size_t>(members));
            members.resize(minority);
        }
        keep.insert(keep.end(), members.begin(), members.end());
    }
    std::sort(keep.begin(), keep.end());
    return keep;
}

inline LabeledDataset balance_classes(const LabeledDataset& d, std::uint64_t seed) {
    validate(d);
    const auto all = iota_indices(d.rows());
    return d.select(balanced_indices(d.labels, all, seed));
}

/// pooled: balance the whole dataset before LOSO (the published order).
/// train_fold: leave the dataset unbalanced and balance each fold's training rows.
enum class BalanceMode { pooled, train_fold };

inline const char* balance_mode_name(BalanceMode m) noexcept { return m == BalanceMode::pooled ? "pooled" : "train_fold"; }

/// Windows and features of one recording, before normalization.
inline LabeledDataset recording_windows(const RawRecording& r, const WindowSpec& spec) {
    validate(r);
    const auto windows = extract_windows(r.samples(), spec);
    LabeledDataset d;
    d.bio.names = feature_names(r.bio_channels, Catalog::bio);
    d.bio.modality = Modality::bio;
    d.landmarks.names = feature_names(landmark_channel_names(), Catalog::landmarks);
    d.landmarks.modality = Modality::landmarks;
    d.bio.values = Matrix(windows.size(), d.bio.names.size());
    d.landmarks.values = Matrix(windows.size(), d.landmarks.names.size());
    for (std::size_t w = 0; w < windows.size(); ++w) {
        const auto [b, e] = windows[w];
        window_features(r.bio, b, e, Catalog::bio, d.bio.values.row(w));
        window_features(r.landmarks, b, e, Catalog::landmarks, d.landmarks.values.row(w));
        d.labels.push_back(bin_stress_label(std::span<const double>(r.stress).subspan(b, e - b)));
        d.subject_ids.push_back(r.subject_id);
        d.window_start.push_back(r.t[b]);
    }
    return d;
}

/// Row-wise concatenation; feature names must agree.
inline LabeledDataset concat_rows(const std::vector<LabeledDataset>& parts) {
    LabeledDataset out;
    if (parts.empty()) return out;
    out.bio.names = parts.front().bio.names;
    out.landmarks.names = parts.front().landmarks.names;
    out.landmarks.modality = Modality::landmarks;
    std::size_t n = 0;
    for (const auto& p : parts) {
        require(p.bio.names == out.bio.names && p.landmarks.names == out.landmarks.names, ErrorKind::invalid_input,
                "recordings disagree on channel layout");
        n += p.rows();
    }
    out.bio.values = Matrix(n, out.bio.names.size());
    out.landmarks.values = Matrix(n, out.landmarks.names.size());
    std::size_t at = 0;
    for (const auto& p : parts) {
        for (std::size_t i = 0; i < p.rows(); ++i, ++at) {
            std::copy_n(p.bio.values.row(i).begin(), out.bio.values.cols(), out.bio.values.row(at).begin());
            std::copy_n(p.landmarks.values.row(i).begin(), out.landmarks.values.cols(),
                        out.landmarks.values.row(at).begin());
        }
        out.labels.insert(out.labels.end(), p.labels.begin(), p.labels.end());
        out.subject_ids.insert(out.subject_ids.end(), p.subject_ids.begin(), p.subject_ids.end());
        out.window_start.insert(out.window_start.end(), p.window_start.begin(), p.window_start.end());
    }
    return out;
}

/// Windows → features → labels → per-subject normalization → balancing.
inline LabeledDataset assemble_dataset(const std::vector<RawRecording>& recordings, const WindowSpec& spec,
                                       std::uint64_t seed, BalanceMode mode = BalanceMode::pooled,
                                       std::size_t jobs = 1) {
    validate(spec);
    std::vector<LabeledDataset> parts(recordings.size());
    parallel_for(recordings.size(), jobs, [&](std::size_t i) { parts[i] = recording_windows(recordings[i], spec); });
    auto d = concat_rows(parts);
    require(d.rows() > 0, ErrorKind::empty_dataset,
            "no complete windows: every recording is shorter than the window length");
    d = normalize_per_subject(std::move(d));
    if (mode == BalanceMode::pooled) d = balance_classes(d, seed);
    return d;
}

}  // namespace sfl::pipeline
