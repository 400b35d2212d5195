#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "sfl/core/error.hpp"
#include "sfl/core/matrix.hpp"

namespace sfl::pipeline {

inline constexpr std::size_t kLandmarkPoints = 68;
inline constexpr std::size_t kLandmarkCoords = 2 * kLandmarkPoints;
inline constexpr double kStressMax = 19.0;

inline std::vector<std::string> default_bio_channels() {
    return {"hr", "eda", "temp", "bvp", "acc_x", "acc_y", "acc_z"};
}

/// Landmark coordinate names in CSV order: all x first, then all y.
inline std::vector<std::string> landmark_channel_names() {
    std::vector<std::string> names;
    names.reserve(kLandmarkCoords);
    for (std::size_t i = 0; i < kLandmarkPoints; ++i) names.push_back("lm_x_" + std::to_string(i));
    for (std::size_t i = 0; i < kLandmarkPoints; ++i) names.push_back("lm_y_" + std::to_string(i));
    return names;
}

/// One subject's 1 Hz recording. Channels are matrix columns, samples rows.
struct RawRecording {
    std::string subject_id;
    double sample_rate = 1.0;
    std::vector<double> t;
    std::vector<std::string> bio_channels;
    Matrix bio;        // samples × bio channels
    Matrix landmarks;  // samples × 136 (lm_x_0..67, lm_y_0..67), pixels
    std::vector<double> stress;

    std::size_t samples() const noexcept { return stress.size(); }
};

inline void validate(const RawRecording& r) {
    const std::string who = "subject '" + r.subject_id + "': ";
    require(r.sample_rate == 1.0, ErrorKind::invalid_input, who + "sample rate must be 1 Hz");
    const std::size_t n = r.stress.size();
    require(r.t.size() == n && r.bio.rows() == n && r.landmarks.rows() == n, ErrorKind::invalid_input,
            who + "sequences differ in length");
    require(r.bio.cols() == r.bio_channels.size(), ErrorKind::invalid_input, who + "bio channel names do not match data");
    require(r.landmarks.cols() == kLandmarkCoords, ErrorKind::invalid_input,
            who + "landmark frames must carry 136 coordinates");
    for (std::size_t i = 0; i < n; ++i)
        require(std::isfinite(r.stress[i]) && r.stress[i] >= 0.0 && r.stress[i] <= kStressMax, ErrorKind::invalid_input,
                who + "stress out of [0, 19] at sample " + std::to_string(i));
    require_finite(r.bio, who + "bio");
    require_finite(r.landmarks, who + "landmarks");
}

struct WindowSpec {
    std::size_t length = 20;
    std::size_t step = 10;

    bool operator==(const WindowSpec&) const = default;
};

inline void validate(const WindowSpec& w) {
    require(w.step > 0 && w.step <= w.length, ErrorKind::invalid_argument, "window spec needs 0 < step <= length");
}

enum class Modality { bio, landmarks };

inline const char* modality_name(Modality m) noexcept { return m == Modality::bio ? "bio" : "landmarks"; }

struct FeatureMatrix {
    std::vector<std::string> names;  // <channel>.<feature>
    Matrix values;
    Modality modality = Modality::bio;
};

struct LabeledDataset {
    FeatureMatrix bio;
    FeatureMatrix landmarks;
    std::vector<int> labels;
    std::vector<std::string> subject_ids;
    std::vector<double> window_start;

    std::size_t rows() const noexcept { return labels.size(); }

    LabeledDataset select(std::span<const std::size_t> idx) const {
        LabeledDataset out;
        out.bio = {bio.names, bio.values.select_rows(idx), Modality::bio};
        out.landmarks = {landmarks.names, landmarks.values.select_rows(idx), Modality::landmarks};
        for (auto i : idx) {
            out.labels.push_back(labels[i]);
            out.subject_ids.push_back(subject_ids[i]);
            out.window_start.push_back(window_start[i]);
        }
        return out;
    }
};

inline void validate(const LabeledDataset& d) {
    const std::size_t n = d.labels.size();
    require(d.subject_ids.size() == n && d.window_start.size() == n && d.bio.values.rows() == n &&
                d.landmarks.values.rows() == n,
            ErrorKind::invalid_input, "dataset columns are not row-aligned");
    require(d.bio.names.size() == d.bio.values.cols() && d.landmarks.names.size() == d.landmarks.values.cols(),
            ErrorKind::invalid_input, "feature names do not match feature columns");
    for (std::size_t i = 0; i < n; ++i)
        require(d.labels[i] >= 0 && d.labels[i] <= 2, ErrorKind::invalid_input,
                "label outside {0,1,2} at row " + std::to_string(i));
}

}  // namespace sfl::pipeline
