#pragma once

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "sfl/core/csv.hpp"
#include "sfl/core/error.hpp"
#include "sfl/pipeline/types.hpp"

namespace sfl::pipeline {

namespace fs = std::filesystem;

/// CSV columns: t, bio channels, lm_x_0..67, lm_y_0..67, stress.
inline std::vector<std::string> recording_header(const std::vector<std::string>& bio_channels) {
    std::vector<std::string> h{"t"};
    h.insert(h.end(), bio_channels.begin(), bio_channels.end());
    const auto lm = landmark_channel_names();
    h.insert(h.end(), lm.begin(), lm.end());
    h.push_back("stress");
    return h;
}

inline std::string recording_csv(const RawRecording& r) {
    validate(r);
    const auto header = recording_header(r.bio_channels);
    Matrix m(r.samples(), header.size());
    for (std::size_t i = 0; i < r.samples(); ++i) {
        std::size_t c = 0;
        m(i, c++) = r.t[i];
        for (std::size_t j = 0; j < r.bio.cols(); ++j) m(i, c++) = r.bio(i, j);
        for (std::size_t j = 0; j < kLandmarkCoords; ++j) m(i, c++) = r.landmarks(i, j);
        m(i, c) = r.stress[i];
    }
    return csv::write_matrix(header, m);
}

/// Parses one subject's CSV. Non-finite cells are rejected with their
/// coordinates; `t` must advance by exactly one second per row.
inline RawRecording parse_recording(std::string_view text, const std::string& subject_id,
                                    const std::vector<std::string>& bio_channels) {
    std::vector<std::string> header;
    Matrix m;
    try {
        m = csv::read_matrix(text, &header);
    } catch (const Error& e) {
        fail(e.kind(), "subject '" + subject_id + "': " + e.what());
    }
    const auto expected = recording_header(bio_channels);
    require(header == expected, ErrorKind::invalid_input,
            "subject '" + subject_id + "': header does not match t, bio channels, lm_x_*, lm_y_*, stress");
    RawRecording r;
    r.subject_id = subject_id;
    r.bio_channels = bio_channels;
    const std::size_t n = m.rows();
    r.t.resize(n);
    r.stress.resize(n);
    r.bio = Matrix(n, bio_channels.size());
    r.landmarks = Matrix(n, kLandmarkCoords);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t c = 0;
        r.t[i] = m(i, c++);
        for (std::size_t j = 0; j < bio_channels.size(); ++j) r.bio(i, j) = m(i, c++);
        for (std::size_t j = 0; j < kLandmarkCoords; ++j) r.landmarks(i, j) = m(i, c++);
        r.stress[i] = m(i, c);
        if (i > 0)
            require(std::abs(r.t[i] - r.t[i - 1] - 1.0) <= 1e-9, ErrorKind::invalid_input,
                    "subject '" + subject_id + "': t must step by 1 s (1 Hz), row " + std::to_string(i + 1));
    }
    validate(r);
    return r;
}

struct ManifestEntry {
    std::string id;
    std::string file;
};

struct Manifest {
    std::vector<std::string> bio_channels = default_bio_channels();
    std::vector<ManifestEntry> subjects;
};

inline std::string manifest_json(const Manifest& m) {
    nlohmann::ordered_json j;
    j["sample_rate"] = 1;
    j["bio_channels"] = m.bio_channels;
    j["subjects"] = nlohmann::ordered_json::array();
    for (const auto& s : m.subjects) j["subjects"].push_back({{"id", s.id}, {"file", s.file}});
    return j.dump(2) + "\n";
}

inline Manifest parse_manifest(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::invalid_input, std::string("manifest is not valid JSON: ") + e.what());
    }
    Manifest m;
    try {
        if (j.contains("sample_rate"))
            require(j.at("sample_rate").get<double>() == 1.0, ErrorKind::invalid_input, "manifest sample_rate must be 1");
        if (j.contains("bio_channels")) m.bio_channels = j.at("bio_channels").get<std::vector<std::string>>();
        for (const auto& s : j.at("subjects")) m.subjects.push_back({s.at("id").get<std::string>(), s.at("file").get<std::string>()});
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::invalid_input, std::string("manifest: ") + e.what());
    }
    require(!m.subjects.empty(), ErrorKind::invalid_input, "manifest lists no subjects");
    return m;
}

/// Loads every subject listed in a manifest; file paths are relative to the manifest.
inline std::vector<RawRecording> load_manifest(const fs::path& manifest_path) {
    const auto m = parse_manifest(csv::read_file(manifest_path));
    std::vector<RawRecording> out;
    for (const auto& s : m.subjects)
        out.push_back(parse_recording(csv::read_file(manifest_path.parent_path() / s.file), s.id, m.bio_channels));
    return out;
}

/// Writes <dir>/<id>.csv per subject plus <dir>/manifest.json.
inline void write_recordings(const fs::path& dir, const std::vector<RawRecording>& recs) {
    require(!recs.empty(), ErrorKind::invalid_input, "no recordings to write");
    Manifest m;
    m.bio_channels = recs.front().bio_channels;
    for (const auto& r : recs) {
        require(r.bio_channels == m.bio_channels, ErrorKind::invalid_input, "recordings disagree on bio channels");
        csv::write_file_atomic(dir / (r.subject_id + ".csv"), recording_csv(r));
        m.subjects.push_back({r.subject_id, r.subject_id + ".csv"});
    }
    csv::write_file_atomic(dir / "manifest.json", manifest_json(m));
}

inline constexpr const char* kBioFeaturesFile = "bio_features.csv";
inline constexpr const char* kLandmarkFeaturesFile = "landmark_features.csv";
inline constexpr const char* kLabelsFile = "labels.csv";

inline std::string labels_csv(const LabeledDataset& d) {
    std::vector<std::vector<std::string>> rows;
    rows.reserve(d.rows());
    for (std::size_t i = 0; i < d.rows(); ++i)
        rows.push_back({std::to_string(d.labels[i]), d.subject_ids[i], csv::format_double(d.window_start[i])});
    return csv::write({"label", "subject", "window_start"}, rows);
}

/// Dataset archive: three row-aligned CSVs.
inline void write_dataset(const fs::path& dir, const LabeledDataset& d) {
    validate(d);
    csv::write_file_atomic(dir / kBioFeaturesFile, csv::write_matrix(d.bio.names, d.bio.values));
    csv::write_file_atomic(dir / kLandmarkFeaturesFile, csv::write_matrix(d.landmarks.names, d.landmarks.values));
    csv::write_file_atomic(dir / kLabelsFile, labels_csv(d));
}

inline LabeledDataset read_dataset(const fs::path& dir) {
    LabeledDataset d;
    d.bio.modality = Modality::bio;
    d.landmarks.modality = Modality::landmarks;
    d.bio.values = csv::read_matrix(csv::read_file(dir / kBioFeaturesFile), &d.bio.names);
    d.landmarks.values = csv::read_matrix(csv::read_file(dir / kLandmarkFeaturesFile), &d.landmarks.names);
    const auto t = csv::parse(csv::read_file(dir / kLabelsFile));
    require(t.header == std::vector<std::string>{"label", "subject", "window_start"}, ErrorKind::invalid_input,
            "labels.csv header must be label,subject,window_start");
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const double label = csv::parse_double(t.rows[r][0], r + 1, 0);
        require(label == 0.0 || label == 1.0 || label == 2.0, ErrorKind::invalid_input,
                "label outside {0,1,2} at row " + std::to_string(r + 1));
        d.labels.push_back(static_cast<int>(label));
        d.subject_ids.push_back(t.rows[r][1]);
        d.window_start.push_back(csv::parse_double(t.rows[r][2], r + 1, 2));
    }
    validate(d);
    return d;
}

}  // namespace sfl::pipeline
