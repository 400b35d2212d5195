#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "sfl/core/error.hpp"
#include "sfl/core/matrix.hpp"
#include "sfl/core/rng.hpp"
#include "sfl/pipeline/types.hpp"

namespace sfl::synth {

struct SynthStressSpec {
    std::size_t subjects = 8;
    std::size_t samples_per_subject = 600;
    double separation = 2.0;  // class shift in units of each channel's scale
    double noise = 0.1;       // per-sample Gaussian std, same units (1 px for landmarks)
    std::uint64_t seed = 42;

    bool operator==(const SynthStressSpec&) const = default;
};

inline void validate(const SynthStressSpec& s) {
    require(s.subjects >= 1, ErrorKind::invalid_argument, "synth needs at least one subject");
    require(s.samples_per_subject >= 20, ErrorKind::invalid_argument, "samples_per_subject must cover one window (20)");
    require(std::isfinite(s.separation) && s.separation >= 0.0, ErrorKind::invalid_argument, "separation must be >= 0");
    require(std::isfinite(s.noise) && s.noise >= 0.0, ErrorKind::invalid_argument, "noise must be >= 0");
}

/// Stress level at the middle of each label bin.
inline constexpr std::array<double, 3> kStateCenters = {3.0, 10.0, 16.5};
inline constexpr std::size_t kMinDwell = 100;
inline constexpr std::size_t kMaxDwell = 200;

// The modalities are deliberately complementary: bio separates calm from
// stressed, landmarks separate high stress from the rest. Only fusion sees all three classes.
inline constexpr std::array<double, 3> kBioPattern = {0.0, 1.0, 1.0};
inline constexpr std::array<double, 3> kLandmarkPattern = {0.0, 0.0, 1.0};

struct BioChannelModel {
    const char* name;
    double base;
    double scale;
    double direction;
    double period;  // seconds
};

inline constexpr std::array<BioChannelModel, 7> kBioModels = {{
    {"hr", 72.0, 6.0, 1.0, 11.0},
    {"eda", 2.0, 0.4, 1.0, 17.0},
    {"temp", 33.5, 0.3, -1.0, 29.0},
    {"bvp", 0.0, 25.0, 1.0, 5.0},
    {"acc_x", 0.0, 0.05, 1.0, 7.0},
    {"acc_y", 0.0, 0.05, -1.0, 9.0},
    {"acc_z", 1.0, 0.05, 1.0, 13.0},
}};

/// Neutral 68-point face in the unit square (x right, y down), iBUG ordering:
/// jaw 0-16, brows 17-26, nose 27-35, eyes 36-47, mouth 48-67.
inline std::array<std::array<double, 2>, 68> face_template() {
    std::array<std::array<double, 2>, 68> p{};
    const double pi = std::numbers::pi;
    for (int i = 0; i <= 16; ++i) {
        const double a = pi - pi * i / 16.0;
        p[i] = {0.5 + 0.45 * std::cos(a), 0.35 + 0.6 * std::sin(a)};
    }
    for (int i = 0; i < 5; ++i) {
        const double bump = std::sin(pi * i / 4.0);
        p[17 + i] = {0.15 + 0.27 * i / 4.0, 0.28 - 0.04 * bump};
        p[22 + i] = {0.58 + 0.27 * i / 4.0, 0.28 - 0.04 * bump};
    }
    for (int i = 0; i < 4; ++i) p[27 + i] = {0.5, 0.35 + 0.25 * i / 3.0};
    for (int i = 0; i < 5; ++i) p[31 + i] = {0.42 + 0.16 * i / 4.0, 0.65};
    for (int i = 0; i < 6; ++i) {
        const double a = pi - 2.0 * pi * i / 6.0;
        p[36 + i] = {0.3 + 0.08 * std::cos(a), 0.4 - 0.03 * std::sin(a)};
        p[42 + i] = {0.7 + 0.08 * std::cos(a), 0.4 - 0.03 * std::sin(a)};
    }
    for (int i = 0; i < 12; ++i) {
        const double a = pi - 2.0 * pi * i / 12.0;
        p[48 + i] = {0.5 + 0.15 * std::cos(a), 0.8 - 0.06 * std::sin(a)};
    }
    for (int i = 0; i < 8; ++i) {
        const double a = pi - 2.0 * pi * i / 8.0;
        p[60 + i] = {0.5 + 0.1 * std::cos(a), 0.8 - 0.03 * std::sin(a)};
    }
    return p;
}

/// Expression displacement at full pattern strength, in face units: brows
/// lowered and drawn in, eyes narrowed, mouth compressed with corners down,
/// head slightly lowered.
inline std::array<double, 2> expression_offset(std::size_t point, const std::array<double, 2>& at) {
    double dx = 0.0;
    double dy = 0.01;
    if (point >= 17 && point <= 26) {
        dy += 0.03;
        dx += at[0] < 0.5 ? 0.02 : -0.02;
    } else if (point >= 36 && point <= 47) {
        const double cy = 0.4;
        dy += 0.3 * (cy - at[1]);
    } else if (point >= 48) {
        const double cy = 0.8;
        dy += 0.4 * (cy - at[1]);
        if (point == 48 || point == 54 || point == 60 || point == 64) dy += 0.02;
    }
    return {dx, dy};
}

/// Latent state per sample: the first three dwells visit every state once in a
/// random order, later dwells move to one of the other two states.
inline std::vector<int> latent_states(std::size_t samples, RngStream& rng) {
    std::array<int, 3> order = {0, 1, 2};
    rng.shuffle(std::span<int>(order));
    std::vector<int> states;
    states.reserve(samples);
    int state = order[0];
    for (std::size_t seg = 0; states.size() < samples; ++seg) {
        if (seg > 0) state = seg < 3 ? order[seg] : (state + 1 + static_cast<int>(rng.below(2))) % 3;
        const std::size_t dwell = kMinDwell + static_cast<std::size_t>(rng.below(kMaxDwell - kMinDwell + 1));
        for (std::size_t i = 0; i < dwell && states.size() < samples; ++i) states.push_back(state);
    }
    return states;
}

inline std::string subject_name(std::size_t s) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "s%02zu", s + 1);
    return buf;
}

/// Deterministic multimodal recordings, one per subject; subject s draws from RngStream(seed, s).
inline std::vector<pipeline::RawRecording> gen_multimodal_stress(const SynthStressSpec& spec) {
    validate(spec);
    const auto face = face_template();
    const double two_pi = 2.0 * std::numbers::pi;
    std::vector<pipeline::RawRecording> out;
    out.reserve(spec.subjects);
    for (std::size_t s = 0; s < spec.subjects; ++s) {
        RngStream rng(spec.seed, s);
        const std::size_t n = spec.samples_per_subject;
        pipeline::RawRecording r;
        r.subject_id = subject_name(s);
        for (const auto& m : kBioModels) r.bio_channels.push_back(m.name);
        r.bio = Matrix(n, kBioModels.size());
        r.landmarks = Matrix(n, pipeline::kLandmarkCoords);
        r.t.resize(n);
        r.stress.resize(n);
        const auto states = latent_states(n, rng);

        std::array<double, kBioModels.size()> offset{};
        std::array<double, kBioModels.size()> phase{};
        for (std::size_t c = 0; c < kBioModels.size(); ++c) {
            offset[c] = kBioModels[c].scale * rng.uniform(-1.0, 1.0);
            phase[c] = two_pi * rng.uniform01();
        }
        const double face_px = 200.0 * (1.0 + 0.1 * rng.uniform(-1.0, 1.0));
        const double face_x0 = 220.0 + 30.0 * rng.uniform(-1.0, 1.0);
        const double face_y0 = 140.0 + 30.0 * rng.uniform(-1.0, 1.0);
        const double motion_phase = two_pi * rng.uniform01();

        for (std::size_t i = 0; i < n; ++i) {
            const int k = states[i];
            const double ti = static_cast<double>(i);
            r.t[i] = ti;
            r.stress[i] = std::clamp(kStateCenters[k] + 2.0 * spec.noise * rng.normal(), 0.0, pipeline::kStressMax);
            const double pb = spec.separation * kBioPattern[k];
            for (std::size_t c = 0; c < kBioModels.size(); ++c) {
                const auto& m = kBioModels[c];
                const double wave = 0.3 * (1.0 + pb) * std::sin(two_pi * ti / m.period + phase[c]);
                r.bio(i, c) = m.base + offset[c] + m.scale * (m.direction * pb + wave + spec.noise * rng.normal());
            }
            const double pl = spec.separation * kLandmarkPattern[k];
            const double sway = 0.005 * (1.0 + pl) * std::sin(two_pi * ti / 8.0 + motion_phase);
            for (std::size_t p = 0; p < pipeline::kLandmarkPoints; ++p) {
                const auto d = expression_offset(p, face[p]);
                const double x = face[p][0] + pl * d[0] + sway + 0.005 * spec.noise * rng.normal();
                const double y = face[p][1] + pl * d[1] + sway + 0.005 * spec.noise * rng.normal();
                r.landmarks(i, p) = face_x0 + face_px * x;
                r.landmarks(i, pipeline::kLandmarkPoints + p) = face_y0 + face_px * y;
            }
        }
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace sfl::synth
