#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "sfl/core/csv.hpp"
#include "sfl/core/error.hpp"
#include "sfl/manifold/types.hpp"
#include "sfl/nn/spec.hpp"
#include "sfl/nn/train.hpp"
#include "sfl/pipeline/dataset.hpp"
#include "sfl/synth/stress.hpp"

namespace sfl::app {

using json = nlohmann::ordered_json;

/// DR settings shared by both modalities; neighbors are per method.
struct EmbeddingSettings {
    manifold::Method bio_method = manifold::Method::mds;
    std::size_t bio_components = 20;
    manifold::Method landmark_method = manifold::Method::mds;
    std::size_t landmark_components = 49;
    std::size_t lle_neighbors = 10;
    std::size_t se_neighbors = 5;
    std::size_t iso_neighbors = 10;
    double perplexity = 30.0;
    std::size_t mds_max_iter = 300;
    std::size_t tsne_max_iter = 1000;
    std::size_t n_init = 4;
    double tolerance = 1e-6;
    double lle_regularization = 1e-3;

    bool operator==(const EmbeddingSettings&) const = default;

    manifold::EmbeddingConfig make(manifold::Method m, std::size_t components, std::uint64_t seed, std::size_t jobs) const {
        manifold::EmbeddingConfig c;
        c.method = m;
        c.n_components = components;
        c.n_neighbors = m == manifold::Method::lle ? lle_neighbors : m == manifold::Method::se ? se_neighbors
                      : m == manifold::Method::iso ? iso_neighbors : 0;
        c.perplexity = perplexity;
        c.seed = seed;
        c.max_iter = m == manifold::Method::tsne ? tsne_max_iter : mds_max_iter;
        c.n_init = n_init;
        c.tolerance = tolerance;
        c.lle_regularization = lle_regularization;
        c.jobs = jobs;
        return c;
    }
};

struct ExperimentConfig {
    std::uint64_t seed = 42;
    // Exactly one data source.
    std::optional<synth::SynthStressSpec> synth;
    std::string manifest;
    std::string archive;
    pipeline::WindowSpec window;
    pipeline::BalanceMode balance = pipeline::BalanceMode::pooled;
    EmbeddingSettings embedding;
    nn::Topology topology = nn::Topology::intermediate_fusion;
    bool post_fusion_conv = true;
    nn::FilterConfig filters;
    nn::TrainConfig train;
    std::vector<manifold::Method> bench_methods{std::begin(manifold::all_methods), std::end(manifold::all_methods)};
    std::vector<nn::Topology> bench_topologies{std::begin(nn::all_topologies), std::end(nn::all_topologies)};
    std::string output;

    bool operator==(const ExperimentConfig&) const = default;
};

namespace detail {

[[noreturn]] inline void bad(const std::string& path, const std::string& why) {
    fail(ErrorKind::config, "config " + (path.empty() ? std::string("/") : path) + ": " + why);
}

inline void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) bad(path, "expected an object");
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) bad(path + "/" + key, "unknown key '" + key + "'");
    }
}

inline std::uint64_t get_u64(const json& obj, const char* key, const std::string& path, std::uint64_t fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
        bad(path + "/" + key, "expected a nonnegative integer");
    return v.get<std::uint64_t>();
}

inline std::size_t get_count(const json& obj, const char* key, const std::string& path, std::size_t fallback,
                             std::size_t min = 0) {
    const auto v = get_u64(obj, key, path, fallback);
    if (v < min) bad(path + "/" + key, "must be >= " + std::to_string(min));
    return static_cast<std::size_t>(v);
}

inline double get_real(const json& obj, const char* key, const std::string& path, double fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number()) bad(path + "/" + key, "expected a number");
    return v.get<double>();
}

inline double get_positive(const json& obj, const char* key, const std::string& path, double fallback) {
    const double v = get_real(obj, key, path, fallback);
    if (!(v > 0.0) || !std::isfinite(v)) bad(path + "/" + key, "must be a positive finite number");
    return v;
}

inline std::string get_string(const json& obj, const char* key, const std::string& path, const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj.at(key).is_string()) bad(path + "/" + key, "expected a string");
    return obj.at(key).get<std::string>();
}

inline bool get_bool(const json& obj, const char* key, const std::string& path, bool fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj.at(key).is_boolean()) bad(path + "/" + key, "expected true or false");
    return obj.at(key).get<bool>();
}

template <typename T, typename Parse>
T parse_enum(const json& obj, const char* key, const std::string& path, T fallback, Parse parse) {
    if (!obj.contains(key)) return fallback;
    const auto s = get_string(obj, key, path, "");
    try {
        return parse(s);
    } catch (const Error& e) {
        bad(path + "/" + key, e.what());
    }
}

inline pipeline::BalanceMode parse_balance(const std::string& s) {
    if (s == "pooled") return pipeline::BalanceMode::pooled;
    if (s == "train_fold") return pipeline::BalanceMode::train_fold;
    fail(ErrorKind::invalid_argument, "unknown balance mode '" + s + "' (expected pooled or train_fold)");
}

}  // namespace detail

/// Parses and validates the JSON config; every error names a JSON-pointer path.
inline ExperimentConfig parse_config(std::string_view text) {
    using namespace detail;
    json j;
    try {
        j = json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::config, std::string("config is not valid JSON: ") + e.what());
    }
    check_keys(j, "", {"seed", "synth", "manifest", "archive", "window", "balance", "embedding", "network", "train",
                       "bench", "output"});
    ExperimentConfig c;
    if (!j.contains("seed")) bad("/seed", "seed is mandatory");
    c.seed = get_u64(j, "seed", "", 0);

    int sources = 0;
    if (j.contains("synth")) {
        ++sources;
        const auto& s = j.at("synth");
        check_keys(s, "/synth", {"subjects", "samples_per_subject", "separation", "noise", "seed"});
        synth::SynthStressSpec spec;
        spec.subjects = get_count(s, "subjects", "/synth", spec.subjects, 1);
        spec.samples_per_subject = get_count(s, "samples_per_subject", "/synth", spec.samples_per_subject, 20);
        spec.separation = get_real(s, "separation", "/synth", spec.separation);
        spec.noise = get_real(s, "noise", "/synth", spec.noise);
        spec.seed = get_u64(s, "seed", "/synth", c.seed);
        if (!(spec.separation >= 0.0)) bad("/synth/separation", "must be >= 0");
        if (!(spec.noise >= 0.0)) bad("/synth/noise", "must be >= 0");
        c.synth = spec;
    }
    if (j.contains("manifest")) {
        ++sources;
        c.manifest = get_string(j, "manifest", "", "");
    }
    if (j.contains("archive")) {
        ++sources;
        c.archive = get_string(j, "archive", "", "");
    }
    if (sources != 1) bad("", "exactly one of synth, manifest, archive is required");

    if (j.contains("window")) {
        const auto& w = j.at("window");
        check_keys(w, "/window", {"length", "step"});
        c.window.length = get_count(w, "length", "/window", c.window.length, 2);
        c.window.step = get_count(w, "step", "/window", c.window.step, 1);
        if (c.window.step > c.window.length) bad("/window/step", "must not exceed length");
    }
    c.balance = parse_enum(j, "balance", "", c.balance, parse_balance);

    if (j.contains("embedding")) {
        const auto& e = j.at("embedding");
        const std::string p = "/embedding";
        check_keys(e, p, {"bio", "landmarks", "neighbors", "perplexity", "mds_max_iter", "tsne_max_iter", "n_init",
                          "tolerance", "lle_regularization"});
        auto& s = c.embedding;
        auto modality = [&](const char* key, manifold::Method& method, std::size_t& comps) {
            if (!e.contains(key)) return;
            const auto& m = e.at(key);
            const std::string mp = p + "/" + key;
            check_keys(m, mp, {"method", "n_components"});
            method = parse_enum(m, "method", mp, method, [](const std::string& t) { return manifold::parse_method(t); });
            comps = get_count(m, "n_components", mp, comps, 1);
        };
        modality("bio", s.bio_method, s.bio_components);
        modality("landmarks", s.landmark_method, s.landmark_components);
        if (e.contains("neighbors")) {
            const auto& n = e.at("neighbors");
            check_keys(n, p + "/neighbors", {"LLE", "SE", "ISO"});
            s.lle_neighbors = get_count(n, "LLE", p + "/neighbors", s.lle_neighbors, 1);
            s.se_neighbors = get_count(n, "SE", p + "/neighbors", s.se_neighbors, 1);
            s.iso_neighbors = get_count(n, "ISO", p + "/neighbors", s.iso_neighbors, 1);
        }
        s.perplexity = get_positive(e, "perplexity", p, s.perplexity);
        s.mds_max_iter = get_count(e, "mds_max_iter", p, s.mds_max_iter, 1);
        s.tsne_max_iter = get_count(e, "tsne_max_iter", p, s.tsne_max_iter, 1);
        s.n_init = get_count(e, "n_init", p, s.n_init, 1);
        s.tolerance = get_positive(e, "tolerance", p, s.tolerance);
        s.lle_regularization = get_positive(e, "lle_regularization", p, s.lle_regularization);
    }

    if (j.contains("network")) {
        const auto& n = j.at("network");
        check_keys(n, "/network", {"topology", "post_fusion_conv", "filters"});
        c.topology = parse_enum(n, "topology", "/network", c.topology, nn::parse_topology);
        c.post_fusion_conv = get_bool(n, "post_fusion_conv", "/network", c.post_fusion_conv);
        if (n.contains("filters")) {
            const auto& f = n.at("filters");
            const std::string fp = "/network/filters";
            check_keys(f, fp, {"bio_unimodal", "landmark_unimodal", "early", "intermediate_bio", "intermediate_landmark",
                               "post_fusion"});
            auto& fc = c.filters;
            fc.bio_unimodal = get_count(f, "bio_unimodal", fp, fc.bio_unimodal, 1);
            fc.landmark_unimodal = get_count(f, "landmark_unimodal", fp, fc.landmark_unimodal, 1);
            fc.early = get_count(f, "early", fp, fc.early, 1);
            fc.intermediate_bio = get_count(f, "intermediate_bio", fp, fc.intermediate_bio, 1);
            fc.intermediate_landmark = get_count(f, "intermediate_landmark", fp, fc.intermediate_landmark, 1);
            fc.post_fusion = get_count(f, "post_fusion", fp, fc.post_fusion, 1);
        }
    }

    if (j.contains("train")) {
        const auto& t = j.at("train");
        check_keys(t, "/train", {"optimizer", "learning_rate", "batch_size", "epochs"});
        c.train.optimizer = parse_enum(t, "optimizer", "/train", c.train.optimizer, nn::parse_optimizer);
        c.train.learning_rate = get_positive(t, "learning_rate", "/train", c.train.learning_rate);
        c.train.batch_size = get_count(t, "batch_size", "/train", c.train.batch_size, 1);
        c.train.epochs = get_count(t, "epochs", "/train", c.train.epochs);
    }
    c.train.seed = c.seed;

    if (j.contains("bench")) {
        const auto& b = j.at("bench");
        check_keys(b, "/bench", {"methods", "topologies"});
        if (b.contains("methods")) {
            if (!b.at("methods").is_array() || b.at("methods").empty()) bad("/bench/methods", "expected a non-empty array");
            c.bench_methods.clear();
            for (std::size_t i = 0; i < b.at("methods").size(); ++i) {
                const auto& v = b.at("methods").at(i);
                const auto p = "/bench/methods/" + std::to_string(i);
                if (!v.is_string()) bad(p, "expected a method name");
                try {
                    c.bench_methods.push_back(manifold::parse_method(v.get<std::string>()));
                } catch (const Error& e) {
                    bad(p, e.what());
                }
            }
        }
        if (b.contains("topologies")) {
            if (!b.at("topologies").is_array() || b.at("topologies").empty())
                bad("/bench/topologies", "expected a non-empty array");
            c.bench_topologies.clear();
            for (std::size_t i = 0; i < b.at("topologies").size(); ++i) {
                const auto& v = b.at("topologies").at(i);
                const auto p = "/bench/topologies/" + std::to_string(i);
                if (!v.is_string()) bad(p, "expected a topology name");
                try {
                    c.bench_topologies.push_back(nn::parse_topology(v.get<std::string>()));
                } catch (const Error& e) {
                    bad(p, e.what());
                }
            }
        }
    }
    c.output = get_string(j, "output", "", "");
    return c;
}

/// Full config with every default spelled out; parse_config(emit_config(c)) == c.
inline std::string emit_config(const ExperimentConfig& c) {
    json j;
    j["seed"] = c.seed;
    if (c.synth)
        j["synth"] = {{"subjects", c.synth->subjects},
                      {"samples_per_subject", c.synth->samples_per_subject},
                      {"separation", c.synth->separation},
                      {"noise", c.synth->noise},
                      {"seed", c.synth->seed}};
    if (!c.manifest.empty()) j["manifest"] = c.manifest;
    if (!c.archive.empty()) j["archive"] = c.archive;
    j["window"] = {{"length", c.window.length}, {"step", c.window.step}};
    j["balance"] = pipeline::balance_mode_name(c.balance);
    const auto& e = c.embedding;
    j["embedding"] = {
        {"bio", {{"method", manifold::method_name(e.bio_method)}, {"n_components", e.bio_components}}},
        {"landmarks", {{"method", manifold::method_name(e.landmark_method)}, {"n_components", e.landmark_components}}},
        {"neighbors", {{"LLE", e.lle_neighbors}, {"SE", e.se_neighbors}, {"ISO", e.iso_neighbors}}},
        {"perplexity", e.perplexity},
        {"mds_max_iter", e.mds_max_iter},
        {"tsne_max_iter", e.tsne_max_iter},
        {"n_init", e.n_init},
        {"tolerance", e.tolerance},
        {"lle_regularization", e.lle_regularization}};
    const auto& f = c.filters;
    j["network"] = {{"topology", nn::topology_name(c.topology)},
                    {"post_fusion_conv", c.post_fusion_conv},
                    {"filters",
                     {{"bio_unimodal", f.bio_unimodal},
                      {"landmark_unimodal", f.landmark_unimodal},
                      {"early", f.early},
                      {"intermediate_bio", f.intermediate_bio},
                      {"intermediate_landmark", f.intermediate_landmark},
                      {"post_fusion", f.post_fusion}}}};
    j["train"] = {{"optimizer", nn::optimizer_name(c.train.optimizer)},
                  {"learning_rate", c.train.learning_rate},
                  {"batch_size", c.train.batch_size},
                  {"epochs", c.train.epochs}};
    json methods = json::array();
    for (auto m : c.bench_methods) methods.push_back(manifold::method_name(m));
    json tops = json::array();
    for (auto t : c.bench_topologies) tops.push_back(nn::topology_name(t));
    j["bench"] = {{"methods", methods}, {"topologies", tops}};
    if (!c.output.empty()) j["output"] = c.output;
    return j.dump(2) + "\n";
}

/// Reads a config file; relative data paths resolve against the file's directory.
inline ExperimentConfig load_config(const std::filesystem::path& path) {
    auto c = parse_config(csv::read_file(path));
    const auto base = path.parent_path();
    auto resolve = [&](std::string& p) {
        if (!p.empty() && std::filesystem::path(p).is_relative()) p = (base / p).lexically_normal().string();
    };
    resolve(c.manifest);
    resolve(c.archive);
    return c;
}

}  // namespace sfl::app
