#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sfl/app/config.hpp"
#include "sfl/app/plot.hpp"
#include "sfl/core/csv.hpp"
#include "sfl/core/error.hpp"
#include "sfl/eval/report.hpp"
#include "sfl/manifold/export.hpp"
#include "sfl/nn/serialize.hpp"
#include "sfl/pipeline/io.hpp"
#include "sfl/synth/stress.hpp"

namespace sfl::app {

namespace fs = std::filesystem;

/// Raw recordings from the synth spec or the manifest.
inline std::vector<pipeline::RawRecording> load_recordings(const ExperimentConfig& c) {
    if (c.synth) return synth::gen_multimodal_stress(*c.synth);
    if (!c.manifest.empty()) return pipeline::load_manifest(c.manifest);
    fail(ErrorKind::config, "config /archive holds extracted features; raw recordings need synth or manifest");
}

/// Feature dataset: read from an archive, or assembled from recordings.
inline pipeline::LabeledDataset load_dataset(const ExperimentConfig& c, std::size_t jobs) {
    if (!c.archive.empty()) return pipeline::read_dataset(c.archive);
    return pipeline::assemble_dataset(load_recordings(c), c.window, c.seed, c.balance, jobs);
}

inline eval::RunOptions run_options(const ExperimentConfig& c, std::size_t jobs) {
    eval::RunOptions o;
    o.filters = c.filters;
    o.post_fusion_conv = c.post_fusion_conv;
    o.train = c.train;
    o.balance = c.balance;
    o.seed = c.seed;
    o.jobs = jobs;
    return o;
}

inline manifold::EmbeddingConfig embedding_for(const ExperimentConfig& c, pipeline::Modality m,
                                               std::optional<manifold::Method> method, std::size_t jobs) {
    const auto& e = c.embedding;
    if (m == pipeline::Modality::bio) return e.make(method.value_or(e.bio_method), e.bio_components, c.seed, jobs);
    return e.make(method.value_or(e.landmark_method), e.landmark_components, c.seed, jobs);
}

/// Text summary lines are returned so the CLI decides where they go.
inline std::string cmd_synth(const ExperimentConfig& c, const fs::path& out) {
    require(c.synth.has_value(), ErrorKind::config, "config /synth: synth needs a synth section");
    const auto recs = synth::gen_multimodal_stress(*c.synth);
    pipeline::write_recordings(out, recs);
    return "wrote " + std::to_string(recs.size()) + " subjects to " + (out / "manifest.json").string() + "\n";
}

inline std::string cmd_features(const ExperimentConfig& c, const fs::path& out, std::size_t jobs) {
    const auto d = load_dataset(c, jobs);
    pipeline::write_dataset(out, d);
    return "wrote " + std::to_string(d.rows()) + " windows (" + std::to_string(d.bio.values.cols()) + " bio, " +
           std::to_string(d.landmarks.values.cols()) + " landmark features) to " + out.string() + "\n";
}

inline std::string cmd_reduce(const ExperimentConfig& c, const fs::path& out, pipeline::Modality modality,
                              std::optional<manifold::Method> method, bool plot, std::size_t jobs) {
    const auto d = load_dataset(c, jobs);
    const auto cfg = embedding_for(c, modality, method, jobs);
    const auto& x = modality == pipeline::Modality::bio ? d.bio.values : d.landmarks.values;
    const auto r = manifold::reduce(x, cfg);
    const std::string tag = pipeline::modality_name(modality);
    csv::write_file_atomic(out / ("coords_" + tag + ".csv"), manifold::coords_csv(r));
    csv::write_file_atomic(out / ("diagnostics_" + tag + ".json"), manifold::diagnostics_json(cfg, r).dump(2) + "\n");
    csv::write_file_atomic(out / pipeline::kLabelsFile, pipeline::labels_csv(d));
    if (plot) {
        require(cfg.n_components == 2, ErrorKind::invalid_argument, "--plot needs n_components = 2");
        const std::string title = std::string(manifold::method_name(cfg.method)) + " (" + tag + ")";
        csv::write_file_atomic(out / ("embedding_" + tag + ".svg"), plot_embedding(r.coords, d.labels, title));
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s %s: %zu x %zu in %.3f s\n", std::string(manifold::method_name(cfg.method)).c_str(),
                  tag.c_str(), r.coords.rows(), r.coords.cols(), r.diagnostics.seconds);
    return buf;
}

/// Trains the configured topology on every row (no held-out subject).
inline std::string cmd_train(const ExperimentConfig& c, const fs::path& out, std::size_t jobs) {
    const auto d = load_dataset(c, jobs);
    const auto in = eval::reduce_inputs(d, embedding_for(c, pipeline::Modality::bio, {}, jobs),
                                        embedding_for(c, pipeline::Modality::landmarks, {}, jobs),
                                        nn::uses_bio(c.topology), nn::uses_landmarks(c.topology));
    auto rows = d.rows() ? iota_indices(d.rows()) : std::vector<std::size_t>{};
    if (c.balance == pipeline::BalanceMode::train_fold) rows = pipeline::balanced_indices(d.labels, rows, c.seed);
    const auto opt = run_options(c, jobs);
    const auto spec = eval::network_for(c.topology, in, opt);
    nn::NetData all{nn::uses_bio(c.topology) ? in.bio : Matrix(),
                    nn::uses_landmarks(c.topology) ? in.landmarks : Matrix(), d.labels};
    const auto data = all.select(rows);
    Stopwatch sw;
    const auto model = nn::train(nn::build(spec, c.seed), data, c.train);
    const double seconds = sw.seconds();
    const auto pred = nn::predict(model, data);
    const auto m = eval::compute_metrics(data.labels, pred);
    csv::write_file_atomic(out / "model.bin", nn::save_model(model));
    std::vector<std::vector<std::string>> hist;
    for (std::size_t e = 0; e < model.history.size(); ++e)
        hist.push_back({std::to_string(e + 1), csv::format_double(model.history[e])});
    csv::write_file_atomic(out / "history.csv", csv::write({"epoch", "loss"}, hist));
    char buf[200];
    std::snprintf(buf, sizeof buf, "%s: %zu params, %zu rows, train acc %s%%, %.3f s\n", nn::topology_name(c.topology),
                  model.param_count(), data.rows(), eval::percent(m.accuracy).c_str(), seconds);
    return buf;
}

inline void write_report_files(const fs::path& out, const std::string& stem, const eval::BenchmarkReport& rep) {
    csv::write_file_atomic(out / (stem + ".csv"), eval::report_csv(rep));
    csv::write_file_atomic(out / (stem + ".json"), eval::report_json(rep));
    csv::write_file_atomic(out / (stem + ".txt"), eval::report_text(rep));
    csv::write_file_atomic(out / "metrics.csv", eval::metrics_csv(rep));
}

/// Full LOSO experiment; also writes the reduced coordinates it trained on.
inline std::string cmd_eval_loso(const ExperimentConfig& c, const fs::path& out, eval::ReportFormat fmt,
                                 std::size_t jobs) {
    const auto d = load_dataset(c, jobs);
    eval::ReducedInputs in;
    const auto bio_cfg = embedding_for(c, pipeline::Modality::bio, {}, jobs);
    const auto lm_cfg = embedding_for(c, pipeline::Modality::landmarks, {}, jobs);
    auto rep = eval::run_experiment(d, bio_cfg, lm_cfg, c.topology, run_options(c, jobs), &in);
    if (nn::uses_bio(c.topology) && nn::uses_landmarks(c.topology) && bio_cfg.method != lm_cfg.method)
        rep.rows.front().method += "+" + std::string(manifold::method_name(lm_cfg.method));
    if (in.bio_result) {
        csv::write_file_atomic(out / "coords_bio.csv", manifold::coords_csv(*in.bio_result));
        csv::write_file_atomic(out / "diagnostics_bio.json",
                               manifold::diagnostics_json(bio_cfg, *in.bio_result).dump(2) + "\n");
    }
    if (in.landmark_result) {
        csv::write_file_atomic(out / "coords_landmarks.csv", manifold::coords_csv(*in.landmark_result));
        csv::write_file_atomic(out / "diagnostics_landmarks.json",
                               manifold::diagnostics_json(lm_cfg, *in.landmark_result).dump(2) + "\n");
    }
    write_report_files(out, "report", rep);
    return eval::emit_report(rep, fmt);
}

inline std::string cmd_bench(const ExperimentConfig& c, const fs::path& out, eval::ReportFormat fmt, std::size_t jobs) {
    const auto d = load_dataset(c, jobs);
    // Per-method settings (neighbors in particular) come from the config for each method.
    auto configs = [&](manifold::Method m) {
        return std::pair{embedding_for(c, pipeline::Modality::bio, m, jobs),
                         embedding_for(c, pipeline::Modality::landmarks, m, jobs)};
    };
    const auto rep = eval::run_bench(d, configs, c.bench_methods, c.bench_topologies, run_options(c, jobs));
    write_report_files(out, "bench", rep);
    return eval::emit_report(rep, fmt);
}

/// SVG from a 2-column coordinate CSV and a labels CSV (first column = label).
inline std::string cmd_plot(const fs::path& coords_path, const fs::path& labels_path, const fs::path& svg_path,
                            const std::string& title) {
    const auto coords = csv::read_matrix(csv::read_file(coords_path));
    const auto t = csv::parse(csv::read_file(labels_path));
    require(!t.header.empty() && t.header[0] == "label", ErrorKind::invalid_input,
            "labels file must start with a 'label' column");
    std::vector<int> labels;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const double v = csv::parse_double(t.rows[r][0], r + 1, 0);
        require(v == 0.0 || v == 1.0 || v == 2.0, ErrorKind::invalid_input,
                "label outside {0,1,2} at row " + std::to_string(r + 1));
        labels.push_back(static_cast<int>(v));
    }
    csv::write_file_atomic(svg_path, plot_embedding(coords, labels, title));
    return "wrote " + svg_path.string() + "\n";
}

}  // namespace sfl::app
