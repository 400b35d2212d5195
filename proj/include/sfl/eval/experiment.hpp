#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sfl/core/error.hpp"
#include "sfl/core/parallel.hpp"
#include "sfl/core/rng.hpp"
#include "sfl/core/timer.hpp"
#include "sfl/eval/metrics.hpp"
#include "sfl/manifold/reduce.hpp"
#include "sfl/nn/train.hpp"
#include "sfl/pipeline/dataset.hpp"

namespace sfl::eval {

struct FoldPlan {
    std::string test_subject;
    std::vector<std::size_t> train_rows;
    std::vector<std::size_t> test_rows;
};

/// One fold per distinct subject, in subject-id order.
inline std::vector<FoldPlan> loso_folds(const std::vector<std::string>& subject_ids) {
    const auto groups = pipeline::rows_by_subject(subject_ids);
    require(groups.size() >= 2, ErrorKind::invalid_input, "leave-one-subject-out needs at least 2 subjects");
    std::vector<FoldPlan> folds;
    for (const auto& [subject, rows] : groups) {
        FoldPlan f{subject, {}, rows};
        for (std::size_t i = 0; i < subject_ids.size(); ++i)
            if (subject_ids[i] != subject) f.train_rows.push_back(i);
        folds.push_back(std::move(f));
    }
    return folds;
}

inline std::vector<FoldPlan> loso_folds(const pipeline::LabeledDataset& d) { return loso_folds(d.subject_ids); }

/// Throws if any training row belongs to the held-out subject or any test row does not.
inline void assert_no_leakage(const FoldPlan& f, const std::vector<std::string>& subject_ids) {
    for (auto i : f.train_rows)
        require(subject_ids[i] != f.test_subject, ErrorKind::invalid_input,
                "leakage: training row " + std::to_string(i) + " belongs to test subject '" + f.test_subject + "'");
    for (auto i : f.test_rows)
        require(subject_ids[i] == f.test_subject, ErrorKind::invalid_input,
                "test row " + std::to_string(i) + " does not belong to '" + f.test_subject + "'");
}

struct FoldReport {
    FoldPlan plan;
    Metrics metrics;
    std::vector<int> predictions;  // aligned with plan.test_rows
    double train_seconds = 0.0;
    double test_seconds = 0.0;
};

struct ReportRow {
    std::string method;
    std::string topology;
    bool post_fusion_conv = false;
    Metrics mean;    // unweighted mean over folds (reported)
    Metrics pooled;  // all fold predictions pooled
    double dr_bio_seconds = 0.0;
    double dr_landmark_seconds = 0.0;
    std::size_t params = 0;
    double train_seconds = 0.0;  // sum over folds
    double test_seconds = 0.0;
    std::vector<FoldReport> folds;

    double total_seconds() const noexcept { return dr_bio_seconds + dr_landmark_seconds + train_seconds + test_seconds; }
};

struct BenchmarkReport {
    std::vector<ReportRow> rows;
    std::string averaging = "macro";
    std::string aggregation = "fold-mean";
    std::string balance = "pooled";
    std::uint64_t seed = 0;
};

/// Reduced network inputs for both modalities (either may be skipped).
struct ReducedInputs {
    Matrix bio;
    Matrix landmarks;
    std::optional<manifold::EmbeddingResult> bio_result;
    std::optional<manifold::EmbeddingResult> landmark_result;
    double bio_seconds = 0.0;
    double landmark_seconds = 0.0;
};

/// Column z-scores over all rows; constant columns become 0.
inline Matrix standardize_columns(Matrix m) {
    const double n = static_cast<double>(m.rows());
    for (std::size_t c = 0; c < m.cols(); ++c) {
        double mean = 0.0;
        for (std::size_t r = 0; r < m.rows(); ++r) mean += m(r, c);
        mean /= n;
        double var = 0.0;
        for (std::size_t r = 0; r < m.rows(); ++r) var += (m(r, c) - mean) * (m(r, c) - mean);
        const double sd = std::sqrt(var / n);
        for (std::size_t r = 0; r < m.rows(); ++r) m(r, c) = sd > 0.0 ? (m(r, c) - mean) / sd : 0.0;
    }
    return m;
}

/// Transductive DR of each requested modality over the pooled rows, timed once.
inline ReducedInputs reduce_inputs(const pipeline::LabeledDataset& d, const manifold::EmbeddingConfig& bio_cfg,
                                   const manifold::EmbeddingConfig& landmark_cfg, bool want_bio, bool want_landmarks) {
    ReducedInputs r;
    if (want_bio) {
        Stopwatch sw;
        r.bio_result = manifold::reduce(d.bio.values, bio_cfg);
        r.bio_seconds = sw.seconds();
        r.bio = standardize_columns(r.bio_result->coords);
    }
    if (want_landmarks) {
        Stopwatch sw;
        r.landmark_result = manifold::reduce(d.landmarks.values, landmark_cfg);
        r.landmark_seconds = sw.seconds();
        r.landmarks = standardize_columns(r.landmark_result->coords);
    }
    return r;
}

inline std::size_t landmark_side(std::size_t dims) {
    const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(dims))));
    require(side * side == dims, ErrorKind::invalid_argument,
            "landmark n_components must be a perfect square to form the 2-D input (got " + std::to_string(dims) + ")");
    return side;
}

struct RunOptions {
    nn::FilterConfig filters;
    bool post_fusion_conv = true;
    nn::TrainConfig train;
    pipeline::BalanceMode balance = pipeline::BalanceMode::pooled;
    std::uint64_t seed = 42;
    std::size_t jobs = 1;
};

inline nn::NetworkSpec network_for(nn::Topology t, const ReducedInputs& in, const RunOptions& opt) {
    const std::size_t bio_dims = in.bio.cols() ? in.bio.cols() : 20;
    const std::size_t side = in.landmarks.cols() ? landmark_side(in.landmarks.cols()) : 7;
    return nn::make_spec(t, opt.filters, opt.post_fusion_conv, bio_dims, side);
}

/// LOSO over the reduced inputs for one topology. Folds run in parallel; fold i
/// derives its seed as mix_seed(seed, i), so results do not depend on `jobs`.
inline ReportRow run_loso(const pipeline::LabeledDataset& d, const ReducedInputs& in, nn::Topology t,
                          std::string_view method, const RunOptions& opt) {
    const auto spec = network_for(t, in, opt);
    const auto folds = loso_folds(d);
    nn::NetData all{nn::uses_bio(t) ? in.bio : Matrix(), nn::uses_landmarks(t) ? in.landmarks : Matrix(), d.labels};
    ReportRow row;
    row.method = std::string(method);
    row.topology = nn::topology_name(t);
    row.post_fusion_conv = spec.post_fusion_conv;
    row.params = nn::count_params(spec);
    row.dr_bio_seconds = nn::uses_bio(t) ? in.bio_seconds : 0.0;
    row.dr_landmark_seconds = nn::uses_landmarks(t) ? in.landmark_seconds : 0.0;
    row.folds.resize(folds.size());
    parallel_for(folds.size(), opt.jobs, [&](std::size_t i) {
        const auto& plan = folds[i];
        assert_no_leakage(plan, d.subject_ids);
        const std::uint64_t fold_seed = mix_seed(opt.seed, i);
        auto train_rows = plan.train_rows;
        if (opt.balance == pipeline::BalanceMode::train_fold)
            train_rows = pipeline::balanced_indices(d.labels, plan.train_rows, fold_seed);
        auto cfg = opt.train;
        cfg.seed = fold_seed;
        FoldReport rep{plan, {}, {}, 0.0, 0.0};
        try {
            Stopwatch sw;
            const auto model = nn::train(nn::build(spec, fold_seed), all.select(train_rows), cfg);
            rep.train_seconds = sw.seconds();
            sw.restart();
            rep.predictions = nn::predict(model, all.select(plan.test_rows));
            rep.test_seconds = sw.seconds();
        } catch (const Error& e) {
            fail(e.kind(), "fold '" + plan.test_subject + "': " + e.what());
        }
        std::vector<int> truth;
        for (auto r : plan.test_rows) truth.push_back(d.labels[r]);
        rep.metrics = compute_metrics(truth, rep.predictions);
        row.folds[i] = std::move(rep);
    });
    std::vector<Metrics> per_fold;
    std::vector<int> all_true;
    std::vector<int> all_pred;
    for (const auto& f : row.folds) {
        per_fold.push_back(f.metrics);
        row.train_seconds += f.train_seconds;
        row.test_seconds += f.test_seconds;
        for (std::size_t k = 0; k < f.plan.test_rows.size(); ++k) {
            all_true.push_back(d.labels[f.plan.test_rows[k]]);
            all_pred.push_back(f.predictions[k]);
        }
    }
    row.mean = mean_metrics(per_fold);
    row.pooled = compute_metrics(all_true, all_pred);
    return row;
}

/// With train_fold balancing the dataset must stay unbalanced up to here; with
/// pooled balancing it is expected to be balanced already.
inline BenchmarkReport make_report(const RunOptions& opt) {
    BenchmarkReport r;
    r.balance = pipeline::balance_mode_name(opt.balance);
    r.seed = opt.seed;
    return r;
}

/// One method, one topology: reduce the modalities the topology needs, then LOSO.
inline BenchmarkReport run_experiment(const pipeline::LabeledDataset& d, const manifold::EmbeddingConfig& bio_cfg,
                                      const manifold::EmbeddingConfig& landmark_cfg, nn::Topology t,
                                      const RunOptions& opt, ReducedInputs* reduced_out = nullptr) {
    auto in = reduce_inputs(d, bio_cfg, landmark_cfg, nn::uses_bio(t), nn::uses_landmarks(t));
    auto report = make_report(opt);
    report.rows.push_back(run_loso(d, in, t, manifold::method_name(bio_cfg.method), opt));
    if (reduced_out) *reduced_out = std::move(in);
    return report;
}

/// Reduction settings for one method: {bio, landmarks}.
using MethodConfigs = std::function<std::pair<manifold::EmbeddingConfig, manifold::EmbeddingConfig>(manifold::Method)>;

/// Every method × topology; each method's reduction is computed once and shared.
inline BenchmarkReport run_bench(const pipeline::LabeledDataset& d, const MethodConfigs& configs,
                                 const std::vector<manifold::Method>& methods, const std::vector<nn::Topology>& topologies,
                                 const RunOptions& opt) {
    auto report = make_report(opt);
    bool want_bio = false;
    bool want_landmarks = false;
    for (auto t : topologies) {
        want_bio = want_bio || nn::uses_bio(t);
        want_landmarks = want_landmarks || nn::uses_landmarks(t);
    }
    for (auto m : methods) {
        const auto [bio_cfg, lm_cfg] = configs(m);
        const auto in = reduce_inputs(d, bio_cfg, lm_cfg, want_bio, want_landmarks);
        for (auto t : topologies) report.rows.push_back(run_loso(d, in, t, manifold::method_name(m), opt));
    }
    return report;
}

/// Same, with every other setting (including n_neighbors) copied from the templates.
inline BenchmarkReport run_bench(const pipeline::LabeledDataset& d, const manifold::EmbeddingConfig& bio_template,
                                 const manifold::EmbeddingConfig& landmark_template,
                                 const std::vector<manifold::Method>& methods, const std::vector<nn::Topology>& topologies,
                                 const RunOptions& opt) {
    auto configs = [&](manifold::Method m) {
        auto bio_cfg = bio_template;
        auto lm_cfg = landmark_template;
        bio_cfg.method = lm_cfg.method = m;
        return std::pair{bio_cfg, lm_cfg};
    };
    return run_bench(d, configs, methods, topologies, opt);
}

}  // namespace sfl::eval
