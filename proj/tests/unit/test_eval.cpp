#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "sfl/core/csv.hpp"
#include "sfl/core/rng.hpp"
#include "sfl/eval/report.hpp"
#include "sfl/synth/stress.hpp"

using namespace sfl;
using namespace sfl::eval;

namespace {

// Per-class counts straight from the definitions.
Metrics oracle_metrics(const std::vector<int>& t, const std::vector<int>& p) {
    Metrics m;
    double hits = 0;
    for (std::size_t i = 0; i < t.size(); ++i) hits += t[i] == p[i];
    m.accuracy = hits / double(t.size());
    for (int k = 0; k < 3; ++k) {
        double tp = 0, fp = 0, fn = 0;
        for (std::size_t i = 0; i < t.size(); ++i) {
            tp += t[i] == k && p[i] == k;
            fp += t[i] != k && p[i] == k;
            fn += t[i] == k && p[i] != k;
        }
        const double prec = tp + fp > 0 ? tp / (tp + fp) : 0.0;
        const double rec = tp + fn > 0 ? tp / (tp + fn) : 0.0;
        const double f = prec + rec > 0 ? 2 * prec * rec / (prec + rec) : 0.0;
        m.precision += prec / 3;
        m.recall += rec / 3;
        m.f1 += f / 3;
        m.class_f1[k] = f;
    }
    return m;
}

const pipeline::LabeledDataset& small_dataset() {
    static const auto d = [] {
        synth::SynthStressSpec spec;
        spec.subjects = 3;
        spec.samples_per_subject = 300;
        return pipeline::assemble_dataset(synth::gen_multimodal_stress(spec), {}, 42);
    }();
    return d;
}

manifold::EmbeddingConfig pca(std::size_t k) {
    manifold::EmbeddingConfig c;
    c.method = manifold::Method::pca;
    c.n_components = k;
    return c;
}

RunOptions quick_options(std::size_t jobs = 1) {
    RunOptions o;
    o.filters = {4, 4, 4, 3, 3, 4};
    o.train.epochs = 4;
    o.jobs = jobs;
    return o;
}

ReportRow sample_row(std::string method, double acc) {
    ReportRow r;
    r.method = std::move(method);
    r.topology = "early-fusion";
    r.mean = {acc, 0.5, 0.25, 1.0 / 3.0, {}};
    r.dr_bio_seconds = 1.5;
    r.params = 4967;
    r.train_seconds = 12.25;
    return r;
}

}  // namespace

TEST(LosoFolds, OneFoldPerSubjectInOrder) {
    const std::vector<std::string> ids{"e", "c", "a", "d", "b", "a", "c"};
    const auto folds = loso_folds(ids);
    ASSERT_EQ(folds.size(), 5u);
    std::vector<std::string> order;
    for (const auto& f : folds) order.push_back(f.test_subject);
    EXPECT_EQ(order, (std::vector<std::string>{"a", "b", "c", "d", "e"}));
    for (const auto& f : folds) {
        std::set<std::size_t> all(f.train_rows.begin(), f.train_rows.end());
        for (auto r : f.test_rows) {
            EXPECT_EQ(ids[r], f.test_subject);
            EXPECT_TRUE(all.insert(r).second) << "row in both sets";
        }
        EXPECT_EQ(all.size(), ids.size());
        for (auto r : f.train_rows) EXPECT_NE(ids[r], f.test_subject);
        EXPECT_NO_THROW(assert_no_leakage(f, ids));
    }
}

TEST(LosoFolds, TestSizesFollowSubjects) {
    const auto folds = loso_folds(std::vector<std::string>{"a", "b", "a", "b", "a"});
    ASSERT_EQ(folds.size(), 2u);
    EXPECT_EQ(folds[0].test_rows.size(), 3u);
    EXPECT_EQ(folds[1].test_rows.size(), 2u);
}

TEST(LosoFolds, SingleSubjectRejected) {
    EXPECT_THROW(loso_folds(std::vector<std::string>{"a", "a"}), Error);
}

TEST(LosoFolds, LeakageDetected) {
    const std::vector<std::string> ids{"a", "b", "a"};
    auto f = loso_folds(ids).front();
    f.train_rows.push_back(2);
    EXPECT_THROW(assert_no_leakage(f, ids), Error);
}

TEST(Metrics, HandExample) {
    const auto m = compute_metrics(std::vector<int>{0, 0, 1, 2}, std::vector<int>{0, 1, 1, 2});
    EXPECT_DOUBLE_EQ(m.accuracy, 0.75);
    EXPECT_NEAR(m.precision, 0.8333, 1e-4);
    EXPECT_NEAR(m.recall, 0.8333, 1e-4);
    EXPECT_NEAR(m.f1, 0.7778, 1e-4);
    // (1 + 1/2 + 1)/3, (1/2 + 1 + 1)/3, (2/3 + 2/3 + 1)/3
    EXPECT_DOUBLE_EQ(m.precision, 2.5 / 3);
    EXPECT_DOUBLE_EQ(m.recall, 2.5 / 3);
    EXPECT_NEAR(m.f1, 7.0 / 9.0, 1e-15);
}

TEST(Metrics, Perfect) {
    const std::vector<int> y{0, 1, 2, 2, 1};
    const auto m = compute_metrics(y, y);
    EXPECT_EQ(m.accuracy, 1.0);
    EXPECT_EQ(m.precision, 1.0);
    EXPECT_EQ(m.recall, 1.0);
    EXPECT_EQ(m.f1, 1.0);
}

TEST(Metrics, ConstantPredictor) {
    const std::vector<int> t{0, 1, 2, 0, 1, 2};
    const auto m = compute_metrics(t, std::vector<int>(6, 0));
    EXPECT_DOUBLE_EQ(m.accuracy, 1.0 / 3.0);
    EXPECT_DOUBLE_EQ(m.precision, (1.0 / 3.0) / 3.0);
    EXPECT_DOUBLE_EQ(m.recall, 1.0 / 3.0);
    EXPECT_EQ(m.class_f1[1], 0.0);
    EXPECT_EQ(m.class_f1[2], 0.0);
}

TEST(Metrics, RandomLabelsMatchOracle) {
    RngStream rng(3, 0);
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t n = 1 + rng.below(40);
        std::vector<int> t(n), p(n);
        for (std::size_t i = 0; i < n; ++i) {
            t[i] = static_cast<int>(rng.below(3));
            p[i] = static_cast<int>(rng.below(3));
        }
        const auto m = compute_metrics(t, p);
        const auto o = oracle_metrics(t, p);
        EXPECT_NEAR(m.accuracy, o.accuracy, 1e-15);
        EXPECT_NEAR(m.precision, o.precision, 1e-15);
        EXPECT_NEAR(m.recall, o.recall, 1e-15);
        EXPECT_NEAR(m.f1, o.f1, 1e-15);
        for (double v : {m.accuracy, m.precision, m.recall, m.f1}) {
            EXPECT_GE(v, 0.0);
            EXPECT_LE(v, 1.0);
        }
        EXPECT_LE(m.f1, *std::max_element(m.class_f1.begin(), m.class_f1.end()) + 1e-15);
    }
}

TEST(Metrics, InvalidInputs) {
    EXPECT_THROW(compute_metrics(std::vector<int>{}, std::vector<int>{}), Error);
    EXPECT_THROW(compute_metrics(std::vector<int>{0, 1}, std::vector<int>{0}), Error);
    EXPECT_THROW(compute_metrics(std::vector<int>{0, 3}, std::vector<int>{0, 1}), Error);
}

TEST(Metrics, MeanIsUnweightedFoldAverage) {
    const std::vector<Metrics> folds{{0.5, 0.25, 1.0, 0.2, {0.1, 0.2, 0.3}}, {1.0, 0.75, 0.0, 0.4, {0.3, 0.2, 0.1}}};
    const auto m = mean_metrics(folds);
    EXPECT_DOUBLE_EQ(m.accuracy, 0.75);
    EXPECT_DOUBLE_EQ(m.precision, 0.5);
    EXPECT_DOUBLE_EQ(m.recall, 0.5);
    EXPECT_DOUBLE_EQ(m.f1, 0.3);
    EXPECT_DOUBLE_EQ(m.class_f1[0], 0.2);
}

TEST(Report, PercentFormatting) {
    EXPECT_EQ(percent(0.96), "96.00");
    EXPECT_EQ(percent(1.0), "100.00");
    EXPECT_EQ(percent(0.0), "0.00");
    EXPECT_EQ(percent(0.123456), "12.35");
    EXPECT_EQ(seconds(0.0015), "0.002");
}

TEST(Report, EmptyIsHeaderOnlyCsv) {
    const auto text = report_csv(BenchmarkReport{});
    const auto t = csv::parse(text);
    EXPECT_EQ(t.header, report_columns());
    EXPECT_TRUE(t.rows.empty());
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1);
}

TEST(Report, CsvParsesBack) {
    BenchmarkReport rep;
    rep.rows = {sample_row("MDS", 0.96), sample_row("t-SNE", 0.5)};
    const auto t = csv::parse(report_csv(rep));
    ASSERT_EQ(t.rows.size(), 2u);
    EXPECT_EQ(t.rows[0][t.column("method")], "MDS");
    EXPECT_EQ(t.rows[1][t.column("method")], "t-SNE");
    EXPECT_EQ(t.rows[0][t.column("acc")], "96.00");
    EXPECT_EQ(t.rows[0][t.column("f1")], "33.33");
    EXPECT_EQ(t.rows[0][t.column("params")], "4967");
    EXPECT_DOUBLE_EQ(csv::parse_double(t.rows[0][t.column("train_s")], 1, 0), 12.25);
    EXPECT_DOUBLE_EQ(csv::parse_double(t.rows[0][t.column("dr_bio_s")], 1, 0), 1.5);
}

TEST(Report, TextIsAligned) {
    BenchmarkReport rep;
    rep.rows = {sample_row("MDS", 0.96), sample_row("t-SNE", 0.05)};
    const auto text = report_text(rep);
    std::vector<std::string> lines;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto end = text.find('\n', pos);
        lines.push_back(text.substr(pos, end - pos));
        pos = end + 1;
    }
    ASSERT_EQ(lines.size(), 3u);
    EXPECT_EQ(lines[0].size(), lines[1].size());
    EXPECT_EQ(lines[1].size(), lines[2].size());
    // Numbers are right-aligned under their header.
    EXPECT_EQ(lines[1].find("96.00") + 5, lines[0].find("acc") + 3);
    EXPECT_EQ(lines[2].find("5.00") + 4, lines[0].find("acc") + 3);
}

TEST(Report, JsonCarriesMetadataAndFolds) {
    BenchmarkReport rep;
    rep.seed = 9;
    auto row = sample_row("PCA", 0.5);
    row.folds.push_back({{"s01", {1, 2}, {0}}, {1, 1, 1, 1, {1, 1, 1}}, {2}, 0.5, 0.25});
    rep.rows = {row};
    const auto j = nlohmann::json::parse(report_json(rep));
    EXPECT_EQ(j["averaging"], "macro");
    EXPECT_EQ(j["aggregation"], "fold-mean");
    EXPECT_EQ(j["seed"], 9);
    EXPECT_EQ(j["rows"][0]["folds"][0]["test_subject"], "s01");
    EXPECT_DOUBLE_EQ(j["rows"][0]["total_s"].get<double>(), 1.5 + 12.25);
}

TEST(Standardize, ZeroMeanUnitVariance) {
    Matrix m = Matrix::from_rows({{1, 5}, {2, 5}, {6, 5}});
    const auto s = standardize_columns(m);
    double mean = 0, sq = 0;
    for (std::size_t r = 0; r < 3; ++r) {
        mean += s(r, 0);
        sq += s(r, 0) * s(r, 0);
        EXPECT_EQ(s(r, 1), 0.0);
    }
    EXPECT_NEAR(mean, 0.0, 1e-15);
    EXPECT_NEAR(sq / 3, 1.0, 1e-15);
}

TEST(LandmarkSide, NeedsPerfectSquare) {
    EXPECT_EQ(landmark_side(49), 7u);
    EXPECT_EQ(landmark_side(16), 4u);
    EXPECT_THROW(landmark_side(20), Error);
}

TEST(Experiment, FoldCountAndAggregation) {
    const auto& d = small_dataset();
    const auto rep = run_experiment(d, pca(6), pca(16), nn::Topology::intermediate_fusion, quick_options());
    ASSERT_EQ(rep.rows.size(), 1u);
    const auto& row = rep.rows[0];
    ASSERT_EQ(row.folds.size(), 3u);
    EXPECT_EQ(row.method, "PCA");
    EXPECT_EQ(row.topology, "intermediate-fusion");

    double acc = 0, f1 = 0, train = 0;
    std::vector<int> truth, pred;
    for (const auto& f : row.folds) {
        acc += f.metrics.accuracy / 3;
        f1 += f.metrics.f1 / 3;
        train += f.train_seconds;
        EXPECT_GE(f.train_seconds, 0.0);
        EXPECT_GE(f.test_seconds, 0.0);
        ASSERT_EQ(f.predictions.size(), f.plan.test_rows.size());
        for (std::size_t k = 0; k < f.predictions.size(); ++k) {
            truth.push_back(d.labels[f.plan.test_rows[k]]);
            pred.push_back(f.predictions[k]);
        }
        std::vector<int> t;
        for (auto r : f.plan.test_rows) t.push_back(d.labels[r]);
        EXPECT_EQ(f.metrics, compute_metrics(t, f.predictions));
    }
    EXPECT_NEAR(row.mean.accuracy, acc, 1e-12);
    EXPECT_NEAR(row.mean.f1, f1, 1e-12);
    EXPECT_NEAR(row.train_seconds, train, 1e-12);
    EXPECT_EQ(row.pooled, compute_metrics(truth, pred));
    for (double part : {row.dr_bio_seconds, row.dr_landmark_seconds, row.train_seconds, row.test_seconds})
        EXPECT_GE(row.total_seconds(), part);
}

TEST(Experiment, RepeatableAndIndependentOfJobs) {
    const auto& d = small_dataset();
    const auto a = run_experiment(d, pca(6), pca(16), nn::Topology::early_fusion, quick_options(1));
    const auto b = run_experiment(d, pca(6), pca(16), nn::Topology::early_fusion, quick_options(1));
    const auto c = run_experiment(d, pca(6), pca(16), nn::Topology::early_fusion, quick_options(3));
    EXPECT_EQ(metrics_csv(a), metrics_csv(b));
    EXPECT_EQ(metrics_csv(a), metrics_csv(c));
    EXPECT_EQ(a.rows[0].mean, c.rows[0].mean);
}

TEST(Experiment, TrainFoldBalancing) {
    synth::SynthStressSpec spec;
    spec.subjects = 3;
    spec.samples_per_subject = 300;
    const auto d = pipeline::assemble_dataset(synth::gen_multimodal_stress(spec), {}, 42,
                                              pipeline::BalanceMode::train_fold);
    auto opt = quick_options();
    opt.balance = pipeline::BalanceMode::train_fold;
    const auto rep = run_experiment(d, pca(6), pca(16), nn::Topology::unimodal_bio, opt);
    EXPECT_EQ(rep.balance, "train_fold");
    std::size_t tested = 0;
    for (const auto& f : rep.rows[0].folds) tested += f.predictions.size();
    EXPECT_EQ(tested, d.rows());
}

TEST(Bench, OneRowPerMethodAndTopology) {
    const auto& d = small_dataset();
    const std::vector<manifold::Method> methods{manifold::Method::pca, manifold::Method::mds};
    const std::vector<nn::Topology> tops{nn::Topology::unimodal_bio, nn::Topology::unimodal_landmarks};
    auto opt = quick_options();
    opt.train.epochs = 1;
    auto mds = pca(6);
    mds.max_iter = 30;
    mds.n_init = 1;
    auto mds_lm = pca(16);
    mds_lm.max_iter = 30;
    mds_lm.n_init = 1;
    const auto rep = run_bench(d, mds, mds_lm, methods, tops, opt);
    ASSERT_EQ(rep.rows.size(), 4u);
    EXPECT_EQ(rep.rows[0].method, "PCA");
    EXPECT_EQ(rep.rows[1].topology, "unimodal-landmarks");
    EXPECT_EQ(rep.rows[2].method, "MDS");
    EXPECT_EQ(rep.rows[0].dr_landmark_seconds, 0.0);
    EXPECT_EQ(rep.rows[1].dr_bio_seconds, 0.0);
    EXPECT_EQ(csv::parse(report_csv(rep)).rows.size(), 4u);
}
