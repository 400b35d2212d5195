#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "json.hpp"
#include "sfl/core/csv.hpp"
#include "sfl/core/error.hpp"
#include "sfl/eval/experiment.hpp"

namespace sfl::eval {

enum class ReportFormat { csv, json, text };

inline ReportFormat parse_format(const std::string& s) {
    if (s == "csv") return ReportFormat::csv;
    if (s == "json") return ReportFormat::json;
    if (s == "text") return ReportFormat::text;
    fail(ErrorKind::invalid_argument, "unknown format '" + s + "' (expected csv, json or text)");
}

inline const std::vector<std::string>& report_columns() {
    static const std::vector<std::string> cols = {"method", "topology", "acc", "pre", "rec", "f1",
                                                  "dr_bio_s", "dr_land_s", "params", "train_s", "test_s"};
    return cols;
}

/// Fraction → percent with 2 decimals: 0.96 → "96.00".
inline std::string percent(double v) { return csv::format_fixed(100.0 * v, 2); }
inline std::string seconds(double v) { return csv::format_fixed(v, 3); }

inline std::vector<std::string> report_cells(const ReportRow& r) {
    return {r.method, r.topology, percent(r.mean.accuracy), percent(r.mean.precision), percent(r.mean.recall),
            percent(r.mean.f1), seconds(r.dr_bio_seconds), seconds(r.dr_landmark_seconds), std::to_string(r.params),
            seconds(r.train_seconds), seconds(r.test_seconds)};
}

inline std::string report_csv(const BenchmarkReport& rep) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : rep.rows) rows.push_back(report_cells(r));
    return csv::write(report_columns(), rows);
}

inline std::string report_text(const BenchmarkReport& rep) {
    const auto& head = report_columns();
    std::vector<std::vector<std::string>> rows{head};
    for (const auto& r : rep.rows) rows.push_back(report_cells(r));
    std::vector<std::size_t> width(head.size(), 0);
    for (const auto& r : rows)
        for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
    std::string out;
    for (const auto& r : rows) {
        for (std::size_t c = 0; c < r.size(); ++c) {
            const std::string pad(width[c] - r[c].size(), ' ');
            // Text columns left-aligned, numbers right-aligned.
            out += c < 2 ? r[c] + pad : pad + r[c];
            if (c + 1 < r.size()) out += "  ";
        }
        while (!out.empty() && out.back() == ' ') out.pop_back();
        out += '\n';
    }
    return out;
}

inline nlohmann::ordered_json metrics_json(const Metrics& m) {
    return {{"accuracy", m.accuracy}, {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1},
            {"class_f1", m.class_f1}};
}

inline std::string report_json(const BenchmarkReport& rep) {
    nlohmann::ordered_json j;
    j["averaging"] = rep.averaging;
    j["aggregation"] = rep.aggregation;
    j["balance"] = rep.balance;
    j["seed"] = rep.seed;
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : rep.rows) {
        nlohmann::ordered_json row;
        row["method"] = r.method;
        row["topology"] = r.topology;
        row["post_fusion_conv"] = r.post_fusion_conv;
        row["params"] = r.params;
        row["mean"] = metrics_json(r.mean);
        row["pooled"] = metrics_json(r.pooled);
        row["dr_bio_s"] = r.dr_bio_seconds;
        row["dr_land_s"] = r.dr_landmark_seconds;
        row["train_s"] = r.train_seconds;
        row["test_s"] = r.test_seconds;
        row["total_s"] = r.total_seconds();
        row["folds"] = nlohmann::ordered_json::array();
        for (const auto& f : r.folds)
            row["folds"].push_back({{"test_subject", f.plan.test_subject},
                                    {"train_rows", f.plan.train_rows.size()},
                                    {"test_rows", f.plan.test_rows.size()},
                                    {"metrics", metrics_json(f.metrics)},
                                    {"train_s", f.train_seconds},
                                    {"test_s", f.test_seconds}});
        j["rows"].push_back(std::move(row));
    }
    return j.dump(2) + "\n";
}

inline std::string emit_report(const BenchmarkReport& rep, ReportFormat f) {
    switch (f) {
    case ReportFormat::csv: return report_csv(rep);
    case ReportFormat::json: return report_json(rep);
    case ReportFormat::text: return report_text(rep);
    }
    return {};
}

/// Fold-level metrics and predictions without any timing, full precision;
/// identical runs produce byte-identical output.
inline std::string metrics_csv(const BenchmarkReport& rep) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : rep.rows)
        for (const auto& f : r.folds) {
            std::string preds;
            for (int p : f.predictions) preds += static_cast<char>('0' + p);
            rows.push_back({r.method, r.topology, f.plan.test_subject, csv::format_double(f.metrics.accuracy),
                            csv::format_double(f.metrics.precision), csv::format_double(f.metrics.recall),
                            csv::format_double(f.metrics.f1), preds});
        }
    return csv::write({"method", "topology", "test_subject", "acc", "pre", "rec", "f1", "predictions"}, rows);
}

}  // namespace sfl::eval
