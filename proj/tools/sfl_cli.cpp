// sfl: stress-detection experiments from the command line.
//
//   sfl synth     --config c.json --out data/
//   sfl features  --config c.json --out features/
//   sfl reduce    --config c.json --out emb/ [--modality bio|landmarks] [--method MDS] [--plot]
//   sfl train     --config c.json --out model/
//   sfl eval-loso --config c.json --out run/ [--format csv|json|text]
//   sfl bench     --config c.json --out bench/ [--format csv|json|text]
//   sfl plot      --coords emb/coords_bio.csv --labels emb/labels.csv --out emb/plot.svg
//
// Exit status is 0 only when every output was written. Failures print one line
// to stderr: "sfl: error[<kind>]: <message>".

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "sfl/app/commands.hpp"

namespace {

struct Common {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> jobs;
    std::string format = "text";
};

void add_common(CLI::App* sub, Common& c, bool with_format) {
    sub->add_option("--config", c.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", c.out, "output directory (overrides config 'output')");
    sub->add_option("--seed", c.seed, "master seed (overrides config)");
    sub->add_option("--jobs", c.jobs, "worker threads (default: SFL_JOBS, else 1)")->check(CLI::PositiveNumber);
    if (with_format)
        sub->add_option("--format", c.format, "report format on stdout")->check(CLI::IsMember({"csv", "json", "text"}));
}

sfl::app::ExperimentConfig resolve(const Common& c, std::string& out_dir) {
    auto cfg = sfl::app::load_config(c.config);
    if (c.seed) {
        if (cfg.synth && cfg.synth->seed == cfg.seed) cfg.synth->seed = *c.seed;
        cfg.seed = *c.seed;
        cfg.train.seed = *c.seed;
    }
    out_dir = c.out.empty() ? cfg.output : c.out;
    sfl::require(!out_dir.empty(), sfl::ErrorKind::config, "no output directory: pass --out or set 'output'");
    return cfg;
}

// CLI11 does not read envname() values for named subcommands, so SFL_JOBS is parsed here.
std::size_t resolve_jobs(const Common& c) {
    if (c.jobs) return *c.jobs;
    const char* env = std::getenv("SFL_JOBS");
    if (!env || !*env) return 1;
    const std::string s = env;
    std::size_t v = 0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    sfl::require(ec == std::errc() && end == s.data() + s.size() && v >= 1, sfl::ErrorKind::invalid_argument,
                 "SFL_JOBS must be a positive integer, got '" + s + "'");
    return v;
}

std::string one_line(std::string s) {
    for (auto& ch : s)
        if (ch == '\n' || ch == '\r') ch = ' ';
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Manifold learning + multimodal CNN fusion for stress detection"};
    app.require_subcommand(1);
    Common common;

    auto* synth = app.add_subcommand("synth", "generate a synthetic multimodal dataset (CSV + manifest)");
    add_common(synth, common, false);
    auto* features = app.add_subcommand("features", "ingest recordings and write the feature dataset archive");
    add_common(features, common, false);

    auto* reduce = app.add_subcommand("reduce", "run one dimensionality reduction and write coordinates");
    add_common(reduce, common, false);
    std::string modality = "bio";
    std::string method;
    bool plot = false;
    reduce->add_option("--modality", modality, "bio or landmarks")->check(CLI::IsMember({"bio", "landmarks"}));
    reduce->add_option("--method", method, "LLE, SE, MDS, ISO, t-SNE or PCA (overrides config)");
    reduce->add_flag("--plot", plot, "also write an SVG scatter plot (needs n_components = 2)");

    auto* train = app.add_subcommand("train", "train the configured topology on all rows");
    add_common(train, common, false);
    auto* eval = app.add_subcommand("eval-loso", "leave-one-subject-out experiment");
    add_common(eval, common, true);
    auto* bench = app.add_subcommand("bench", "all methods x topologies benchmark table");
    add_common(bench, common, true);

    auto* plot_cmd = app.add_subcommand("plot", "SVG scatter plot of 2-D coordinates");
    std::string coords_path, labels_path, svg_path, title;
    plot_cmd->add_option("--coords", coords_path, "coordinate CSV (2 columns)")->required()->check(CLI::ExistingFile);
    plot_cmd->add_option("--labels", labels_path, "CSV whose first column is 'label'")->required()->check(CLI::ExistingFile);
    plot_cmd->add_option("--out", svg_path, "SVG file to write")->required();
    plot_cmd->add_option("--title", title, "plot title");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        namespace A = sfl::app;
        std::string out;
        std::string msg;
        if (plot_cmd->parsed()) {
            msg = A::cmd_plot(coords_path, labels_path, svg_path, title);
        } else {
            const std::size_t jobs = resolve_jobs(common);
            const auto cfg = resolve(common, out);
            const auto fmt = sfl::eval::parse_format(common.format);
            if (synth->parsed()) {
                msg = A::cmd_synth(cfg, out);
            } else if (features->parsed()) {
                msg = A::cmd_features(cfg, out, jobs);
            } else if (reduce->parsed()) {
                std::optional<sfl::manifold::Method> m;
                if (!method.empty()) m = sfl::manifold::parse_method(method);
                const auto mod = modality == "bio" ? sfl::pipeline::Modality::bio : sfl::pipeline::Modality::landmarks;
                msg = A::cmd_reduce(cfg, out, mod, m, plot, jobs);
            } else if (train->parsed()) {
                msg = A::cmd_train(cfg, out, jobs);
            } else if (eval->parsed()) {
                msg = A::cmd_eval_loso(cfg, out, fmt, jobs);
            } else if (bench->parsed()) {
                msg = A::cmd_bench(cfg, out, fmt, jobs);
            }
        }
        std::cout << msg << std::flush;
        return 0;
    } catch (const sfl::Error& e) {
        std::cerr << "sfl: error[" << sfl::kind_name(e.kind()) << "]: " << one_line(e.what()) << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "sfl: error[internal]: " << one_line(e.what()) << "\n";
        return 3;
    }
}
