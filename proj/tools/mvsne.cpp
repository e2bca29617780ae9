// Command-line surface: embed | benchmark | synth | plot | split.
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "mvsne/config.hpp"
#include "mvsne/csv.hpp"
#include "mvsne/dataset.hpp"
#include "mvsne/evaluate.hpp"
#include "mvsne/pipeline.hpp"
#include "mvsne/svg.hpp"
#include "mvsne/synth.hpp"

namespace fs = std::filesystem;
using namespace mvsne;

namespace {

struct CommonFlags {
    std::vector<std::string> views;
    std::string labels_path;
    std::string observed_path;
    std::string config_path;
    std::string out_dir = ".";
    char delimiter = ',';
    bool header = false;
    int id_column = -1;

    // pipeline overrides; only values the user actually passed are applied
    nlohmann::json overrides = nlohmann::json::object();
};

void add_data_flags(CLI::App* cmd, CommonFlags& f, bool need_labels) {
    cmd->add_option("--view", f.views, "view feature file (repeat per view)")
        ->required();
    auto* lab = cmd->add_option("--labels", f.labels_path, "class label file (one per sample)");
    if (need_labels) lab->required();
    cmd->add_option("--observed", f.observed_path,
                    "per-view observation mask file (N rows x M columns of 0/1)");
    cmd->add_option("--delimiter", f.delimiter, "field delimiter (default ',')");
    cmd->add_flag("--header", f.header, "input files carry a header row");
    cmd->add_option("--id-column", f.id_column,
                    "column carrying sample ids; rows are joined by id across views");
    cmd->add_option("--out", f.out_dir, "output directory")->required();
    cmd->add_option("--config", f.config_path, "JSON config file (flags win over it)");
}

// Registers the pipeline knobs; each lambda records the value into the
// override object only when the flag appears, preserving file/default values.
void add_pipeline_flags(CLI::App* cmd, CommonFlags& f) {
    auto& ov = f.overrides;
    auto opt_j = [&ov]() -> nlohmann::json& {
        if (!ov.contains("optimizer")) ov["optimizer"] = nlohmann::json::object();
        return ov["optimizer"];
    };
    cmd->add_option_function<double>(
        "--perplexity", [&ov](double v) { ov["perplexity"] = v; },
        "fixed perplexity (overrides the grid)");
    cmd->add_option_function<std::vector<double>>(
        "--perplexity-grid",
        [&ov](const std::vector<double>& v) { ov["perplexity_grid"] = v; },
        "comma-separated perplexity grid")
        ->delimiter(',');
    cmd->add_option_function<double>(
        "--pca-variance", [&ov](double v) { ov["pca_variance"] = v; },
        "cumulative variance target for PCA (default 0.8)");
    cmd->add_flag_function(
        "--no-pca", [&ov](std::int64_t) { ov["pca"] = false; },
        "embed the raw views without PCA reduction");
    cmd->add_option_function<std::vector<double>>(
        "--weights", [&ov](const std::vector<double>& v) { ov["weights"] = v; },
        "per-view weights incl. the label view (default equal)")
        ->delimiter(',');
    cmd->add_option_function<std::size_t>(
        "--iterations", [opt_j](std::size_t v) { opt_j()["iterations"] = v; },
        "optimizer iterations (default 1000)");
    cmd->add_option_function<double>(
        "--learning-rate", [opt_j](double v) { opt_j()["learning_rate"] = v; },
        "gradient step size (default 200)");
    cmd->add_option_function<double>(
        "--exaggeration", [opt_j](double v) { opt_j()["exaggeration"] = v; },
        "early-exaggeration factor (default 12)");
    cmd->add_option_function<std::size_t>(
        "--exaggeration-iters", [opt_j](std::size_t v) { opt_j()["exaggeration_iters"] = v; },
        "early-exaggeration duration (default 250)");
    cmd->add_option_function<double>(
        "--momentum-initial", [opt_j](double v) { opt_j()["momentum_initial"] = v; },
        "momentum before the switch (default 0.5)");
    cmd->add_option_function<double>(
        "--momentum-final", [opt_j](double v) { opt_j()["momentum_final"] = v; },
        "momentum after the switch (default 0.8)");
    cmd->add_option_function<std::size_t>(
        "--momentum-switch", [opt_j](std::size_t v) { opt_j()["momentum_switch"] = v; },
        "iteration of the momentum step-up (default 250)");
    cmd->add_option_function<double>(
        "--init-sd", [opt_j](double v) { opt_j()["init_sd"] = v; },
        "Gaussian initialization spread (default 1e-4)");
    cmd->add_option_function<std::size_t>(
        "--out-dim", [opt_j](std::size_t v) { opt_j()["out_dim"] = v; },
        "embedding dimension (default 2)");
    cmd->add_flag_function(
        "--no-gains", [opt_j](std::int64_t) { opt_j()["gains"] = false; },
        "disable adaptive per-coordinate learning rates");
    cmd->add_option_function<int>(
        "--threads", [opt_j](int v) { opt_j()["threads"] = v; },
        "worker threads (0 = hardware concurrency, default 1)");
    cmd->add_option_function<std::string>(
        "--kernels", [opt_j](const std::string& v) { opt_j()["kernels"] = v; },
        "inner-loop kernels: auto|scalar|avx2|neon");
    cmd->add_option_function<std::size_t>(
        "--k",
        [&ov](std::size_t v) {
            if (!ov.contains("knn")) ov["knn"] = nlohmann::json::object();
            ov["knn"]["k"] = v;
        },
        "fixed neighbour count (skips the grid search)");
    cmd->add_option_function<std::vector<std::size_t>>(
        "--k-grid",
        [&ov](const std::vector<std::size_t>& v) {
            if (!ov.contains("knn")) ov["knn"] = nlohmann::json::object();
            ov["knn"]["k_grid"] = v;
        },
        "comma-separated k grid (default 1,3,5,7,9,11,15,21)")
        ->delimiter(',');
    cmd->add_option_function<std::size_t>(
        "--cv-folds",
        [&ov](std::size_t v) {
            if (!ov.contains("knn")) ov["knn"] = nlohmann::json::object();
            ov["knn"]["cv_folds"] = v;
        },
        "stratified CV folds for the k search (default 5)");
    cmd->add_option_function<std::string>(
        "--affinity-mode", [&ov](const std::string& v) { ov["affinity_mode"] = v; },
        "joint (symmetrized, default) or conditional");
    cmd->add_option_function<std::uint64_t>(
        "--seed", [&ov](std::uint64_t v) { ov["seed"] = v; }, "master seed (default 0)");
}

PipelineConfig resolve_config(const CommonFlags& f) {
    PipelineConfig cfg;
    if (!f.config_path.empty()) {
        std::ifstream in(f.config_path);
        if (!in) throw ConfigError("cannot read config file: " + f.config_path);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(std::string("bad config JSON: ") + e.what());
        }
        apply_json(cfg, j);
    }
    apply_json(cfg, f.overrides);
    cfg.output_dir = f.out_dir;
    cfg.validate();
    return cfg;
}

MultiViewDataset load_dataset(const CommonFlags& f) {
    IngestionConfig schema{f.delimiter, f.header, f.id_column};
    std::optional<std::string> labels;
    if (!f.labels_path.empty()) labels = f.labels_path;
    MultiViewDataset ds = load_multiview(f.views, labels, schema);
    if (!f.observed_path.empty()) load_observed_masks(ds, f.observed_path, schema);
    ds.validate();
    return ds;
}

void write_text(const fs::path& path, const std::string& content) {
    csv::atomic_write(path.string(), content);
}

void write_json(const fs::path& path, const nlohmann::json& j) {
    write_text(path, j.dump(2) + "\n");
}

std::string embedding_csv(const MultiViewDataset& ds, const EmbedResult& result) {
    const Mat& y = result.embedding.coords;
    const std::size_t d = y.cols();
    std::vector<std::string> role(ds.n_samples(), "train");
    std::map<std::size_t, int> predicted;  // sample row -> class
    if (result.split) {
        for (auto idx : result.split->test_indices) role[idx] = "test";
        for (std::size_t i = 0; i < result.predicted.size(); ++i)
            predicted[result.split->test_indices[i]] = result.predicted[i];
    }
    std::string out = "sample_id";
    for (std::size_t c = 0; c < d; ++c) out += ",y" + std::to_string(c + 1);
    out += ",split_role,true_label,predicted_label\n";
    for (std::size_t i = 0; i < ds.n_samples(); ++i) {
        out += csv::escape_field(ds.sample_ids[i]);
        for (std::size_t c = 0; c < d; ++c) out += "," + csv::format_double(y(i, c));
        out += "," + role[i] + ",";
        if (ds.labels)
            out += csv::escape_field(ds.class_names[static_cast<std::size_t>((*ds.labels)[i])]);
        out += ",";
        auto it = predicted.find(i);
        if (it != predicted.end())
            out += csv::escape_field(ds.class_names[static_cast<std::size_t>(it->second)]);
        out += "\n";
    }
    return out;
}

std::string trace_csv(const Embedding& emb) {
    std::string out = "iteration,cost\n";
    for (std::size_t t = 0; t < emb.cost_trace.size(); ++t)
        out += std::to_string(t) + "," + csv::format_double(emb.cost_trace[t]) + "\n";
    return out;
}

std::string compact_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

nlohmann::json run_info_json(const CommonFlags& f, const PipelineConfig& cfg,
                             const std::string& variant) {
    nlohmann::json j;
    j["command_config"] = cfg.to_json();
    j["views"] = f.views;
    if (!f.labels_path.empty()) j["labels"] = f.labels_path;
    if (!f.observed_path.empty()) j["observed"] = f.observed_path;
    j["variant"] = variant;
    return j;
}

int cmd_embed(const CommonFlags& f, const std::string& variant_flag, double train_rate,
              const std::string& split_path) {
    PipelineConfig cfg = resolve_config(f);
    MultiViewDataset ds = load_dataset(f);

    std::optional<SplitSpec> split;
    if (!split_path.empty()) {
        std::ifstream in(split_path);
        if (!in) throw DataError("cannot read split file: " + split_path);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw DataError(std::string("bad split JSON: ") + e.what());
        }
        split = SplitSpec::from_json(j);
        split->validate(ds.n_samples());
    } else if (train_rate > 0.0) {
        if (!ds.labels) throw ConfigError("--train-rate needs --labels");
        split = stratified_split(ds, train_rate, cfg.seed);
    }

    std::string variant = variant_flag;
    if (variant.empty())
        variant = split ? (ds.fully_observed() ? "semi" : "generalized")
                        : (ds.fully_observed() ? "multi" : "generalized");
    if (variant == "multi") {
        split.reset();
    } else if (variant == "semi" || variant == "generalized") {
        if ((variant == "semi") && !split)
            throw ConfigError("variant semi needs --train-rate or --split");
    } else {
        throw ConfigError("unknown variant: " + variant + " (expected multi|semi|generalized)");
    }

    fs::create_directories(f.out_dir);
    EmbedContext ctx = EmbedContext::prepare(ds, cfg);

    const bool classify = split.has_value();
    const SplitSpec* sp = split ? &*split : nullptr;

    std::vector<EmbedResult> runs;
    if (cfg.perplexity) {
        runs.push_back(run_embed(ctx, *cfg.perplexity, sp, cfg.seed, classify));
    } else {
        if (!sp)
            throw ConfigError(
                "a perplexity grid needs labels and a split to rank by CV accuracy; pass "
                "--perplexity for an unsupervised embedding");
        std::vector<double> grid = cfg.perplexity_grid;
        std::sort(grid.begin(), grid.end());
        grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
        for (double rho : grid) {
            if (!ctx.feasible(rho)) continue;
            runs.push_back(run_embed(ctx, rho, sp, cfg.seed, classify));
        }
        if (runs.empty()) throw DataError("no feasible perplexity in the grid for this dataset");
    }

    // Primary artifact: the single run, or the grid winner by CV accuracy.
    std::size_t best = 0;
    for (std::size_t i = 1; i < runs.size(); ++i)
        if (runs[i].cv_accuracy > runs[best].cv_accuracy) best = i;

    const fs::path dir(f.out_dir);
    if (runs.size() > 1) {
        std::string summary = "perplexity,label_perplexity,k,cv_accuracy\n";
        std::vector<std::size_t> order(runs.size());
        for (std::size_t i = 0; i < runs.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return runs[a].cv_accuracy > runs[b].cv_accuracy;
        });
        for (auto i : order) {
            summary += compact_number(runs[i].perplexity) + "," +
                       compact_number(runs[i].label_perplexity) + "," +
                       std::to_string(runs[i].k_used) + "," +
                       csv::format_double(runs[i].cv_accuracy) + "\n";
            write_text(dir / ("embedding_p" + compact_number(runs[i].perplexity) + ".csv"),
                       embedding_csv(ds, runs[i]));
        }
        write_text(dir / "grid_summary.csv", summary);
    }
    write_text(dir / "embedding.csv", embedding_csv(ds, runs[best]));
    write_text(dir / "cost_trace.csv", trace_csv(runs[best].embedding));

    nlohmann::json info = run_info_json(f, cfg, variant);
    info["perplexity_used"] = runs[best].perplexity;
    if (sp) {
        info["split"] = sp->to_json();
        info["label_perplexity"] = runs[best].label_perplexity;
        info["k"] = runs[best].k_used;
        info["cv_accuracy"] = runs[best].cv_accuracy;
    }
    write_json(dir / "config.json", info);
    std::cout << "embedding written to " << (dir / "embedding.csv").string() << "\n";
    return 0;
}

int cmd_benchmark(const CommonFlags& f) {
    PipelineConfig cfg = resolve_config(f);
    MultiViewDataset ds = load_dataset(f);
    if (!ds.labels) throw ConfigError("benchmark needs --labels");

    BenchmarkReport report = run_benchmark(ds, cfg.rates, cfg.n_iter, cfg.seed, cfg);

    fs::create_directories(f.out_dir);
    const fs::path dir(f.out_dir);
    nlohmann::json j = report.to_json();
    j["inputs"] = run_info_json(f, cfg, "semi");
    write_json(dir / "benchmark.json", j);
    write_text(dir / "summary.txt", report.summary_table());
    write_json(dir / "config.json", run_info_json(f, cfg, "semi"));
    std::cout << report.summary_table();
    return 0;
}

int cmd_synth(const std::string& out_dir, const std::string& kind, NdsParams params) {
    MultiViewDataset ds = generate_nds(params);
    if (kind == "imbalanced")
        ds = subset_nds(ds, NdsSubset::Imbalanced, params.seed);
    else if (kind == "small")
        ds = subset_nds(ds, NdsSubset::Small, params.seed);
    else if (kind != "full")
        throw ConfigError("unknown kind: " + kind + " (expected full|imbalanced|small)");

    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    for (std::size_t v = 0; v < ds.n_views(); ++v) {
        std::string out;
        const Mat& x = ds.views[v];
        for (std::size_t i = 0; i < x.rows(); ++i) {
            for (std::size_t c = 0; c < x.cols(); ++c) {
                if (c) out += ",";
                out += csv::format_double(x(i, c));
            }
            out += "\n";
        }
        write_text(dir / ("view" + std::to_string(v + 1) + ".csv"), out);
    }
    std::string labels;
    for (std::size_t i = 0; i < ds.n_samples(); ++i)
        labels += ds.class_names[static_cast<std::size_t>((*ds.labels)[i])] + "\n";
    write_text(dir / "labels.csv", labels);
    nlohmann::json meta = params.to_json();
    meta["kind"] = kind;
    meta["n_samples"] = ds.n_samples();
    write_json(dir / "params.json", meta);
    std::cout << "wrote " << ds.n_samples() << " samples x " << ds.n_views() << " views to "
              << out_dir << "\n";
    return 0;
}

int cmd_plot(const std::string& embedding_path, const std::string& out_path,
             ScatterOptions options) {
    csv::Table t = csv::read_table(embedding_path, {',', true});
    auto col = [&](const std::string& name) -> std::size_t {
        for (std::size_t i = 0; i < t.header.size(); ++i)
            if (t.header[i] == name) return i;
        throw DataError(embedding_path + ": missing column '" + name + "'");
    };
    const std::size_t cy1 = col("y1"), cy2 = col("y2");
    const std::size_t crole = col("split_role"), clabel = col("true_label");

    std::vector<ScatterPoint> pts;
    std::vector<std::string> classes;
    for (const auto& row : t.rows) {
        ScatterPoint p;
        try {
            p.x = std::stod(row[cy1]);
            p.y = std::stod(row[cy2]);
        } catch (const std::exception&) {
            throw DataError(embedding_path + ": non-numeric coordinate");
        }
        p.train = row[crole] == "train";
        const std::string& name = row[clabel];
        if (!name.empty()) {
            auto it = std::find(classes.begin(), classes.end(), name);
            if (it == classes.end()) {
                classes.push_back(name);
                p.label = static_cast<int>(classes.size()) - 1;
            } else {
                p.label = static_cast<int>(it - classes.begin());
            }
        }
        pts.push_back(p);
    }
    write_text(out_path, render_scatter(pts, classes, options));
    std::cout << "plot written to " << out_path << "\n";
    return 0;
}

int cmd_split(const std::string& labels_path, double rate, std::uint64_t seed,
              const std::string& out_path, char delimiter, bool header) {
    csv::Table t = csv::read_table(labels_path, {delimiter, header});
    std::vector<int> labels;
    std::vector<std::string> names;
    for (const auto& row : t.rows) {
        const std::string& name = row.front();
        auto it = std::find(names.begin(), names.end(), name);
        if (it == names.end()) {
            names.push_back(name);
            labels.push_back(static_cast<int>(names.size()) - 1);
        } else {
            labels.push_back(static_cast<int>(it - names.begin()));
        }
    }
    const SplitSpec spec = stratified_split_labels(labels, names.size(), rate, seed);
    write_json(out_path, spec.to_json());
    std::cout << "split with " << spec.train_indices.size() << " train / "
              << spec.test_indices.size() << " test rows written to " << out_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-view embedding and semi-supervised classification"};
    app.require_subcommand(1);

    CommonFlags embed_f, bench_f;
    std::string embed_variant, embed_split_path;
    double embed_rate = -1.0;

    auto* embed = app.add_subcommand("embed", "embed one dataset and write coordinates");
    add_data_flags(embed, embed_f, false);
    add_pipeline_flags(embed, embed_f);
    embed->add_option("--variant", embed_variant, "multi|semi|generalized (default inferred)");
    embed->add_option("--train-rate", embed_rate, "draw a stratified split at this rate");
    embed->add_option("--split", embed_split_path, "use a previously saved split JSON");

    auto* bench = app.add_subcommand("benchmark", "repeated-split evaluation");
    add_data_flags(bench, bench_f, true);
    add_pipeline_flags(bench, bench_f);
    bench->add_option_function<std::vector<double>>(
             "--rates",
             [&bench_f](const std::vector<double>& v) { bench_f.overrides["rates"] = v; },
             "training rates (default 0.1,0.2,0.5,0.8)")
        ->delimiter(',');
    bench->add_option_function<std::size_t>(
        "--n-iter", [&bench_f](std::size_t v) { bench_f.overrides["n_iter"] = v; },
        "split/embed repeats per rate (default 100)");

    std::string synth_out, synth_kind = "full";
    NdsParams synth_params;
    auto* synth = app.add_subcommand("synth", "generate the synthetic 4-view benchmark");
    synth->add_option("--out", synth_out, "output directory")->required();
    synth->add_option("--kind", synth_kind, "full|imbalanced|small (default full)");
    synth->add_option("--seed", synth_params.seed, "generator seed (default 7)");
    synth->add_option("--offset", synth_params.class_mean_offset,
                      "class mean offset in the signal views (default 1.5)");
    synth->add_option("--noise-sd", synth_params.noise_sd, "epsilon spread (default 0.5)");

    std::string plot_in, plot_out;
    ScatterOptions plot_opts;
    auto* plot = app.add_subcommand("plot", "render an embedding CSV as SVG");
    plot->add_option("--embedding", plot_in, "embedding CSV")->required();
    plot->add_option("--out", plot_out, "output SVG path")->required();
    plot->add_flag("--black-squares", plot_opts.black_test_squares,
                   "draw test/unlabelled squares black");
    plot->add_option("--title", plot_opts.title, "plot title");
    plot->add_option("--width", plot_opts.width, "canvas width (default 760)");
    plot->add_option("--height", plot_opts.height, "canvas height (default 560)");

    std::string split_labels, split_out;
    double split_rate = 0.0;
    std::uint64_t split_seed = 0;
    char split_delim = ',';
    bool split_header = false;
    auto* split = app.add_subcommand("split", "draw and save a stratified split");
    split->add_option("--labels", split_labels, "class label file")->required();
    split->add_option("--rate", split_rate, "training fraction in (0,1)")->required();
    split->add_option("--seed", split_seed, "split seed (default 0)");
    split->add_option("--out", split_out, "output JSON path")->required();
    split->add_option("--delimiter", split_delim, "field delimiter (default ',')");
    split->add_flag("--header", split_header, "label file carries a header row");

    try {
        app.parse(argc, argv);
        if (embed->parsed()) return cmd_embed(embed_f, embed_variant, embed_rate, embed_split_path);
        if (bench->parsed()) return cmd_benchmark(bench_f);
        if (synth->parsed()) return cmd_synth(synth_out, synth_kind, synth_params);
        if (plot->parsed()) return cmd_plot(plot_in, plot_out, plot_opts);
        if (split->parsed())
            return cmd_split(split_labels, split_rate, split_seed, split_out, split_delim,
                             split_header);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const NumericError& e) {
        std::cerr << "numerical abort: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
