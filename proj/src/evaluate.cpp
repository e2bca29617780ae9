#include "mvsne/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "mvsne/csv.hpp"
#include "mvsne/pipeline.hpp"

namespace mvsne {

SetMetrics set_metrics(const std::vector<std::vector<int>>& truth_sets,
                       const std::vector<std::vector<int>>& predicted_sets) {
    if (truth_sets.size() != predicted_sets.size())
        throw DataError("true/predicted length mismatch");
    if (truth_sets.empty()) throw DataError("empty evaluation input");
    SetMetrics m;
    for (std::size_t i = 0; i < truth_sets.size(); ++i) {
        const std::set<int> t(truth_sets[i].begin(), truth_sets[i].end());
        const std::set<int> p(predicted_sets[i].begin(), predicted_sets[i].end());
        if (t.empty() || p.empty()) throw DataError("empty label set");
        std::size_t inter = 0;
        for (int v : t) inter += p.count(v);
        const std::size_t uni = t.size() + p.size() - inter;
        m.accuracy += static_cast<double>(inter) / static_cast<double>(uni);
        m.precision += static_cast<double>(inter) / static_cast<double>(t.size());
        m.recall += static_cast<double>(inter) / static_cast<double>(p.size());
    }
    const double n = static_cast<double>(truth_sets.size());
    m.accuracy /= n;
    m.precision /= n;
    m.recall /= n;
    return m;
}

EvalReport compute_metrics(const std::vector<int>& true_classes,
                           const std::vector<int>& predicted_classes, std::size_t n_classes) {
    if (true_classes.size() != predicted_classes.size())
        throw DataError("true/predicted length mismatch");
    if (true_classes.empty()) throw DataError("empty evaluation input");
    std::vector<std::vector<int>> t, p;
    for (std::size_t i = 0; i < true_classes.size(); ++i) {
        if (true_classes[i] < 0 || static_cast<std::size_t>(true_classes[i]) >= n_classes ||
            predicted_classes[i] < 0 ||
            static_cast<std::size_t>(predicted_classes[i]) >= n_classes)
            throw DataError("class index out of range");
        t.push_back({true_classes[i]});
        p.push_back({predicted_classes[i]});
    }
    const SetMetrics m = set_metrics(t, p);
    EvalReport r;
    r.accuracy = m.accuracy;
    r.precision = m.precision;
    r.recall = m.recall;
    r.n_test = true_classes.size();
    r.confusion.assign(n_classes, std::vector<std::size_t>(n_classes, 0));
    for (std::size_t i = 0; i < true_classes.size(); ++i)
        ++r.confusion[static_cast<std::size_t>(true_classes[i])]
                     [static_cast<std::size_t>(predicted_classes[i])];
    return r;
}

nlohmann::json EvalReport::to_json() const {
    return {{"accuracy", accuracy},
            {"precision", precision},
            {"recall", recall},
            {"n_test", n_test},
            {"confusion", confusion}};
}

nlohmann::json RepeatResult::to_json() const {
    nlohmann::json j{{"repeat", repeat}, {"seed", seed}, {"failed", failed}};
    if (failed) {
        j["error"] = error;
    } else {
        j["report"] = report.to_json();
        j["perplexity"] = perplexity;
        j["label_perplexity"] = label_perplexity;
        j["k"] = k_used;
        j["cv_accuracy"] = cv_accuracy;
    }
    return j;
}

nlohmann::json RateBlock::to_json() const {
    nlohmann::json reps = nlohmann::json::array();
    for (const auto& r : repeats) reps.push_back(r.to_json());
    nlohmann::json scores = nlohmann::json::array();
    for (const auto& g : grid_scores)
        scores.push_back({{"perplexity", g.perplexity},
                          {"mean_accuracy", g.mean_accuracy},
                          {"n_failed", g.n_failed}});
    return {{"rate", rate},
            {"chosen_perplexity", chosen_perplexity},
            {"grid_scores", scores},
            {"repeats", reps},
            {"n_failed", n_failed},
            {"mean_accuracy", mean_accuracy},
            {"sd_accuracy", sd_accuracy},
            {"mean_precision", mean_precision},
            {"sd_precision", sd_precision},
            {"mean_recall", mean_recall},
            {"sd_recall", sd_recall}};
}

nlohmann::json BenchmarkReport::to_json() const {
    nlohmann::json blocks = nlohmann::json::array();
    for (const auto& b : rate_blocks) blocks.push_back(b.to_json());
    return {{"rates", blocks},
            {"base_seed", base_seed},
            {"n_iter", n_iter},
            {"config", config_echo}};
}

std::string BenchmarkReport::summary_table() const {
    auto cell = [](double mean, double sd) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.3f (%.3f)", mean, sd);
        return std::string(buf);
    };
    std::string out = "rate   perplexity  accuracy        precision       recall          n\n";
    for (const auto& b : rate_blocks) {
        char head[64];
        std::snprintf(head, sizeof(head), "%-6.2f %-11g ", b.rate, b.chosen_perplexity);
        out += head;
        char body[128];
        std::snprintf(body, sizeof(body), "%-15s %-15s %-15s %zu\n",
                      cell(b.mean_accuracy, b.sd_accuracy).c_str(),
                      cell(b.mean_precision, b.sd_precision).c_str(),
                      cell(b.mean_recall, b.sd_recall).c_str(),
                      b.repeats.size() - b.n_failed);
        out += body;
    }
    return out;
}

namespace {

void finalize_aggregates(RateBlock& block) {
    std::vector<double> acc, prec, rec;
    for (const auto& r : block.repeats) {
        if (r.failed) {
            ++block.n_failed;
            continue;
        }
        acc.push_back(r.report.accuracy);
        prec.push_back(r.report.precision);
        rec.push_back(r.report.recall);
    }
    auto mean_sd = [](const std::vector<double>& v, double& mean, double& sd) {
        if (v.empty()) {
            mean = sd = 0.0;
            return;
        }
        mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        if (v.size() < 2) {
            sd = 0.0;
            return;
        }
        double ss = 0.0;
        for (double x : v) ss += (x - mean) * (x - mean);
        sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
    };
    mean_sd(acc, block.mean_accuracy, block.sd_accuracy);
    mean_sd(prec, block.mean_precision, block.sd_precision);
    mean_sd(rec, block.mean_recall, block.sd_recall);
}

}  // namespace

BenchmarkReport run_benchmark(const MultiViewDataset& dataset, const std::vector<double>& rates,
                              std::size_t n_iter, std::uint64_t base_seed,
                              const PipelineConfig& pipeline) {
    if (!dataset.labels) throw DataError("benchmark needs a labelled dataset");
    if (rates.empty()) throw ConfigError("need at least one training rate");
    if (n_iter == 0) throw ConfigError("need at least one repeat");

    EmbedContext ctx = EmbedContext::prepare(dataset, pipeline);

    std::vector<double> grid;
    if (pipeline.perplexity) {
        grid.push_back(*pipeline.perplexity);
    } else {
        grid = pipeline.perplexity_grid;
        std::sort(grid.begin(), grid.end());
        grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    }

    BenchmarkReport out;
    out.base_seed = base_seed;
    out.n_iter = n_iter;
    out.config_echo = pipeline.to_json();

    for (double rate : rates) {
        // Every feasible grid value runs the full set of repeats (splits are
        // paired: repeat r uses seed base_seed + r for every candidate); the
        // rate reports the candidate with the best mean test accuracy, ties
        // falling to the smaller perplexity via the ascending grid order.
        RateBlock best_block;
        bool have = false;
        std::vector<GridScore> scores;
        for (double rho : grid) {
            if (!ctx.feasible(rho)) continue;
            RateBlock block;
            block.rate = rate;
            block.chosen_perplexity = rho;
            for (std::size_t rep = 0; rep < n_iter; ++rep) {
                RepeatResult rr;
                rr.repeat = rep;
                rr.seed = base_seed + rep;
                try {
                    const SplitSpec split = stratified_split(dataset, rate, rr.seed);
                    EmbedResult er = run_embed(ctx, rho, &split, rr.seed, true);
                    std::vector<int> truth;
                    for (auto idx : split.test_indices) truth.push_back((*dataset.labels)[idx]);
                    rr.report = compute_metrics(truth, er.predicted, dataset.n_classes());
                    rr.perplexity = er.perplexity;
                    rr.label_perplexity = er.label_perplexity;
                    rr.k_used = er.k_used;
                    rr.cv_accuracy = er.cv_accuracy;
                } catch (const std::exception& e) {
                    rr.failed = true;
                    rr.error = e.what();
                }
                block.repeats.push_back(std::move(rr));
            }
            finalize_aggregates(block);
            scores.push_back({rho, block.mean_accuracy, block.n_failed});
            if (!have || block.mean_accuracy > best_block.mean_accuracy) {
                best_block = std::move(block);
                have = true;
            }
        }
        if (!have) throw DataError("no feasible perplexity in the grid for this dataset");
        best_block.grid_scores = std::move(scores);
        out.rate_blocks.push_back(std::move(best_block));
    }
    return out;
}

}  // namespace mvsne
