#include "mvsne/config.hpp"

#include <algorithm>

namespace mvsne {

void PipelineConfig::validate() const {
    if (perplexity && !(*perplexity > 0.0)) throw ConfigError("perplexity must be positive");
    if (!perplexity && perplexity_grid.empty())
        throw ConfigError("need a perplexity or a non-empty grid");
    for (double p : perplexity_grid)
        if (!(p > 0.0)) throw ConfigError("perplexity grid values must be positive");
    if (!(pca_variance > 0.0 && pca_variance <= 1.0))
        throw ConfigError("pca variance target must be in (0, 1]");
    optimizer.validate();
    if (!weights.empty()) ViewWeights{weights}.validate();
    if (knn.k && *knn.k == 0) throw ConfigError("k must be positive");
    if (!knn.k && knn.k_grid.empty()) throw ConfigError("need a k or a non-empty k grid");
    if (knn.cv_folds < 2) throw ConfigError("cross-validation needs at least 2 folds");
    if (rates.empty()) throw ConfigError("need at least one training rate");
    for (double r : rates)
        if (!(r > 0.0 && r < 1.0)) throw ConfigError("training rates must lie in (0, 1)");
    if (n_iter == 0) throw ConfigError("need at least one benchmark repeat");
}

nlohmann::json PipelineConfig::to_json() const {
    nlohmann::json j;
    if (perplexity) j["perplexity"] = *perplexity;
    j["perplexity_grid"] = perplexity_grid;
    j["pca_variance"] = pca_variance;
    j["pca"] = pca;
    j["optimizer"] = {{"iterations", optimizer.iterations},
                      {"learning_rate", optimizer.learning_rate},
                      {"momentum_initial", optimizer.momentum_initial},
                      {"momentum_final", optimizer.momentum_final},
                      {"momentum_switch", optimizer.momentum_switch},
                      {"exaggeration", optimizer.exaggeration},
                      {"exaggeration_iters", optimizer.exaggeration_iters},
                      {"init_sd", optimizer.init_sd},
                      {"out_dim", optimizer.out_dim},
                      {"gains", optimizer.gains},
                      {"threads", optimizer.threads},
                      {"kernels", kern::mode_name(optimizer.kernel_mode)}};
    if (!weights.empty())
        j["weights"] = weights;
    else
        j["weights"] = "equal";
    nlohmann::json knn_j;
    if (knn.k) knn_j["k"] = *knn.k;
    knn_j["k_grid"] = knn.k_grid;
    knn_j["cv_folds"] = knn.cv_folds;
    j["knn"] = knn_j;
    j["rates"] = rates;
    j["n_iter"] = n_iter;
    j["seed"] = seed;
    j["affinity_mode"] = affinity_mode_name(affinity_mode);
    j["output_dir"] = output_dir;
    return j;
}

void apply_json(PipelineConfig& cfg, const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [key, val] : j.items()) {
        try {
            if (key == "perplexity") {
                cfg.perplexity = val.get<double>();
            } else if (key == "perplexity_grid") {
                cfg.perplexity_grid = val.get<std::vector<double>>();
            } else if (key == "pca_variance") {
                cfg.pca_variance = val.get<double>();
            } else if (key == "pca") {
                cfg.pca = val.get<bool>();
            } else if (key == "optimizer") {
                for (const auto& [ok, ov] : val.items()) {
                    if (ok == "iterations")
                        cfg.optimizer.iterations = ov.get<std::size_t>();
                    else if (ok == "learning_rate")
                        cfg.optimizer.learning_rate = ov.get<double>();
                    else if (ok == "momentum_initial")
                        cfg.optimizer.momentum_initial = ov.get<double>();
                    else if (ok == "momentum_final")
                        cfg.optimizer.momentum_final = ov.get<double>();
                    else if (ok == "momentum_switch")
                        cfg.optimizer.momentum_switch = ov.get<std::size_t>();
                    else if (ok == "exaggeration")
                        cfg.optimizer.exaggeration = ov.get<double>();
                    else if (ok == "exaggeration_iters")
                        cfg.optimizer.exaggeration_iters = ov.get<std::size_t>();
                    else if (ok == "init_sd")
                        cfg.optimizer.init_sd = ov.get<double>();
                    else if (ok == "out_dim")
                        cfg.optimizer.out_dim = ov.get<std::size_t>();
                    else if (ok == "gains")
                        cfg.optimizer.gains = ov.get<bool>();
                    else if (ok == "threads")
                        cfg.optimizer.threads = ov.get<int>();
                    else if (ok == "kernels")
                        cfg.optimizer.kernel_mode = kern::parse_mode(ov.get<std::string>());
                    else
                        throw ConfigError("unknown optimizer key: " + ok);
                }
            } else if (key == "weights") {
                if (val.is_string() && val.get<std::string>() == "equal")
                    cfg.weights.clear();
                else
                    cfg.weights = val.get<std::vector<double>>();
            } else if (key == "knn") {
                for (const auto& [kk, kv] : val.items()) {
                    if (kk == "k")
                        cfg.knn.k = kv.get<std::size_t>();
                    else if (kk == "k_grid")
                        cfg.knn.k_grid = kv.get<std::vector<std::size_t>>();
                    else if (kk == "cv_folds")
                        cfg.knn.cv_folds = kv.get<std::size_t>();
                    else
                        throw ConfigError("unknown knn key: " + kk);
                }
            } else if (key == "rates") {
                cfg.rates = val.get<std::vector<double>>();
            } else if (key == "n_iter") {
                cfg.n_iter = val.get<std::size_t>();
            } else if (key == "seed") {
                cfg.seed = val.get<std::uint64_t>();
            } else if (key == "affinity_mode") {
                cfg.affinity_mode = parse_affinity_mode(val.get<std::string>());
            } else if (key == "output_dir") {
                cfg.output_dir = val.get<std::string>();
            } else {
                throw ConfigError("unknown config key: " + key);
            }
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("bad value for config key '" + key + "': " + e.what());
        }
    }
}

PipelineConfig PipelineConfig::from_json(const nlohmann::json& j) {
    PipelineConfig cfg;
    apply_json(cfg, j);
    return cfg;
}

const char* affinity_mode_name(AffinityMode m) {
    return m == AffinityMode::Joint ? "joint" : "conditional";
}

AffinityMode parse_affinity_mode(const std::string& s) {
    if (s == "joint") return AffinityMode::Joint;
    if (s == "conditional") return AffinityMode::Conditional;
    throw ConfigError("unknown affinity mode: " + s + " (expected joint|conditional)");
}

}  // namespace mvsne
