#include "doctest.h"

#include "mvsne/config.hpp"

using namespace mvsne;

TEST_CASE("defaults validate and echo completely") {
    PipelineConfig cfg;
    cfg.validate();
    auto j = cfg.to_json();
    CHECK(j["pca_variance"] == 0.8);
    CHECK(j["pca"] == true);
    CHECK(j["perplexity_grid"] == nlohmann::json({2, 10, 20, 50, 80, 100, 200}));
    CHECK(j["optimizer"]["iterations"] == 1000);
    CHECK(j["optimizer"]["learning_rate"] == 200.0);
    CHECK(j["optimizer"]["exaggeration"] == 12.0);
    CHECK(j["optimizer"]["momentum_initial"] == 0.5);
    CHECK(j["optimizer"]["momentum_final"] == 0.8);
    CHECK(j["knn"]["k_grid"] == nlohmann::json({1, 3, 5, 7, 9, 11, 15, 21}));
    CHECK(j["knn"]["cv_folds"] == 5);
    CHECK(j["rates"] == nlohmann::json({0.1, 0.2, 0.5, 0.8}));
    CHECK(j["n_iter"] == 100);
    CHECK(j["weights"] == "equal");
    CHECK(j["affinity_mode"] == "joint");
}

TEST_CASE("overlay applies only the keys present") {
    PipelineConfig cfg;
    apply_json(cfg, {{"perplexity", 30.0}, {"optimizer", {{"iterations", 250}}}});
    CHECK(*cfg.perplexity == 30.0);
    CHECK(cfg.optimizer.iterations == 250);
    CHECK(cfg.optimizer.learning_rate == 200.0);  // untouched default
    CHECK(cfg.pca_variance == 0.8);
}

TEST_CASE("round-trip through JSON preserves the configuration") {
    PipelineConfig cfg;
    cfg.perplexity = 42.0;
    cfg.weights = {0.25, 0.75};
    cfg.knn.k = 7;
    cfg.optimizer.gains = false;
    cfg.seed = 99;
    auto back = PipelineConfig::from_json(cfg.to_json());
    CHECK(back.to_json().dump() == cfg.to_json().dump());
}

TEST_CASE("unknown keys are rejected by name") {
    PipelineConfig cfg;
    CHECK_THROWS_AS(apply_json(cfg, {{"perplexitee", 30.0}}), ConfigError);
    CHECK_THROWS_AS(apply_json(cfg, {{"optimizer", {{"lr", 1.0}}}}), ConfigError);
    CHECK_THROWS_AS(apply_json(cfg, {{"knn", {{"folds", 3}}}}), ConfigError);
    CHECK_THROWS_AS(apply_json(cfg, nlohmann::json::array()), ConfigError);
}

TEST_CASE("badly typed values name the offending key") {
    PipelineConfig cfg;
    try {
        apply_json(cfg, {{"perplexity", "lots"}});
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("perplexity") != std::string::npos);
    }
}

TEST_CASE("validation catches out-of-range settings") {
    PipelineConfig cfg;
    cfg.pca_variance = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = PipelineConfig();
    cfg.perplexity = -1.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = PipelineConfig();
    cfg.rates = {1.5};
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = PipelineConfig();
    cfg.weights = {0.5, 0.6};  // must sum to 1
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = PipelineConfig();
    cfg.knn.cv_folds = 1;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = PipelineConfig();
    cfg.optimizer.out_dim = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("affinity mode parses both names and rejects others") {
    CHECK(parse_affinity_mode("joint") == AffinityMode::Joint);
    CHECK(parse_affinity_mode("conditional") == AffinityMode::Conditional);
    CHECK_THROWS_AS(parse_affinity_mode("sym"), ConfigError);
    CHECK(std::string(affinity_mode_name(AffinityMode::Joint)) == "joint");
}
