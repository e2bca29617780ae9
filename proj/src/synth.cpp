#include "mvsne/synth.hpp"

#include <algorithm>
#include <cmath>

namespace mvsne {

nlohmann::json NdsParams::to_json() const {
    return {{"n_per_class", n_per_class},
            {"dims", dims},
            {"class_mean_offset", class_mean_offset},
            {"noise_mean", noise_mean},
            {"noise_sd", noise_sd},
            {"poly_degree", poly_degree},
            {"poly_coeff", poly_coeff},
            {"seed", seed}};
}

MultiViewDataset generate_nds(const NdsParams& params) {
    for (auto n : params.n_per_class)
        if (n < 2) throw ConfigError("each class needs at least 2 samples");
    for (auto d : params.dims)
        if (d < 1) throw ConfigError("each view needs at least 1 feature");
    if (!(params.noise_sd >= 0.0)) throw ConfigError("noise spread cannot be negative");

    const std::size_t n =
        params.n_per_class[0] + params.n_per_class[1] + params.n_per_class[2];

    MultiViewDataset ds;
    ds.class_names = {"A", "B", "C"};
    std::vector<int> labels;
    for (int c = 0; c < 3; ++c)
        labels.insert(labels.end(), params.n_per_class[static_cast<std::size_t>(c)], c);
    ds.labels = labels;
    for (std::size_t i = 0; i < n; ++i) ds.sample_ids.push_back(std::to_string(i));

    for (std::size_t v = 0; v < 4; ++v) {
        Rng rng = Rng::derived(params.seed, 0x4e445356ull + v);  // "NDSV" + view
        const std::size_t p = params.dims[v];
        Mat x(n, p);
        for (std::size_t i = 0; i < n; ++i) {
            const double mu =
                (v < 3 && labels[i] == static_cast<int>(v)) ? params.class_mean_offset : 0.0;
            for (std::size_t j = 0; j < p; ++j) {
                const double raw = mu + rng.gaussian() +
                                   (params.noise_mean + rng.gaussian() * params.noise_sd);
                x(i, j) = raw + params.poly_coeff * std::pow(raw, params.poly_degree);
            }
        }
        ds.views.push_back(std::move(x));
    }
    ds.observed.assign(4, std::vector<std::uint8_t>(n, 1));
    ds.validate();
    return ds;
}

MultiViewDataset subset_nds(const MultiViewDataset& dataset, NdsSubset kind,
                            std::uint64_t seed) {
    if (dataset.n_classes() != 3 || !dataset.labels)
        throw DataError("subset generation needs the 3-class synthetic dataset");
    const std::array<std::size_t, 3> targets =
        kind == NdsSubset::Imbalanced ? std::array<std::size_t, 3>{100, 20, 30}
                                      : std::array<std::size_t, 3>{10, 10, 10};

    std::vector<std::size_t> keep;
    for (int c = 0; c < 3; ++c) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < dataset.n_samples(); ++i)
            if ((*dataset.labels)[i] == c) idx.push_back(i);
        const std::size_t want = targets[static_cast<std::size_t>(c)];
        if (want > idx.size())
            throw DataError("class " + dataset.class_names[static_cast<std::size_t>(c)] +
                            " has " + std::to_string(idx.size()) + " samples, need " +
                            std::to_string(want));
        if (kind == NdsSubset::Imbalanced && c == 0) {
            // class A kept verbatim
            keep.insert(keep.end(), idx.begin(), idx.end());
        } else {
            Rng rng = Rng::derived(seed, 0x53554253ull + static_cast<std::uint64_t>(c));
            rng.shuffle(idx);
            idx.resize(want);
            std::sort(idx.begin(), idx.end());
            keep.insert(keep.end(), idx.begin(), idx.end());
        }
    }
    std::sort(keep.begin(), keep.end());
    return dataset.subset(keep);
}

}  // namespace mvsne
