#include "mvsne/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "mvsne/csv.hpp"

namespace mvsne {

bool MultiViewDataset::fully_observed() const {
    for (const auto& mask : observed)
        for (auto f : mask)
            if (!f) return false;
    return true;
}

void MultiViewDataset::validate() const {
    const std::size_t n = n_samples();
    if (views.empty()) throw DataError("dataset has no views");
    for (std::size_t m = 0; m < views.size(); ++m) {
        if (views[m].rows() != n)
            throw DataError("view " + std::to_string(m + 1) + " has " +
                            std::to_string(views[m].rows()) + " rows, expected " +
                            std::to_string(n));
        if (views[m].cols() < 1)
            throw DataError("view " + std::to_string(m + 1) + " has no features");
        if (!views[m].all_finite())
            throw DataError("view " + std::to_string(m + 1) + " contains non-finite values");
    }
    if (observed.size() != views.size())
        throw DataError("observed mask count does not match view count");
    for (std::size_t m = 0; m < observed.size(); ++m)
        if (observed[m].size() != n)
            throw DataError("observed mask for view " + std::to_string(m + 1) +
                            " has wrong length");
    if (labels) {
        if (labels->size() != n) throw DataError("label count does not match sample count");
        const std::size_t c = n_classes();
        if (c < 2) throw DataError("need at least 2 classes");
        std::vector<std::size_t> counts(c, 0);
        for (int l : *labels) {
            if (l < 0 || static_cast<std::size_t>(l) >= c)
                throw DataError("class index out of range: " + std::to_string(l));
            ++counts[static_cast<std::size_t>(l)];
        }
        for (std::size_t k = 0; k < c; ++k)
            if (counts[k] == 0)
                throw DataError("class '" + class_names[k] + "' has no members");
    }
}

MultiViewDataset MultiViewDataset::subset(const std::vector<std::size_t>& indices) const {
    MultiViewDataset out;
    out.class_names = class_names;
    for (const auto& v : views) {
        Mat s(indices.size(), v.cols());
        for (std::size_t i = 0; i < indices.size(); ++i)
            std::copy(v.row(indices[i]), v.row(indices[i]) + v.cols(), s.row(i));
        out.views.push_back(std::move(s));
    }
    for (auto idx : indices) out.sample_ids.push_back(sample_ids[idx]);
    if (labels) {
        std::vector<int> l;
        for (auto idx : indices) l.push_back((*labels)[idx]);
        out.labels = std::move(l);
    }
    for (const auto& mask : observed) {
        std::vector<std::uint8_t> m;
        for (auto idx : indices) m.push_back(mask[idx]);
        out.observed.push_back(std::move(m));
    }
    return out;
}

nlohmann::json SplitSpec::to_json() const {
    return {{"rate", rate}, {"seed", seed}, {"train", train_indices}, {"test", test_indices}};
}

SplitSpec SplitSpec::from_json(const nlohmann::json& j) {
    SplitSpec s;
    s.rate = j.at("rate").get<double>();
    s.seed = j.at("seed").get<std::uint64_t>();
    s.train_indices = j.at("train").get<std::vector<std::size_t>>();
    s.test_indices = j.at("test").get<std::vector<std::size_t>>();
    return s;
}

void SplitSpec::validate(std::size_t n) const {
    std::vector<std::uint8_t> seen(n, 0);
    for (auto i : train_indices) {
        if (i >= n || seen[i]) throw DataError("invalid split: bad train index");
        seen[i] = 1;
    }
    for (auto i : test_indices) {
        if (i >= n || seen[i]) throw DataError("invalid split: bad or duplicate test index");
        seen[i] = 1;
    }
    if (train_indices.size() + test_indices.size() != n)
        throw DataError("invalid split: does not cover all samples");
}

namespace {

struct LoadedView {
    Mat matrix;
    std::vector<std::string> ids;  // empty when no id column
};

LoadedView load_view_file(const std::string& path, const IngestionConfig& schema) {
    csv::Table table = csv::read_table(path, {schema.delimiter, schema.header});
    LoadedView out;
    if (schema.id_column < 0) {
        out.matrix = csv::to_matrix(table, path);
        return out;
    }
    const auto idc = static_cast<std::size_t>(schema.id_column);
    if (idc >= table.rows.front().size())
        throw DataError(path + ": id column " + std::to_string(schema.id_column) +
                        " out of range");
    csv::Table features;
    for (auto& row : table.rows) {
        out.ids.push_back(row[idc]);
        std::vector<std::string> rest;
        for (std::size_t j = 0; j < row.size(); ++j)
            if (j != idc) rest.push_back(std::move(row[j]));
        features.rows.push_back(std::move(rest));
    }
    out.matrix = csv::to_matrix(features, path);
    return out;
}

}  // namespace

MultiViewDataset load_multiview(const std::vector<std::string>& view_paths,
                                const std::optional<std::string>& label_path,
                                const IngestionConfig& schema) {
    if (view_paths.empty()) throw DataError("no view files given");
    MultiViewDataset ds;
    std::vector<std::string> first_ids;
    for (std::size_t m = 0; m < view_paths.size(); ++m) {
        LoadedView lv = load_view_file(view_paths[m], schema);
        if (m == 0) {
            first_ids = lv.ids;
        } else if (lv.matrix.rows() != ds.views.front().rows()) {
            throw DataError("row count mismatch: " + view_paths[m] + " has " +
                            std::to_string(lv.matrix.rows()) + " rows, " + view_paths[0] +
                            " has " + std::to_string(ds.views.front().rows()));
        }
        if (m > 0 && !first_ids.empty()) {
            // join by id: reorder this view's rows to the first view's order
            std::map<std::string, std::size_t> pos;
            for (std::size_t i = 0; i < lv.ids.size(); ++i) pos[lv.ids[i]] = i;
            Mat reordered(lv.matrix.rows(), lv.matrix.cols());
            for (std::size_t i = 0; i < first_ids.size(); ++i) {
                auto it = pos.find(first_ids[i]);
                if (it == pos.end())
                    throw DataError(view_paths[m] + ": missing sample id '" + first_ids[i] + "'");
                std::copy(lv.matrix.row(it->second), lv.matrix.row(it->second) + lv.matrix.cols(),
                          reordered.row(i));
            }
            lv.matrix = std::move(reordered);
        }
        ds.views.push_back(std::move(lv.matrix));
    }
    const std::size_t n = ds.views.front().rows();
    if (!first_ids.empty()) {
        ds.sample_ids = first_ids;
    } else {
        for (std::size_t i = 0; i < n; ++i) ds.sample_ids.push_back(std::to_string(i));
    }

    if (label_path) {
        csv::Table lt = csv::read_table(*label_path, {schema.delimiter, schema.header});
        if (lt.rows.size() != n)
            throw DataError("label file has " + std::to_string(lt.rows.size()) +
                            " rows, views have " + std::to_string(n));
        std::vector<int> labels(n);
        std::map<std::string, int> name_to_idx;  // classes indexed in first-appearance order
        for (std::size_t i = 0; i < n; ++i) {
            const std::string& name = lt.rows[i].front();
            if (name.empty()) throw DataError(*label_path + ": empty label at row " +
                                              std::to_string(i + 1));
            auto [it, inserted] =
                name_to_idx.try_emplace(name, static_cast<int>(ds.class_names.size()));
            if (inserted) ds.class_names.push_back(name);
            labels[i] = it->second;
        }
        ds.labels = std::move(labels);
    }

    ds.observed.assign(ds.views.size(), std::vector<std::uint8_t>(n, 1));
    ds.validate();
    return ds;
}

void load_observed_masks(MultiViewDataset& dataset, const std::string& path,
                         const IngestionConfig& schema) {
    csv::Table t = csv::read_table(path, {schema.delimiter, schema.header});
    if (t.rows.size() != dataset.n_samples())
        throw DataError(path + ": mask rows do not match sample count");
    if (t.rows.front().size() != dataset.n_views())
        throw DataError(path + ": mask columns do not match view count");
    for (std::size_t m = 0; m < dataset.n_views(); ++m)
        for (std::size_t i = 0; i < dataset.n_samples(); ++i) {
            const std::string& cell = t.rows[i][m];
            if (cell != "0" && cell != "1")
                throw DataError(path + ": mask cells must be 0 or 1, got '" + cell + "'");
            dataset.observed[m][i] = (cell == "1") ? 1 : 0;
        }
}

LabelView build_label_view(const MultiViewDataset& dataset, const SplitSpec& split) {
    if (!dataset.labels) throw DataError("dataset has no labels");
    split.validate(dataset.n_samples());
    const std::size_t n = dataset.n_samples();
    const std::size_t c = dataset.n_classes();
    LabelView lv;
    lv.matrix = Mat(n, c, 0.0);
    lv.labelled_mask.assign(n, 0);
    for (auto i : split.train_indices) {
        lv.matrix(i, static_cast<std::size_t>((*dataset.labels)[i])) = 1.0;
        lv.labelled_mask[i] = 1;
    }
    return lv;
}

SplitSpec stratified_split_labels(const std::vector<int>& labels, std::size_t n_classes,
                                  double rate, std::uint64_t seed) {
    if (!(rate > 0.0 && rate < 1.0))
        throw ConfigError("split rate must be in (0,1), got " + std::to_string(rate));
    std::vector<std::vector<std::size_t>> per_class(n_classes);
    for (std::size_t i = 0; i < labels.size(); ++i)
        per_class[static_cast<std::size_t>(labels[i])].push_back(i);

    Rng rng = Rng::derived(seed, 0x53504c4954ull);  // "SPLIT"
    SplitSpec spec;
    spec.rate = rate;
    spec.seed = seed;

    // Per class take floor or ceil of rate*n_c, preferring the nearest and
    // flipping when the accumulated global error would reach one sample, so
    // the total train size stays within 1 of rate*N.
    double err = 0.0;
    for (std::size_t c = 0; c < n_classes; ++c) {
        auto& idx = per_class[c];
        const std::size_t nc = idx.size();
        if (nc < 2)
            throw DataError("class " + std::to_string(c) +
                            " has fewer than 2 samples; cannot split");
        rng.shuffle(idx);
        const double x = rate * static_cast<double>(nc);
        const double fl = std::floor(x);
        const double f = x - fl;
        long take;
        if (f == 0.0) {
            take = static_cast<long>(fl);
        } else {
            const bool up = (f > 0.5) || (f == 0.5 && err <= 0.0);
            take = static_cast<long>(fl) + (up ? 1 : 0);
            if (std::abs(err + x - static_cast<double>(take)) >= 1.0)
                take += up ? -1 : 1;
        }
        take = std::clamp(take, 1L, static_cast<long>(nc) - 1);
        err += x - static_cast<double>(take);
        for (std::size_t i = 0; i < nc; ++i)
            (i < static_cast<std::size_t>(take) ? spec.train_indices : spec.test_indices)
                .push_back(idx[i]);
    }
    std::sort(spec.train_indices.begin(), spec.train_indices.end());
    std::sort(spec.test_indices.begin(), spec.test_indices.end());
    return spec;
}

SplitSpec stratified_split(const MultiViewDataset& dataset, double rate, std::uint64_t seed) {
    if (!dataset.labels) throw DataError("stratified split requires labels");
    return stratified_split_labels(*dataset.labels, dataset.n_classes(), rate, seed);
}

}  // namespace mvsne
