#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mvsne/core.hpp"

#include "json.hpp"

namespace mvsne {

struct IngestionConfig {
    char delimiter = ',';
    bool header = false;
    /// When >= 0, this column of every view file carries the sample id and
    /// rows are joined by id instead of file order.
    int id_column = -1;
};

/// M aligned feature views over the same N samples, with optional labels and
/// per-view sample observation flags. Immutable after construction.
struct MultiViewDataset {
    std::vector<Mat> views;
    std::vector<std::string> sample_ids;
    std::optional<std::vector<int>> labels;   // class indices in [0, C)
    std::vector<std::string> class_names;     // size C when labels present
    std::vector<std::vector<std::uint8_t>> observed;  // [view][sample], 1 = observed

    std::size_t n_samples() const { return sample_ids.size(); }
    std::size_t n_views() const { return views.size(); }
    std::size_t n_classes() const { return class_names.size(); }
    bool fully_observed() const;

    /// Checks the structural invariants; throws DataError on violation.
    void validate() const;

    /// Row-subset copy (all views, labels, masks follow the same indices).
    MultiViewDataset subset(const std::vector<std::size_t>& indices) const;
};

/// Binary N x C labelling view: one-hot rows for labelled samples, zero rows
/// (mask false) for unlabelled ones.
struct LabelView {
    Mat matrix;
    std::vector<std::uint8_t> labelled_mask;
};

/// Seeded stratified train/test partition.
struct SplitSpec {
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> test_indices;
    double rate = 0.0;
    std::uint64_t seed = 0;

    nlohmann::json to_json() const;
    static SplitSpec from_json(const nlohmann::json& j);
    void validate(std::size_t n) const;
};

MultiViewDataset load_multiview(const std::vector<std::string>& view_paths,
                                const std::optional<std::string>& label_path,
                                const IngestionConfig& schema);

/// Loads per-view observation masks from a delimited file of N rows x M
/// columns of 0/1 flags and attaches them to the dataset.
void load_observed_masks(MultiViewDataset& dataset, const std::string& path,
                         const IngestionConfig& schema);

LabelView build_label_view(const MultiViewDataset& dataset, const SplitSpec& split);

SplitSpec stratified_split(const MultiViewDataset& dataset, double rate, std::uint64_t seed);

/// Core stratified splitter over a label vector (also used for CV folding).
SplitSpec stratified_split_labels(const std::vector<int>& labels, std::size_t n_classes,
                                  double rate, std::uint64_t seed);

}  // namespace mvsne
