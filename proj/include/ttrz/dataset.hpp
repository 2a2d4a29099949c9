#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace ttrz {

/// In-memory dataset. Regression sets carry dense targets; classification
/// sets carry integer labels. Exactly one of the two is populated.
struct Dataset {
    std::vector<std::vector<double>> inputs;
    std::vector<std::vector<double>> targets; // regression
    std::vector<std::size_t> labels;          // classification

    bool classification() const { return !labels.empty(); }
    std::size_t size() const { return inputs.size(); }
    std::size_t input_dim() const { return inputs.empty() ? 0 : inputs.front().size(); }
    std::size_t target_dim() const;
    std::size_t class_count() const;
};

/// Load a CSV dataset with a header row. Feature columns are named x*, a
/// trailing integer column named `label` makes a classification set, and
/// trailing columns named y* make a regression set.
Dataset load_csv(const std::string& path);

/// Write a dataset in the same CSV layout load_csv reads.
void save_csv(const std::string& path, const Dataset& data);

/// Seeded Gaussian blob classification task. Class c is the balanced pair
/// of blobs at +e_c and -e_c with isotropic noise of the given spread, so
/// the task is not linearly separable. Requires classes <= dim.
Dataset make_blobs(std::size_t per_class, std::size_t dim, std::size_t classes,
                   double spread, std::uint64_t seed);

/// Deterministic split into a training and a held-out part.
std::pair<Dataset, Dataset> split_dataset(const Dataset& data, double train_fraction,
                                          std::uint64_t seed);

} // namespace ttrz
