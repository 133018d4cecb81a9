#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "riskminer/schema.hpp"

namespace riskminer {

/// Encoded survey records with their victim labels. Values are stored row-major;
/// every value is checked against its FeatureSpec on construction.
class Dataset {
public:
    Dataset(std::shared_ptr<const Schema> schema, std::vector<int> values, std::vector<int> labels);

    const Schema& schema() const noexcept { return *schema_; }
    const std::shared_ptr<const Schema>& schema_ptr() const noexcept { return schema_; }

    std::size_t size() const noexcept { return labels_.size(); }
    bool empty() const noexcept { return labels_.empty(); }
    std::size_t feature_count() const noexcept { return schema_->size(); }

    std::span<const int> row(std::size_t i) const {
        return {values_.data() + i * feature_count(), feature_count()};
    }
    int value(std::size_t i, std::size_t feature) const { return values_[i * feature_count() + feature]; }
    int label(std::size_t i) const { return labels_[i]; }
    const std::vector<int>& labels() const noexcept { return labels_; }
    const std::vector<int>& values() const noexcept { return values_; }

    std::size_t count_label(int label) const;

    /// Records at the given positions, in the given order.
    Dataset subset(std::span<const std::size_t> positions) const;

private:
    std::shared_ptr<const Schema> schema_;
    std::vector<int> values_;
    std::vector<int> labels_;
};

/// Reads a CSV whose header is the schema feature names followed by the goal
/// column, in schema order. Throws MissingColumn, HeaderMismatch, RaggedRow,
/// MalformedCell, IllegalValue or IoError.
Dataset load_dataset(const std::string& path, std::shared_ptr<const Schema> schema);
Dataset parse_dataset(const std::string& text, std::shared_ptr<const Schema> schema);

std::string format_csv(const Dataset& ds);
void write_csv(const Dataset& ds, const std::string& path);

} // namespace riskminer
