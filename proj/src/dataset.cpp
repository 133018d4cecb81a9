#include "riskminer/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "riskminer/errors.hpp"

namespace riskminer {

Dataset::Dataset(std::shared_ptr<const Schema> schema, std::vector<int> values, std::vector<int> labels)
    : schema_(std::move(schema)), values_(std::move(values)), labels_(std::move(labels)) {
    if (!schema_) throw SchemaError("dataset without schema");
    const std::size_t width = schema_->size();
    if (values_.size() != labels_.size() * width)
        throw RaggedRow(labels_.size(), width, labels_.empty() ? values_.size() : values_.size() / labels_.size());
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (labels_[i] != 0 && labels_[i] != 1) throw IllegalValue(i + 1, schema_->goal(), labels_[i]);
        for (std::size_t j = 0; j < width; ++j) {
            const int v = values_[i * width + j];
            if (!schema_->feature(j).accepts(v)) throw IllegalValue(i + 1, schema_->feature(j).name, v);
        }
    }
}

std::size_t Dataset::count_label(int label) const {
    return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), label));
}

Dataset Dataset::subset(std::span<const std::size_t> positions) const {
    std::vector<int> values;
    std::vector<int> labels;
    values.reserve(positions.size() * feature_count());
    labels.reserve(positions.size());
    for (auto p : positions) {
        auto r = row(p);
        values.insert(values.end(), r.begin(), r.end());
        labels.push_back(labels_[p]);
    }
    return Dataset(schema_, std::move(values), std::move(labels));
}

namespace {

std::vector<std::string_view> split_line(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            cells.push_back(line.substr(start));
            return cells;
        }
        cells.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

void check_header(const std::vector<std::string_view>& header, const Schema& schema) {
    std::vector<std::string> expected;
    for (const auto& f : schema.features()) expected.push_back(f.name);
    expected.push_back(schema.goal());
    for (const auto& name : expected)
        if (std::find(header.begin(), header.end(), name) == header.end()) throw MissingColumn(name);
    if (header.size() != expected.size())
        throw HeaderMismatch("header has " + std::to_string(header.size()) + " columns, expected " +
                             std::to_string(expected.size()));
    for (std::size_t i = 0; i < expected.size(); ++i)
        if (header[i] != expected[i])
            throw HeaderMismatch("column " + std::to_string(i + 1) + " is '" + std::string(header[i]) +
                                 "', expected '" + expected[i] + "'");
}

} // namespace

Dataset parse_dataset(const std::string& text, std::shared_ptr<const Schema> schema) {
    std::vector<std::string_view> lines;
    std::string_view rest(text);
    while (!rest.empty()) {
        auto nl = rest.find('\n');
        auto line = rest.substr(0, nl);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        if (nl == std::string_view::npos) break;
        rest.remove_prefix(nl + 1);
    }
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    if (lines.empty()) throw HeaderMismatch("empty file: header row is mandatory");

    const auto header = split_line(lines.front());
    check_header(header, *schema);

    const std::size_t width = schema->size();
    std::vector<int> values;
    std::vector<int> labels;
    values.reserve((lines.size() - 1) * width);
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto cells = split_line(lines[r]);
        if (cells.size() != width + 1) throw RaggedRow(r, width + 1, cells.size());
        for (std::size_t c = 0; c <= width; ++c) {
            long long v = 0;
            const auto cell = cells[c];
            const auto [end, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            const std::string& column = c < width ? schema->feature(c).name : schema->goal();
            if (cell.empty() || ec != std::errc{} || end != cell.data() + cell.size())
                throw MalformedCell("non-integer cell '" + std::string(cell) + "' in column '" + column +
                                    "' at row " + std::to_string(r));
            const bool legal = c < width ? (v >= INT32_MIN && v <= INT32_MAX &&
                                            schema->feature(c).accepts(static_cast<int>(v)))
                                         : (v == 0 || v == 1);
            if (!legal) throw IllegalValue(r, column, v);
            if (c < width)
                values.push_back(static_cast<int>(v));
            else
                labels.push_back(static_cast<int>(v));
        }
    }
    return Dataset(std::move(schema), std::move(values), std::move(labels));
}

Dataset load_dataset(const std::string& path, std::shared_ptr<const Schema> schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path, "cannot open dataset");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_dataset(buffer.str(), std::move(schema));
}

std::string format_csv(const Dataset& ds) {
    std::string out;
    const auto& schema = ds.schema();
    for (const auto& f : schema.features()) {
        out += f.name;
        out += ',';
    }
    out += schema.goal();
    out += '\n';
    for (std::size_t i = 0; i < ds.size(); ++i) {
        for (int v : ds.row(i)) {
            out += std::to_string(v);
            out += ',';
        }
        out += std::to_string(ds.label(i));
        out += '\n';
    }
    return out;
}

void write_csv(const Dataset& ds, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path, "cannot write dataset");
    out << format_csv(ds);
    if (!out) throw IoError(path, "write failed");
}

} // namespace riskminer
