#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace riskminer {

/// Base of every error raised by the library. The category decides the CLI
/// exit code: config errors exit 2, data errors exit 3, stage failures exit 4.
class Error : public std::runtime_error {
public:
    enum class Category { Config, Data, Stage };

    Error(Category category, const std::string& what)
        : std::runtime_error(what), category_(category) {}

    Category category() const noexcept { return category_; }

private:
    Category category_;
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(Category::Config, what) {}
};

class DataError : public Error {
public:
    explicit DataError(const std::string& what) : Error(Category::Data, what) {}
};

class StageError : public Error {
public:
    explicit StageError(const std::string& what) : Error(Category::Stage, what) {}
};

// ---- data-model -------------------------------------------------------------

class MissingColumn : public DataError {
public:
    explicit MissingColumn(std::string column)
        : DataError("missing column '" + column + "'"), column_(std::move(column)) {}
    const std::string& column() const noexcept { return column_; }

private:
    std::string column_;
};

class HeaderMismatch : public DataError {
public:
    using DataError::DataError;
};

/// `row` is the 1-based data row (the header is not counted).
class IllegalValue : public DataError {
public:
    IllegalValue(std::size_t row, std::string column, long long value)
        : DataError("illegal value " + std::to_string(value) + " in column '" + column + "' at row " +
                    std::to_string(row)),
          row_(row), column_(std::move(column)), value_(value) {}
    std::size_t row() const noexcept { return row_; }
    const std::string& column() const noexcept { return column_; }
    long long value() const noexcept { return value_; }

private:
    std::size_t row_;
    std::string column_;
    long long value_;
};

class MalformedCell : public DataError {
public:
    using DataError::DataError;
};

class RaggedRow : public DataError {
public:
    RaggedRow(std::size_t row, std::size_t expected, std::size_t got)
        : DataError("row " + std::to_string(row) + " has " + std::to_string(got) + " cells, expected " +
                    std::to_string(expected)),
          row_(row) {}
    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

class SchemaError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class RatioSum : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class EmptyClass : public DataError {
public:
    using DataError::DataError;
};

class IoError : public DataError {
public:
    IoError(const std::string& path, const std::string& what)
        : DataError(what + ": " + path), path_(path) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

// ---- augmentation -------------------------------------------------------------

class PoolTooSmall : public DataError {
public:
    using DataError::DataError;
};

class ClassTooSmall : public DataError {
public:
    using DataError::DataError;
};

class TargetBelowCurrent : public ConfigError {
public:
    using ConfigError::ConfigError;
};

// ---- feature-analysis ---------------------------------------------------------

class UnknownFeature : public ConfigError {
public:
    explicit UnknownFeature(const std::string& name) : ConfigError("unknown feature '" + name + "'") {}
};

class DegenerateTable : public DataError {
public:
    using DataError::DataError;
};

// ---- classifiers ----------------------------------------------------------------

class SingleClass : public DataError {
public:
    using DataError::DataError;
};

class FeatureMismatch : public DataError {
public:
    using DataError::DataError;
};

class EmptyNode : public DataError {
public:
    using DataError::DataError;
};

// ---- evaluation -----------------------------------------------------------------

class LengthMismatch : public DataError {
public:
    using DataError::DataError;
};

class EmptyInput : public DataError {
public:
    using DataError::DataError;
};

class OneClassOnly : public DataError {
public:
    using DataError::DataError;
};

// ---- rule-mining ----------------------------------------------------------------

class UnmappedFeature : public ConfigError {
public:
    explicit UnmappedFeature(const std::string& name)
        : ConfigError("factor map references feature '" + name + "' absent from the dataset") {}
};

class ZeroAntecedentSupport : public DataError {
public:
    using DataError::DataError;
};

} // namespace riskminer
