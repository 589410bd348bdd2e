#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "malbench/matrix.hpp"

namespace malbench {

enum class ColumnKind { numeric, categorical };

struct Column {
    std::string name;
    ColumnKind kind = ColumnKind::numeric;
};

// Layout of a labeled feature table: ordered feature columns plus the label
// column. The positive label maps to class 1 everywhere downstream.
struct FeatureSchema {
    std::vector<Column> columns;
    std::string label_column = "classification";
    std::string positive_label = "malware";

    void validate() const;
    nlohmann::json to_json() const;
    static FeatureSchema from_json(const nlohmann::json& j);
};

// The single currency of the pipeline: encoded feature matrix, binary labels
// (1 = malware), original row indices, and the categorical encodings used.
// Immutable after construction; operations return fresh copies.
struct Dataset {
    FeatureSchema schema;
    Matrix rows;
    std::vector<int> labels;
    std::vector<std::size_t> row_ids;
    std::map<std::string, std::map<std::string, int>> encodings;

    std::size_t n_rows() const { return rows.rows(); }
    std::size_t n_features() const { return rows.cols(); }
    std::size_t column_index(const std::string& name) const;
    std::size_t count_positive() const;
    void validate() const;
};

// Picks rows by local index (not row_id); schema and encodings carry over.
Dataset dataset_subset(const Dataset& data, const std::vector<std::size_t>& indices);

struct SynthSpec {
    std::size_t n_rows = 0;
    std::size_t n_features = 0;
    std::size_t n_informative = 0;
    double class_separation = 0.0;
    double label_flip_rate = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
    nlohmann::json to_json() const;
    static SynthSpec from_json(const nlohmann::json& j);
};

// Assigns consecutive integer codes to the distinct values sorted
// lexicographically (byte order); independent of input order.
std::pair<std::vector<int>, std::map<std::string, int>>
encode_labels(const std::vector<std::string>& values);

Dataset load_csv(const std::filesystem::path& path, const FeatureSchema& schema);

void save_csv(const Dataset& data, const std::filesystem::path& path);

// Builds a schema by scanning the file: every non-label column whose tokens
// all parse as finite numbers is numeric, anything else is categorical.
FeatureSchema infer_schema(const std::filesystem::path& path,
                           const std::string& label_column = "classification",
                           const std::string& positive_label = "malware");

// Balanced two-class Gaussian clusters with planted informative features;
// fully determined by the spec (equal spec => bitwise-identical dataset).
Dataset synth_generate(const SynthSpec& spec);

}  // namespace malbench
