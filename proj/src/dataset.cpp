#include "malbench/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "malbench/error.hpp"
#include "malbench/rng.hpp"

namespace malbench {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(std::move(current));
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    fields.push_back(std::move(current));
    return fields;
}

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

bool parse_double(const std::string& token, double& out) {
    const char* first = token.data();
    const char* last = first + token.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last && std::isfinite(out);
}

// Shortest representation that round-trips exactly.
std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

}  // namespace

void FeatureSchema::validate() const {
    if (label_column.empty()) fail(ErrorKind::invalid_spec, "empty label column name");
    std::set<std::string> seen;
    for (const auto& col : columns) {
        if (col.name.empty()) fail(ErrorKind::invalid_spec, "empty feature column name");
        if (!seen.insert(col.name).second)
            fail(ErrorKind::invalid_spec, "duplicate column name: " + col.name);
        if (col.name == label_column)
            fail(ErrorKind::invalid_spec, "label column listed among features: " + col.name);
    }
}

nlohmann::json FeatureSchema::to_json() const {
    nlohmann::json cols = nlohmann::json::array();
    for (const auto& c : columns)
        cols.push_back({{"name", c.name},
                        {"kind", c.kind == ColumnKind::numeric ? "numeric" : "categorical"}});
    return {{"columns", cols},
            {"label_column", label_column},
            {"positive_label", positive_label}};
}

FeatureSchema FeatureSchema::from_json(const nlohmann::json& j) {
    FeatureSchema s;
    for (const auto& c : j.at("columns")) {
        Column col;
        col.name = c.at("name").get<std::string>();
        std::string kind = c.at("kind").get<std::string>();
        if (kind == "numeric")
            col.kind = ColumnKind::numeric;
        else if (kind == "categorical")
            col.kind = ColumnKind::categorical;
        else
            fail(ErrorKind::parse_error, "unknown column kind: " + kind);
        s.columns.push_back(std::move(col));
    }
    s.label_column = j.at("label_column").get<std::string>();
    s.positive_label = j.at("positive_label").get<std::string>();
    s.validate();
    return s;
}

std::size_t Dataset::column_index(const std::string& name) const {
    for (std::size_t j = 0; j < schema.columns.size(); ++j)
        if (schema.columns[j].name == name) return j;
    fail(ErrorKind::unknown_column, name);
}

std::size_t Dataset::count_positive() const {
    std::size_t count = 0;
    for (int l : labels) count += static_cast<std::size_t>(l);
    return count;
}

void Dataset::validate() const {
    schema.validate();
    if (rows.rows() != labels.size() || rows.rows() != row_ids.size())
        fail(ErrorKind::length_mismatch, "rows, labels and row_ids must align");
    if (rows.cols() != schema.columns.size())
        fail(ErrorKind::schema_mismatch, "matrix width does not match schema");
    if (!rows.all_finite())
        fail(ErrorKind::parse_error, "non-finite value in feature matrix");
    for (int l : labels)
        if (l != 0 && l != 1) fail(ErrorKind::non_binary_value, "label outside {0,1}");
}

Dataset dataset_subset(const Dataset& data, const std::vector<std::size_t>& indices) {
    Dataset out;
    out.schema = data.schema;
    out.encodings = data.encodings;
    out.rows = Matrix(indices.size(), data.n_features());
    out.labels.resize(indices.size());
    out.row_ids.resize(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) {
        std::size_t src = indices[i];
        for (std::size_t j = 0; j < data.n_features(); ++j) out.rows(i, j) = data.rows(src, j);
        out.labels[i] = data.labels[src];
        out.row_ids[i] = data.row_ids[src];
    }
    return out;
}

void SynthSpec::validate() const {
    if (n_rows < 2) fail(ErrorKind::invalid_spec, "synth requires n_rows >= 2");
    if (n_features < 1) fail(ErrorKind::invalid_spec, "synth requires n_features >= 1");
    if (n_informative > n_features)
        fail(ErrorKind::invalid_spec, "n_informative exceeds n_features");
    if (class_separation < 0.0) fail(ErrorKind::invalid_spec, "negative class_separation");
    if (label_flip_rate < 0.0 || label_flip_rate >= 1.0)
        fail(ErrorKind::invalid_spec, "label_flip_rate outside [0,1)");
}

nlohmann::json SynthSpec::to_json() const {
    return {{"n_rows", n_rows},
            {"n_features", n_features},
            {"n_informative", n_informative},
            {"class_separation", class_separation},
            {"label_flip_rate", label_flip_rate},
            {"seed", seed}};
}

SynthSpec SynthSpec::from_json(const nlohmann::json& j) {
    SynthSpec s;
    s.n_rows = j.at("n_rows").get<std::size_t>();
    s.n_features = j.at("n_features").get<std::size_t>();
    s.n_informative = j.at("n_informative").get<std::size_t>();
    s.class_separation = j.at("class_separation").get<double>();
    s.label_flip_rate = j.value("label_flip_rate", 0.0);
    s.seed = j.at("seed").get<std::uint64_t>();
    s.validate();
    return s;
}

std::pair<std::vector<int>, std::map<std::string, int>>
encode_labels(const std::vector<std::string>& values) {
    if (values.empty()) fail(ErrorKind::invalid_spec, "encode_labels on empty input");
    std::map<std::string, int> mapping;  // ordered map = lexicographic by key
    for (const auto& v : values) mapping.emplace(v, 0);
    int code = 0;
    for (auto& [key, value] : mapping) value = code++;
    std::vector<int> codes;
    codes.reserve(values.size());
    for (const auto& v : values) codes.push_back(mapping.at(v));
    return {std::move(codes), std::move(mapping)};
}

Dataset load_csv(const std::filesystem::path& path, const FeatureSchema& schema) {
    schema.validate();
    std::ifstream in(path);
    if (!in) fail(ErrorKind::io_error, "cannot open " + path.string());

    std::string line;
    if (!std::getline(in, line)) fail(ErrorKind::empty_dataset, "missing header in " + path.string());
    strip_cr(line);
    std::vector<std::string> header = split_line(line);

    // Map every schema column (features + label) to its position in the file.
    std::map<std::string, std::size_t> file_pos;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (!file_pos.emplace(header[i], i).second)
            fail(ErrorKind::schema_mismatch, "duplicate header column: " + header[i]);
    }
    std::vector<std::size_t> feature_pos(schema.columns.size());
    for (std::size_t j = 0; j < schema.columns.size(); ++j) {
        auto it = file_pos.find(schema.columns[j].name);
        if (it == file_pos.end())
            fail(ErrorKind::schema_mismatch, "missing column: " + schema.columns[j].name);
        feature_pos[j] = it->second;
    }
    auto label_it = file_pos.find(schema.label_column);
    if (label_it == file_pos.end())
        fail(ErrorKind::schema_mismatch, "missing label column: " + schema.label_column);
    if (header.size() != schema.columns.size() + 1)
        fail(ErrorKind::schema_mismatch, "file has extra columns beyond the schema");
    std::size_t label_pos = label_it->second;

    std::vector<std::vector<std::string>> records;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (line.empty()) continue;
        std::vector<std::string> fields = split_line(line);
        if (fields.size() != header.size())
            fail(ErrorKind::parse_error,
                 "line " + std::to_string(line_no) + ": expected " +
                     std::to_string(header.size()) + " fields, got " + std::to_string(fields.size()));
        records.push_back(std::move(fields));
    }
    if (records.empty()) fail(ErrorKind::empty_dataset, path.string() + " has no data rows");

    const std::size_t n = records.size();
    const std::size_t d = schema.columns.size();
    Dataset data;
    data.schema = schema;
    data.rows = Matrix(n, d);
    data.labels.resize(n);
    data.row_ids.resize(n);
    for (std::size_t i = 0; i < n; ++i) data.row_ids[i] = i;

    for (std::size_t j = 0; j < d; ++j) {
        const Column& col = schema.columns[j];
        const std::size_t pos = feature_pos[j];
        if (col.kind == ColumnKind::numeric) {
            for (std::size_t i = 0; i < n; ++i) {
                double v;
                if (!parse_double(records[i][pos], v))
                    fail(ErrorKind::parse_error, "row " + std::to_string(i + 2) + ", column '" +
                                                     col.name + "': non-numeric token '" +
                                                     records[i][pos] + "'");
                data.rows(i, j) = v;
            }
        } else {
            std::vector<std::string> tokens(n);
            for (std::size_t i = 0; i < n; ++i) {
                if (records[i][pos].empty())
                    fail(ErrorKind::parse_error, "row " + std::to_string(i + 2) + ", column '" +
                                                     col.name + "': empty value");
                tokens[i] = records[i][pos];
            }
            auto [codes, mapping] = encode_labels(tokens);
            for (std::size_t i = 0; i < n; ++i) data.rows(i, j) = static_cast<double>(codes[i]);
            data.encodings[col.name] = std::move(mapping);
        }
    }

    // Label column: lexicographic encoding, then flipped if needed so the
    // positive label always lands on code 1.
    std::vector<std::string> label_tokens(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (records[i][label_pos].empty())
            fail(ErrorKind::parse_error, "row " + std::to_string(i + 2) + ": empty label");
        label_tokens[i] = records[i][label_pos];
    }
    auto [codes, mapping] = encode_labels(label_tokens);
    if (mapping.size() > 2)
        fail(ErrorKind::non_binary_value,
             "label column has " + std::to_string(mapping.size()) + " distinct values");
    auto pos_it = mapping.find(schema.positive_label);
    if (pos_it != mapping.end() && pos_it->second != 1 && mapping.size() == 2) {
        for (auto& [key, value] : mapping) value = 1 - value;
        for (int& c : codes) c = 1 - c;
    }
    for (std::size_t i = 0; i < n; ++i) data.labels[i] = codes[i];
    data.encodings[schema.label_column] = std::move(mapping);

    data.validate();
    return data;
}

void save_csv(const Dataset& data, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) fail(ErrorKind::io_error, "cannot write " + path.string());

    // Reverse maps for categorical columns so the file holds original tokens.
    std::map<std::string, std::map<int, std::string>> decode;
    for (const auto& [col, mapping] : data.encodings)
        for (const auto& [token, code] : mapping) decode[col][code] = token;

    for (const auto& col : data.schema.columns) out << col.name << ',';
    out << data.schema.label_column << '\n';

    const auto* label_decode =
        decode.count(data.schema.label_column) ? &decode.at(data.schema.label_column) : nullptr;

    for (std::size_t i = 0; i < data.n_rows(); ++i) {
        for (std::size_t j = 0; j < data.n_features(); ++j) {
            const Column& col = data.schema.columns[j];
            if (col.kind == ColumnKind::categorical && decode.count(col.name)) {
                out << decode.at(col.name).at(static_cast<int>(data.rows(i, j)));
            } else {
                out << format_double(data.rows(i, j));
            }
            out << ',';
        }
        if (label_decode && label_decode->count(data.labels[i])) {
            out << label_decode->at(data.labels[i]);
        } else {
            out << (data.labels[i] == 1 ? data.schema.positive_label : "benign");
        }
        out << '\n';
    }
    if (!out) fail(ErrorKind::io_error, "write failed for " + path.string());
}

FeatureSchema infer_schema(const std::filesystem::path& path, const std::string& label_column,
                           const std::string& positive_label) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::io_error, "cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) fail(ErrorKind::empty_dataset, "missing header in " + path.string());
    strip_cr(line);
    std::vector<std::string> header = split_line(line);

    std::size_t label_pos = header.size();
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == label_column) label_pos = i;
    if (label_pos == header.size())
        fail(ErrorKind::schema_mismatch, "label column '" + label_column + "' not in header");

    std::vector<bool> numeric(header.size(), true);
    std::size_t line_no = 1;
    bool any_rows = false;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (line.empty()) continue;
        any_rows = true;
        std::vector<std::string> fields = split_line(line);
        if (fields.size() != header.size())
            fail(ErrorKind::parse_error, "line " + std::to_string(line_no) + ": field count mismatch");
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i == label_pos) continue;
            if (fields[i].empty())
                fail(ErrorKind::parse_error, "line " + std::to_string(line_no) + ", column '" +
                                                 header[i] + "': empty value");
            double v;
            if (numeric[i] && !parse_double(fields[i], v)) numeric[i] = false;
        }
    }
    if (!any_rows) fail(ErrorKind::empty_dataset, path.string() + " has no data rows");

    FeatureSchema schema;
    schema.label_column = label_column;
    schema.positive_label = positive_label;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i == label_pos) continue;
        schema.columns.push_back(
            {header[i], numeric[i] ? ColumnKind::numeric : ColumnKind::categorical});
    }
    schema.validate();
    return schema;
}

Dataset synth_generate(const SynthSpec& spec) {
    spec.validate();
    const std::size_t n = spec.n_rows;
    const std::size_t d = spec.n_features;

    Dataset data;
    data.schema.label_column = "classification";
    data.schema.positive_label = "malware";
    // zero-padded so lexicographic column order matches positional order
    std::size_t width = std::to_string(d - 1).size();
    for (std::size_t j = 0; j < d; ++j) {
        std::string index = std::to_string(j);
        data.schema.columns.push_back(
            {"f" + std::string(width - index.size(), '0') + index, ColumnKind::numeric});
    }

    data.rows = Matrix(n, d);
    data.labels.resize(n);
    data.row_ids.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        data.row_ids[i] = i;
        data.labels[i] = static_cast<int>(i % 2);  // |positives - negatives| <= 1
    }

    Rng rng(spec.seed);
    const double offset = spec.class_separation / 2.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double shift = data.labels[i] == 1 ? offset : -offset;
        for (std::size_t j = 0; j < d; ++j) {
            double base = j < spec.n_informative ? shift : 0.0;
            data.rows(i, j) = base + rng.normal();
        }
    }

    // Label noise is applied in class-balanced pairs so the balance invariant
    // survives the flips; the flipped fraction rounds to an even count.
    const std::size_t flips = static_cast<std::size_t>(
        std::llround(spec.label_flip_rate * static_cast<double>(n)));
    const std::size_t per_class = flips / 2;
    if (per_class > 0) {
        std::vector<std::size_t> zeros, ones;
        for (std::size_t i = 0; i < n; ++i)
            (data.labels[i] == 0 ? zeros : ones).push_back(i);
        rng.shuffle(zeros);
        rng.shuffle(ones);
        for (std::size_t i = 0; i < per_class && i < zeros.size(); ++i) data.labels[zeros[i]] = 1;
        for (std::size_t i = 0; i < per_class && i < ones.size(); ++i) data.labels[ones[i]] = 0;
    }

    data.validate();
    return data;
}

}  // namespace malbench
