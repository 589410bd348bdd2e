#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "malbench/bench.hpp"
#include "malbench/dataset.hpp"
#include "malbench/error.hpp"
#include "malbench/linear.hpp"
#include "malbench/rng.hpp"

using namespace malbench;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "malbench_tests";
    std::filesystem::create_directories(dir);
    return dir / name;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

FeatureSchema two_feature_schema() {
    FeatureSchema s;
    s.columns = {{"a", ColumnKind::numeric}, {"b", ColumnKind::numeric}};
    return s;
}

}  // namespace

TEST_SUITE("dataset") {

TEST_CASE("encode_labels assigns lexicographic codes") {
    auto [codes, mapping] = encode_labels({"benign", "malware", "benign"});
    CHECK(codes == std::vector<int>{0, 1, 0});
    CHECK(mapping.at("benign") == 0);
    CHECK(mapping.at("malware") == 1);

    auto [single, single_map] = encode_labels({"x", "x", "x"});
    CHECK(single == std::vector<int>{0, 0, 0});
    CHECK(single_map.size() == 1);

    auto [ba, ba_map] = encode_labels({"b", "a", "b"});
    CHECK(ba == std::vector<int>{1, 0, 1});
    CHECK(ba_map.at("a") == 0);
    CHECK(ba_map.at("b") == 1);
}

TEST_CASE("encode_labels mapping is invariant to input order") {
    Rng rng(3);
    std::vector<std::string> values = {"cc", "aa", "bb", "aa", "dd", "cc", "aa"};
    auto [codes, mapping] = encode_labels(values);
    for (int round = 0; round < 20; ++round) {
        std::vector<std::string> shuffled = values;
        rng.shuffle(shuffled);
        auto [c2, m2] = encode_labels(shuffled);
        CHECK(m2 == mapping);
    }
}

TEST_CASE("load_csv keeps rows and column order") {
    auto path = temp_file("two_rows.csv");
    write_file(path, "a,b,classification\n1.5,2,benign\n-3,4.25,malware\n");
    Dataset data = load_csv(path, two_feature_schema());
    CHECK(data.n_rows() == 2);
    CHECK(data.n_features() == 2);
    CHECK(data.schema.columns[0].name == "a");
    CHECK(data.schema.columns[1].name == "b");
    CHECK(data.rows(0, 0) == 1.5);
    CHECK(data.rows(1, 1) == 4.25);
    CHECK(data.labels == std::vector<int>{0, 1});
    CHECK(data.row_ids == std::vector<std::size_t>{0, 1});
}

TEST_CASE("load_csv maps the positive label to 1 regardless of sort order") {
    auto path = temp_file("flipped_labels.csv");
    write_file(path, "a,b,classification\n1,2,malware\n3,4,safe\n");
    FeatureSchema schema = two_feature_schema();
    schema.positive_label = "malware";  // lexicographically first, still code 1
    Dataset data = load_csv(path, schema);
    CHECK(data.labels == std::vector<int>{1, 0});
    CHECK(data.encodings.at("classification").at("malware") == 1);
    CHECK(data.encodings.at("classification").at("safe") == 0);
}

TEST_CASE("load_csv error contracts") {
    auto missing_label = temp_file("missing_label.csv");
    write_file(missing_label, "a,b\n1,2\n");
    CHECK_THROWS_WITH_AS(load_csv(missing_label, two_feature_schema()),
                         doctest::Contains("classification"), Error);
    try {
        load_csv(missing_label, two_feature_schema());
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::schema_mismatch);
    }

    auto bad_token = temp_file("bad_token.csv");
    write_file(bad_token, "a,b,classification\n1,2,benign\n1,oops,malware\n");
    try {
        load_csv(bad_token, two_feature_schema());
        FAIL("expected ParseError");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::parse_error);
        CHECK(std::string(e.what()).find("row 3") != std::string::npos);
        CHECK(std::string(e.what()).find("'b'") != std::string::npos);
    }

    auto empty = temp_file("empty.csv");
    write_file(empty, "a,b,classification\n");
    try {
        load_csv(empty, two_feature_schema());
        FAIL("expected EmptyDataset");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::empty_dataset);
    }

    auto inf_value = temp_file("inf_value.csv");
    write_file(inf_value, "a,b,classification\n1,inf,benign\n2,3,malware\n");
    CHECK_THROWS_AS(load_csv(inf_value, two_feature_schema()), Error);
}

TEST_CASE("save then load round-trips numeric values") {
    Rng rng(11);
    SynthSpec spec{50, 4, 2, 1.5, 0.0, 99};
    Dataset data = synth_generate(spec);
    // extreme magnitudes stress the round-trip formatting
    data.rows(0, 0) = 1e300;
    data.rows(1, 1) = -2.5e-300;
    data.rows(2, 2) = 123456789.123456789;

    auto path = temp_file("roundtrip.csv");
    save_csv(data, path);
    Dataset reloaded = load_csv(path, data.schema);
    REQUIRE(reloaded.n_rows() == data.n_rows());
    for (std::size_t i = 0; i < data.n_rows(); ++i) {
        for (std::size_t j = 0; j < data.n_features(); ++j) {
            const double a = data.rows(i, j);
            const double b = reloaded.rows(i, j);
            CHECK(std::fabs(a - b) <= 1e-12 * std::max(1.0, std::fabs(a)));
        }
        CHECK(reloaded.labels[i] == data.labels[i]);
    }
}

TEST_CASE("categorical columns round-trip through their original tokens") {
    auto path = temp_file("categorical.csv");
    write_file(path,
               "hash,size,classification\ndeadbeef,10,malware\ncafe,20,benign\ndeadbeef,30,"
               "benign\n");
    FeatureSchema schema;
    schema.columns = {{"hash", ColumnKind::categorical}, {"size", ColumnKind::numeric}};
    Dataset data = load_csv(path, schema);
    CHECK(data.encodings.at("hash").at("cafe") == 0);
    CHECK(data.encodings.at("hash").at("deadbeef") == 1);
    CHECK(data.rows(0, 0) == 1.0);

    auto out = temp_file("categorical_out.csv");
    save_csv(data, out);
    Dataset reloaded = load_csv(out, schema);
    CHECK(reloaded.rows == data.rows);
    CHECK(reloaded.labels == data.labels);
}

TEST_CASE("infer_schema detects categorical columns") {
    auto path = temp_file("infer.csv");
    write_file(path, "hash,size,classification\nzz12,1.5,benign\nqq,2,malware\n");
    FeatureSchema schema = infer_schema(path);
    REQUIRE(schema.columns.size() == 2);
    CHECK(schema.columns[0].kind == ColumnKind::categorical);
    CHECK(schema.columns[1].kind == ColumnKind::numeric);
}

TEST_CASE("synth_generate is bitwise deterministic") {
    SynthSpec spec{500, 8, 3, 2.0, 0.1, 7};
    Dataset a = synth_generate(spec);
    Dataset b = synth_generate(spec);
    CHECK(a.rows == b.rows);
    CHECK(a.labels == b.labels);
    CHECK(a.row_ids == b.row_ids);
}

TEST_CASE("synth_generate keeps classes balanced, with and without flips") {
    for (auto [rows, flip] : std::vector<std::pair<std::size_t, double>>{
             {100, 0.0}, {101, 0.0}, {1000, 0.1}, {999, 0.25}}) {
        SynthSpec spec{rows, 5, 2, 1.0, flip, 13};
        Dataset data = synth_generate(spec);
        const std::size_t pos = data.count_positive();
        const std::size_t neg = data.n_rows() - pos;
        CHECK(std::max(pos, neg) - std::min(pos, neg) <= 1);
    }
}

TEST_CASE("synth_generate flips the requested label fraction") {
    SynthSpec spec{1000, 4, 2, 3.0, 0.1, 5};
    Dataset data = synth_generate(spec);
    // labels start as the i % 2 pattern; flips happen in class-balanced pairs
    std::size_t flipped = 0;
    for (std::size_t i = 0; i < data.n_rows(); ++i)
        flipped += static_cast<std::size_t>(data.labels[i] != static_cast<int>(i % 2));
    CHECK(flipped == 100);
}

TEST_CASE("synth_generate validates its spec") {
    CHECK_THROWS_AS(synth_generate(SynthSpec{1, 3, 1, 1.0, 0.0, 0}), Error);
    CHECK_THROWS_AS(synth_generate(SynthSpec{10, 3, 4, 1.0, 0.0, 0}), Error);
    CHECK_THROWS_AS(synth_generate(SynthSpec{10, 3, 1, 1.0, 1.0, 0}), Error);
}

TEST_CASE("separated clusters: one-feature threshold oracle reaches 0.999") {
    SynthSpec spec{10000, 10, 10, 8.0, 0.0, 31};
    Dataset data = synth_generate(spec);
    // oracle classifier: sign of the first informative feature
    std::size_t correct = 0;
    for (std::size_t i = 0; i < data.n_rows(); ++i)
        correct += static_cast<std::size_t>((data.rows(i, 0) > 0.0 ? 1 : 0) == data.labels[i]);
    CHECK(static_cast<double>(correct) / static_cast<double>(data.n_rows()) >= 0.999);
}

TEST_CASE("zero separation: classifier CV accuracy stays at chance level") {
    SynthSpec spec{10000, 10, 5, 0.0, 0.0, 17};
    Dataset data = synth_generate(spec);
    LogRegClassifier model;
    CvResult cv = kfold_cv(data, model, 5, 23);
    const double acc = cv.aggregates.at("accuracy").mean;
    CHECK(acc >= 0.45);
    CHECK(acc <= 0.55);
}

}  // TEST_SUITE
