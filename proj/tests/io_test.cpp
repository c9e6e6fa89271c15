// Copyright 2026 The bfnlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "bfnlab/io.hpp"
#include "test_util.hpp"

namespace bfnlab {
namespace {

namespace fs = std::filesystem;

TEST(Io, TableRoundTrip) {
    Rng rng(1);
    TruthTable t = testing::random_table(5, rng);
    Json j = function_to_json(t);
    EXPECT_EQ(j["repr"], "truth_table");
    TruthTable back = table_from_json(parse_json(j.dump()));
    EXPECT_EQ(back, t);
}

TEST(Io, PolyRoundTrip) {
    Rng rng(2);
    SubsetPoly g = testing::random_poly(20, 3, rng, 0.01);
    SubsetPoly back = function_from_json(parse_json(function_to_json(g).dump()));
    EXPECT_EQ(back, g);
}

TEST(Io, FourierPolyIsWrittenInYBasis) {
    SubsetPoly chi(2, Basis::fourier(0.5));
    chi.set(0b01, 1.0);
    Json j = function_to_json(chi);
    EXPECT_EQ(j["repr"], "y_poly");
    EXPECT_EQ(to_truth_table(function_from_json(j)), to_truth_table(chi));
}

TEST(Io, RationalModeIsExact) {
    SubsetPoly g(3);
    g.set(0b001, 0.375);
    g.set(0b110, -1.0 / 1024);
    Json j = function_to_json(g, true);
    for (const auto &term : j["coeffs"]) {
        EXPECT_TRUE(term["c"].is_string());
    }
    EXPECT_EQ(function_from_json(j), g);

    // 0.1 as a double is dyadic; 1e-5 needs more than 62 bits of exponent
    SubsetPoly tenth(1);
    tenth.set(0b1, 0.1);
    EXPECT_EQ(function_from_json(function_to_json(tenth, true)), tenth);
    SubsetPoly bad(1);
    bad.set(0b1, 1e-5);
    EXPECT_THROW(function_to_json(bad, true), Error);
}

TEST(Io, ReadReal) {
    EXPECT_EQ(read_real(Json(0.5)), 0.5);
    EXPECT_EQ(read_real(Json("-0.125")), -0.125);
    EXPECT_THROW(read_real(Json("abc")), FormatError);
    EXPECT_THROW(read_real(Json::array()), FormatError);
}

TEST(Io, ParseValues) {
    ValueSet a = parse_values("1,-0.5, 0");
    EXPECT_EQ(a.values(), (std::vector<double>{-0.5, 0.0, 1.0}));
    EXPECT_THROW(parse_values(""), FormatError);
    EXPECT_THROW(parse_values("1,x"), FormatError);
    EXPECT_THROW(parse_values("1,2z"), FormatError);
    EXPECT_EQ(value_set_from_json(to_json(a)).values(), a.values());
}

TEST(Io, MalformedFunctions) {
    EXPECT_THROW(parse_json("{\"n\": 2,"), FormatError);
    EXPECT_THROW(function_from_json(parse_json("[1, 2]")), FormatError);
    EXPECT_THROW(function_from_json(parse_json(R"({"n": 2, "repr": "truth_table", "values": [0, 1]})")),
                 FormatError);
    EXPECT_THROW(function_from_json(parse_json(R"({"n": 2, "repr": "y_poly", "coeffs": [{"set": [2], "c": 1}]})")),
                 FormatError);
    EXPECT_THROW(function_from_json(parse_json(R"({"n": 2, "repr": "anf"})")), FormatError);
    EXPECT_THROW(function_from_json(parse_json(R"({"n": 30, "repr": "truth_table", "values": []})")), FormatError);
}

TEST(Io, HypergraphRoundTrip) {
    Hypergraph h(5, {0b00011, 0b11000, 0b00100});
    Hypergraph back = hypergraph_from_json(parse_json(to_json(h).dump()));
    EXPECT_EQ(back.n(), 5);
    EXPECT_EQ(back.edges(), h.edges());
    EXPECT_THROW(hypergraph_from_json(parse_json(R"({"n": 3, "edges": [[0, 3]]})")), FormatError);
}

TEST(Io, AtomicWriteReplacesWholeFile) {
    fs::path dir = fs::temp_directory_path() / "bfnlab_io_test";
    fs::create_directories(dir);
    fs::path file = dir / "out.json";
    atomic_write(file, "first");
    atomic_write(file, "second");
    EXPECT_EQ(read_file(file), "second");
    for (const auto &entry : fs::directory_iterator(dir)) {
        EXPECT_EQ(entry.path().filename(), "out.json");
    }
    fs::remove_all(dir);
    EXPECT_THROW(read_file(dir / "missing.json"), Error);
}

}  // namespace
}  // namespace bfnlab
