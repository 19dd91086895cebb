//
// Copyright 2026 The DP-TOST Authors
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
//


#include "dptost/csv.h"

#include <cmath>
#include <filesystem>
#include <limits>

#include "dptost/rng.h"
#include "gtest/gtest.h"

namespace dptost {
namespace {

TEST(FormatDoubleTest, ShortestRoundTrip) {
  EXPECT_EQ(FormatDouble(0.1), "0.1");
  EXPECT_EQ(FormatDouble(2.0), "2");
  EXPECT_EQ(FormatDouble(INFINITY), "inf");
  EXPECT_EQ(FormatDouble(-INFINITY), "-inf");
  EXPECT_EQ(FormatDouble(NAN), "nan");
  Rng rng = Rng::Make(1);
  for (int i = 0; i < 1000; ++i) {
    const double x =
        rng.StdNormal() * std::pow(10.0, 20 * rng.CenteredUniform());
    EXPECT_EQ(*ParseDouble(FormatDouble(x)), x);
  }
}

TEST(ParseDoubleTest, AcceptsAndRejects) {
  EXPECT_EQ(*ParseDouble("inf"), INFINITY);
  EXPECT_EQ(*ParseDouble("-inf"), -INFINITY);
  EXPECT_EQ(*ParseDouble("-1.5e3"), -1500.0);
  EXPECT_FALSE(ParseDouble("").ok());
  EXPECT_FALSE(ParseDouble("1.5x").ok());
  EXPECT_FALSE(ParseDouble("abc").ok());
}

TEST(CsvEscapeTest, QuotesOnlyWhenNeeded) {
  EXPECT_EQ(CsvEscape("plain"), "plain");
  EXPECT_EQ(CsvEscape("a,b"), "\"a,b\"");
  EXPECT_EQ(CsvEscape("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(CsvEscape("two\nlines"), "\"two\nlines\"");
}

TEST(ToCsvTest, HeaderOnly) {
  EXPECT_EQ(ToCsv({{"a", "b"}, {}}), "a,b\n");
}

TEST(CsvRoundTripTest, TextAndNumbers) {
  CsvTable t{{"label", "x"}, {}};
  t.rows.push_back({"ZDV vs ZDV+ddI", FormatDouble(0.157)});
  t.rows.push_back({"quote \"q\", comma", FormatDouble(-1e-300)});
  t.rows.push_back({"", "inf"});
  const std::string text = ToCsv(t);
  const CsvTable back = *ParseCsv(text);
  EXPECT_EQ(back.header, t.header);
  EXPECT_EQ(back.rows, t.rows);
  EXPECT_EQ(ToCsv(back), text);
}

TEST(ParseCsvTest, Errors) {
  EXPECT_FALSE(ParseCsv("a,b\n1\n").ok());
  EXPECT_FALSE(ParseCsv("a,b\n\"1,2\n").ok());
  EXPECT_FALSE(ParseCsv("a,b\n1\"x,2\n").ok());
}

TEST(ParseCsvTest, CrlfAndMissingFinalNewline) {
  const CsvTable t = *ParseCsv("a,b\r\n1,2\r\n3,4");
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[1], (std::vector<std::string>{"3", "4"}));
}

TEST(FileIoTest, ErrorsNameThePath) {
  absl::StatusOr<std::string> missing = ReadTextFile("/nonexistent/x.json");
  EXPECT_EQ(missing.status().code(), absl::StatusCode::kNotFound);
  EXPECT_NE(missing.status().message().find("/nonexistent/x.json"),
            std::string::npos);
  const absl::Status w = WriteTextFile("/nonexistent/dir/out.csv", "x");
  EXPECT_FALSE(w.ok());
  EXPECT_NE(w.message().find("/nonexistent/dir/out.csv"), std::string::npos);
}

TEST(FileIoTest, WriteThenRead) {
  const std::string path =
      (std::filesystem::temp_directory_path() / "dptost_csv_test.csv").string();
  ASSERT_TRUE(WriteTextFile(path, "a,b\n1,2\n").ok());
  EXPECT_EQ(*ReadTextFile(path), "a,b\n1,2\n");
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace dptost
