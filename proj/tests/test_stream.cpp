// Copyright 2026 The mcdd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <sstream>

#include "mcdd/error.hpp"
#include "mcdd/stream.hpp"
#include "test_support.hpp"

namespace mcdd {
namespace {

using testing::make_points;

TEST(Csv, IngestsFeaturesInOrder) {
    std::istringstream in("a,b\n1.5,2\n3,4\n-5,6e1\n");
    const CsvStream s = ingest_csv(in);
    ASSERT_EQ(s.points.size(), 3u);
    EXPECT_EQ(s.dim, 2u);
    EXPECT_FALSE(s.has_labels());
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(s.points[i].time_index, i);
    EXPECT_DOUBLE_EQ(s.points[2].features[1], 60.0);
}

TEST(Csv, ReadsDriftLabelColumn) {
    std::ostringstream text;
    text << "x,drift\n";
    for (int i = 0; i < 21005; ++i) text << i << ',' << (i == 21000 ? 1 : 0) << '\n';
    std::istringstream in(text.str());
    const CsvStream s = ingest_csv(in);
    ASSERT_TRUE(s.has_labels());
    EXPECT_EQ(s.dim, 1u);
    EXPECT_TRUE(s.drift[21000]);
    EXPECT_FALSE(s.drift[20999]);
}

TEST(Csv, ParseErrorReportsRow) {
    std::istringstream in("a,b\n1,2\n1.0,abc\n");
    try {
        ingest_csv(in);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
}

TEST(Csv, RejectsRaggedRows) {
    std::istringstream in("a,b\n1,2\n3\n");
    EXPECT_THROW(ingest_csv(in), SchemaError);
}

TEST(Csv, RoundTripsExactly) {
    Rng rng(9);
    const auto pts = testing::normal_points(50, 3, rng, 0.0, 1e3);
    std::vector<bool> drift(50, false);
    drift[17] = true;
    std::ostringstream out;
    write_csv(out, pts, drift);
    std::istringstream in(out.str());
    const CsvStream back = ingest_csv(in);
    EXPECT_EQ(back.points, pts);
    EXPECT_EQ(back.drift, drift);
}

TEST(StreamConfig, WindowCount) {
    const StreamConfig c{3000, 300};
    EXPECT_EQ(c.n_sub(), 10u);
    EXPECT_EQ(c.window_count(30000), 91u);
    EXPECT_EQ(c.window_count(2999), 0u);
    EXPECT_EQ((StreamConfig{10, 5}.window_count(23)), 3u);
    EXPECT_THROW((StreamConfig{3000, 700}.validate()), ContractError);
}

TEST(SlidingWindow, PartitionsIntoSubWindows) {
    SlidingWindow w(StreamConfig{10, 5});
    const auto pts = make_points(10, 1, [](std::size_t t, std::size_t) { return double(t); });
    EXPECT_THROW(w.partition(), NotWarmError);
    w.advance(std::span<const DataPoint>(pts).subspan(0, 5));
    EXPECT_FALSE(w.warm());
    w.advance(std::span<const DataPoint>(pts).subspan(5, 5));
    ASSERT_TRUE(w.warm());
    const auto parts = w.partition();
    ASSERT_EQ(parts.size(), 2u);
    std::vector<DataPoint> joined;
    for (const auto& p : parts) {
        EXPECT_EQ(p.points.size(), 5u);
        joined.insert(joined.end(), p.points.begin(), p.points.end());
    }
    EXPECT_EQ(joined, pts);
    EXPECT_EQ(w.window_end_time(), 10u);
}

TEST(SlidingWindow, AdvanceRotatesSubWindows) {
    const StreamConfig c{30, 10};
    const auto pts = make_points(40, 2, [](std::size_t t, std::size_t f) { return double(t * 2 + f); });
    SlidingWindow w = testing::fill_window(c, {pts.begin(), pts.begin() + 30});
    const SubWindow second = w.sub_window(2);
    w = advance(w, std::span<const DataPoint>(pts).subspan(30, 10));
    EXPECT_EQ(w.sub_window(1).points, second.points);
    EXPECT_EQ(w.sub_window(3).first_time(), 30u);
    EXPECT_EQ(w.window_end_time(), 40u);
}

TEST(SlidingWindow, RejectsBadSlides) {
    SlidingWindow w(StreamConfig{10, 5});
    const auto pts = make_points(12, 2, [](std::size_t, std::size_t) { return 0.0; });
    EXPECT_THROW(w.advance(std::span<const DataPoint>(pts).subspan(0, 4)), ContractError);
    w.advance(std::span<const DataPoint>(pts).subspan(0, 5));
    EXPECT_THROW(w.advance(std::span<const DataPoint>(pts).subspan(6, 5)), ContractError);
    auto other = make_points(5, 3, [](std::size_t, std::size_t) { return 0.0; }, 5);
    EXPECT_THROW(w.advance(other), ContractError);
}

} // namespace
} // namespace mcdd
