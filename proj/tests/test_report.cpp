#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

#include <json.hpp>

#include "ddps/report.hpp"

using namespace ddps;

TEST(Report, ColumnsVersioned) {
  const auto& cols = report::metrics_columns();
  ASSERT_GE(cols.size(), 6u);
  EXPECT_EQ(cols[0], "schema_version");
  EXPECT_EQ(cols[1], "axis");
  EXPECT_EQ(cols[2], "value");
  EXPECT_EQ(cols[3], "strategy");
  EXPECT_EQ(cols[4], "seeds");
  EXPECT_EQ(cols[5], "avg_latency");
  // Bump kOutputSchemaVersion when this changes.
  EXPECT_EQ(cols.size(), 28u);
  EXPECT_EQ(report::kOutputSchemaVersion, 1);
}

TEST(Report, DoublesRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, 6e9, 1e-300, -2.5}) {
    EXPECT_EQ(std::strtod(report::format_double(v).c_str(), nullptr), v);
  }
}

TEST(Report, MetricsCsvShape) {
  Scenario s = paper_defaults();
  s.slots = 5;
  const auto csv = report::metrics_csv(sim::run(s));
  std::istringstream in(csv);
  std::string header, row, extra;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_FALSE(std::getline(in, extra));
  auto count = [](const std::string& l) { return std::count(l.begin(), l.end(), ',') + 1; };
  EXPECT_EQ(count(header), static_cast<long>(report::metrics_columns().size()));
  EXPECT_EQ(count(row), count(header));
  EXPECT_EQ(row.rfind("1,none,6000000000,ddps,1,", 0), 0u);
}

TEST(Report, JsonOutputsParse) {
  Scenario s = paper_defaults();
  s.slots = 5;
  sim::RunOptions o;
  o.trace = true;
  const auto r = sim::run(s, o);
  const auto j = nlohmann::json::parse(report::metrics_json(r));
  EXPECT_EQ(j["strategy"], "ddps");
  EXPECT_EQ(j["metrics"]["tasks"], r.metrics.tasks);
  std::istringstream lines(report::events_jsonl(r.events));
  std::string line;
  std::size_t n = 0;
  while (std::getline(lines, line)) {
    const auto e = nlohmann::json::parse(line);
    for (const auto& k : report::event_fields()) EXPECT_TRUE(e.contains(k)) << k;
    ++n;
  }
  EXPECT_EQ(n, r.events.size());
  const auto schema = nlohmann::json::parse(report::output_schema());
  EXPECT_EQ(schema["metrics_csv"].size(), report::metrics_columns().size());
}
