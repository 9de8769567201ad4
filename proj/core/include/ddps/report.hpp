#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ddps/simulator.hpp"

// Tabular output. Column sets are versioned; any change to names or order
// bumps kOutputSchemaVersion.
namespace ddps::report {

inline constexpr int kOutputSchemaVersion = 1;

// Columns of a metrics row: schema, axis, value, strategy, seed count, then
// every MetricsRecord field in declaration order.
[[nodiscard]] const std::vector<std::string>& metrics_columns();
[[nodiscard]] const std::vector<std::string>& per_slot_columns();
[[nodiscard]] const std::vector<std::string>& event_fields();

// %.17g, so values round-trip.
[[nodiscard]] std::string format_double(double v);

// One row per run; axis is "none" and value the scenario's F_total for a
// single run.
[[nodiscard]] std::string metrics_csv(const sim::RunResult& r);
[[nodiscard]] std::string sweep_csv(std::span<const sim::SweepRow> rows);
[[nodiscard]] std::string metrics_json(const sim::RunResult& r);
[[nodiscard]] std::string per_slot_csv(std::span<const sim::SlotRecord> slots);
// {slot, user_id, task_id, event, F_i, q_i, payment, reason}, one per line.
[[nodiscard]] std::string events_jsonl(std::span<const sim::TraceEvent> events);

// Machine-readable description of every output file.
[[nodiscard]] std::string output_schema();

// Writes `text` to `path`, throwing std::runtime_error on failure.
void write_file(const std::string& path, std::string_view text);

}  // namespace ddps::report
