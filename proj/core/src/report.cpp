#include "ddps/report.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace ddps::report {

namespace {

using nlohmann::ordered_json;

// Field list shared by the CSV writer, the JSON writer and the schema.
template <typename F>
void for_each_metric(const sim::MetricsRecord& m, F&& f) {
  f("avg_latency", m.avg_latency);
  f("server_utility", m.server_utility);
  f("ros", m.ros);
  f("tasks", m.tasks);
  f("local_count", m.local_count);
  f("offered_count", m.offered_count);
  f("served_count", m.served_count);
  f("drop_count", m.drop_count);
  f("device_drop_count", m.device_drop_count);
  f("server_drop_count", m.server_drop_count);
  f("deferred_count", m.deferred_count);
  f("unserved_count", m.unserved_count);
  f("on_time_count", m.on_time_count);
  f("mean_payment", m.mean_payment);
  f("capacity_utilization", m.capacity_utilization);
  f("revenue", m.revenue);
  f("penalty", m.penalty);
  f("mean_local_latency", m.mean_local_latency);
  f("mean_served_latency", m.mean_served_latency);
  f("mean_wait_estimate", m.mean_wait_estimate);
  f("mean_queue_wait", m.mean_queue_wait);
  f("granted_capacity", m.granted_capacity);
  f("idle_capacity", m.idle_capacity);
}

std::string cell(double v) { return format_double(v); }
std::string cell(std::int64_t v) { return std::to_string(v); }

std::string join(const std::vector<std::string>& cols) {
  std::string out;
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (i) out += ',';
    out += cols[i];
  }
  return out + '\n';
}

std::string metrics_row(std::string_view axis, double value, std::string_view strategy,
                        std::size_t seeds, const sim::MetricsRecord& m) {
  std::string row = std::to_string(kOutputSchemaVersion) + ',' + std::string(axis) + ',' +
                    format_double(value) + ',' + std::string(strategy) + ',' +
                    std::to_string(seeds);
  for_each_metric(m, [&](const char*, auto v) { row += ',' + cell(v); });
  return row + '\n';
}

ordered_json metrics_object(const sim::MetricsRecord& m) {
  ordered_json j = ordered_json::object();
  for_each_metric(m, [&](const char* k, auto v) { j[k] = v; });
  return j;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const std::vector<std::string>& metrics_columns() {
  static const std::vector<std::string> cols = [] {
    std::vector<std::string> c{"schema_version", "axis", "value", "strategy", "seeds"};
    for_each_metric(sim::MetricsRecord{}, [&](const char* k, auto) { c.emplace_back(k); });
    return c;
  }();
  return cols;
}

const std::vector<std::string>& per_slot_columns() {
  static const std::vector<std::string> cols{
      "slot",   "arrivals",      "local",         "offered", "served",
      "deferred", "dropped",     "redistributed", "wait_estimate",
      "granted", "idle",         "revenue",       "penalty", "utility"};
  return cols;
}

const std::vector<std::string>& event_fields() {
  static const std::vector<std::string> f{"slot", "user_id", "task_id", "event",
                                          "F_i",  "q_i",     "payment", "reason"};
  return f;
}

std::string metrics_csv(const sim::RunResult& r) {
  return join(metrics_columns()) +
         metrics_row("none", r.scenario.capacity, pricing::name(r.scenario.strategy), 1,
                     r.metrics);
}

std::string sweep_csv(std::span<const sim::SweepRow> rows) {
  std::string out = join(metrics_columns());
  for (const auto& row : rows)
    out += metrics_row(name(row.axis), row.value, pricing::name(row.strategy), row.seeds,
                       row.mean);
  return out;
}

std::string metrics_json(const sim::RunResult& r) {
  ordered_json j;
  j["schema_version"] = kOutputSchemaVersion;
  j["scenario"] = r.scenario.name;
  j["strategy"] = pricing::name(r.scenario.strategy);
  j["seed"] = r.scenario.seed;
  j["F_total"] = r.scenario.capacity;
  j["lambda"] = r.scenario.lambda;
  j["slots"] = r.scenario.slots;
  j["metrics"] = metrics_object(r.metrics);
  j["slot_utilities"] = r.slot_utilities;
  return j.dump(2) + '\n';
}

std::string per_slot_csv(std::span<const sim::SlotRecord> slots) {
  std::string out = join(per_slot_columns());
  for (const auto& s : slots) {
    out += std::to_string(s.slot) + ',' + std::to_string(s.arrivals) + ',' +
           std::to_string(s.local) + ',' + std::to_string(s.offered) + ',' +
           std::to_string(s.served) + ',' + std::to_string(s.deferred) + ',' +
           std::to_string(s.dropped) + ',' + (s.redistributed ? "1" : "0") + ',' +
           format_double(s.wait_estimate) + ',' + format_double(s.granted) + ',' +
           format_double(s.idle) + ',' + format_double(s.revenue) + ',' +
           format_double(s.penalty) + ',' + format_double(s.utility) + '\n';
  }
  return out;
}

std::string events_jsonl(std::span<const sim::TraceEvent> events) {
  std::string out;
  for (const auto& e : events) {
    ordered_json j;
    j["slot"] = e.slot;
    j["user_id"] = e.user_id;
    j["task_id"] = e.task_id;
    j["event"] = e.event;
    j["F_i"] = e.cpu;
    j["q_i"] = e.bits;
    j["payment"] = e.payment;
    j["reason"] = e.reason;
    out += j.dump() + '\n';
  }
  return out;
}

std::string output_schema() {
  ordered_json j;
  j["schema_version"] = kOutputSchemaVersion;
  j["scenario"] = ordered_json::parse(scenario_schema());
  j["metrics_csv"] = metrics_columns();
  j["sweep_csv"] = metrics_columns();
  j["per_slot_csv"] = per_slot_columns();
  j["events_jsonl"] = event_fields();
  return j.dump(2) + '\n';
}

void write_file(const std::string& path, std::string_view text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!f) throw std::runtime_error("failed writing " + path);
}

}  // namespace ddps::report
