#include "ddps/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "ddps/errors.hpp"
#include "ddps/queue.hpp"
#include "json.hpp"

namespace ddps {
namespace {

using nlohmann::json;

int line_of(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + offset, '\n'));
}

// Line of the first occurrence of "key" in the source, 0 when not found.
int line_of_key(std::string_view text, std::string_view key) {
  const std::string quoted = "\"" + std::string(key) + "\"";
  const auto pos = text.find(quoted);
  return pos == std::string_view::npos ? 0 : line_of(text, pos);
}

[[noreturn]] void fail(std::string_view text, const std::string& path, std::string_view leaf,
                       const std::string& what) {
  std::ostringstream os;
  os << "field '" << path << "'";
  if (const int line = line_of_key(text, leaf); line > 0) os << " (line " << line << ")";
  os << ": " << what;
  throw ConfigError(os.str());
}

class Reader {
 public:
  Reader(const json& obj, std::string path, std::string_view text)
      : obj_(obj), path_(std::move(path)), text_(text) {
    if (!obj_.is_object()) {
      throw ConfigError("field '" + (path_.empty() ? std::string("<root>") : path_) +
                        "': expected an object");
    }
  }

  bool has(const char* key) const { return obj_.contains(key); }

  void number(const char* key, double& out) {
    if (const json* v = take(key)) {
      if (!v->is_number()) fail(text_, full(key), key, "expected a number");
      out = v->get<double>();
      if (!std::isfinite(out)) fail(text_, full(key), key, "must be finite");
    }
  }

  void integer(const char* key, int& out) {
    if (const json* v = take(key)) {
      if (!v->is_number_integer()) fail(text_, full(key), key, "expected an integer");
      const auto x = v->get<std::int64_t>();
      if (x < INT32_MIN || x > INT32_MAX) fail(text_, full(key), key, "out of range");
      out = static_cast<int>(x);
    }
  }

  void seed(const char* key, std::uint64_t& out) {
    if (const json* v = take(key)) out = parse_seed(*v, full(key), key);
  }

  void string(const char* key, std::string& out) {
    if (const json* v = take(key)) {
      if (!v->is_string()) fail(text_, full(key), key, "expected a string");
      out = v->get<std::string>();
    }
  }

  void numbers(const char* key, std::vector<double>& out) {
    if (const json* v = take(key)) {
      if (!v->is_array()) fail(text_, full(key), key, "expected an array of numbers");
      out.clear();
      for (const auto& x : *v) {
        if (!x.is_number()) fail(text_, full(key), key, "expected an array of numbers");
        out.push_back(x.get<double>());
      }
    }
  }

  // [min, max] pair.
  void interval(const char* key, double& lo, double& hi) {
    if (const json* v = take(key)) {
      if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() || !(*v)[1].is_number()) {
        fail(text_, full(key), key, "expected [min, max]");
      }
      lo = (*v)[0].get<double>();
      hi = (*v)[1].get<double>();
      if (!(lo <= hi)) fail(text_, full(key), key, "min exceeds max");
    }
  }

  void strategy(const char* key, pricing::Strategy& out) {
    if (const json* v = take(key)) {
      if (!v->is_string()) fail(text_, full(key), key, "expected a strategy name");
      out = parse_strategy_or_fail(v->get<std::string>(), full(key), key);
    }
  }

  void strategies(const char* key, std::vector<pricing::Strategy>& out) {
    if (const json* v = take(key)) {
      if (!v->is_array()) fail(text_, full(key), key, "expected an array of strategy names");
      out.clear();
      for (const auto& x : *v) {
        if (!x.is_string()) fail(text_, full(key), key, "expected an array of strategy names");
        out.push_back(parse_strategy_or_fail(x.get<std::string>(), full(key), key));
      }
    }
  }

  void seeds(const char* key, std::vector<std::uint64_t>& out) {
    if (const json* v = take(key)) {
      if (!v->is_array()) fail(text_, full(key), key, "expected an array of seeds");
      out.clear();
      for (const auto& x : *v) out.push_back(parse_seed(x, full(key), key));
    }
  }

  Reader child(const char* key) {
    const json* v = take(key);
    if (!v->is_object()) fail(text_, full(key), key, "expected an object");
    return Reader(*v, full(key), text_);
  }

  void finish() const {
    for (const auto& [key, value] : obj_.items()) {
      if (!seen_.count(key)) fail(text_, full(key.c_str()), key, "unknown key");
    }
  }

 private:
  const json* take(const char* key) {
    seen_.insert(key);
    const auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  std::string full(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  std::uint64_t parse_seed(const json& v, const std::string& path, std::string_view key) const {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer()) {
      const auto x = v.get<std::int64_t>();
      if (x < 0) fail(text_, path, key, "seed must be non-negative");
      return static_cast<std::uint64_t>(x);
    }
    if (v.is_string()) {
      const auto s = v.get<std::string>();
      try {
        std::size_t used = 0;
        const auto x = std::stoull(s, &used, 0);
        if (used == s.size()) return x;
      } catch (const std::exception&) {
      }
    }
    fail(text_, path, key, "expected a non-negative integer seed");
  }

  pricing::Strategy parse_strategy_or_fail(const std::string& text, const std::string& path,
                                           std::string_view key) const {
    if (auto s = pricing::parse_strategy(text)) return *s;
    fail(text_, path, key, "unknown strategy '" + text + "'; valid: " + pricing::strategy_names());
  }

  const json& obj_;
  std::string path_;
  std::string_view text_;
  std::set<std::string> seen_;
};

void require(bool ok, const char* field, const std::string& what) {
  if (!ok) throw ConfigError(std::string("field '") + field + "': " + what);
}

}  // namespace

std::string_view name(SweepAxis a) {
  return a == SweepAxis::kCapacity ? "F_total" : "lambda";
}

SweepAxis parse_axis(std::string_view text) {
  if (text == "F_total") return SweepAxis::kCapacity;
  if (text == "lambda") return SweepAxis::kLambda;
  throw ConfigError("unknown sweep axis '" + std::string(text) + "'; valid: F_total, lambda");
}

Scenario paper_defaults() { return Scenario{}; }

void validate(const Scenario& s) {
  require(s.schema_version == kScenarioSchemaVersion, "schema_version",
          "unsupported version " + std::to_string(s.schema_version));
  require(s.n_users >= 0, "n_users", "must be non-negative");
  require(s.lambda >= 0.0 && s.lambda <= 50.0, "lambda", "must lie in [0, 50]");
  require(s.capacity > 0.0, "F_total", "must be positive");
  require(s.price_capacity >= s.capacity, "price_capacity", "must be at least F_total");
  require(s.slots >= 0, "slots", "must be non-negative");
  require(s.slot_length > 0.0, "slot_length", "must be positive");
  require(s.rng == queue::CounterRng::kName, "rng",
          "unsupported generator '" + s.rng + "'; valid: " + std::string(queue::CounterRng::kName));
  require(s.gamma > 0.0 && s.gamma < 1.0, "gamma", "must lie in (0,1)");
  require(s.epsilon >= 0.0 && s.epsilon < s.capacity, "epsilon", "must lie in [0, F_total)");
  require(s.max_concurrent >= 1, "max_concurrent", "must be at least 1");
  require(s.initial_charge >= 0.0 && s.initial_charge <= s.energy.battery_capacity,
          "initial_charge", "must lie in [0, battery_capacity]");
  try {
    pricing::validate(s.pricing);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("field 'pricing': ") + e.what());
  }
  try {
    energy::validate(s.energy);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("field 'energy': ") + e.what());
  }

  const auto& w = s.workload;
  require(!w.local_cpu_ghz.empty(), "workload.local_cpu_ghz", "must not be empty");
  for (double f : w.local_cpu_ghz) require(f > 0.0, "workload.local_cpu_ghz", "entries must be positive");
  require(w.data_min_kb > 0.0 && w.data_min_kb <= w.data_max_kb, "workload.data_kb",
          "need 0 < min <= max");
  require(w.bits_per_kb > 0.0, "workload.bits_per_kb", "must be positive");
  require(w.deadline_s > 0.0, "workload.deadline_s", "must be positive");
  require(w.deadline_jitter >= 0.0 && w.deadline_jitter < 1.0, "workload.deadline_jitter",
          "must lie in [0,1)");
  require(w.tx_delay_min_s > 0.0 && w.tx_delay_min_s <= w.tx_delay_max_s, "workload.tx_delay_s",
          "need 0 < min <= max");

  if (s.name == "paper-defaults") {
    for (double f : w.local_cpu_ghz) {
      const double tenths = f * 10.0;
      require(std::abs(tenths - std::round(tenths)) < 1e-9 && tenths >= 1.0 - 1e-9 &&
                  tenths <= 10.0 + 1e-9,
              "workload.local_cpu_ghz", "paper-defaults allows only {0.1, ..., 1.0} GHz");
    }
    require(w.data_min_kb >= 100.0 && w.data_max_kb <= 500.0, "workload.data_kb",
            "paper-defaults allows only [100, 500] KB");
    const double l10 = s.lambda * 10.0;
    require(std::abs(l10 - std::round(l10)) < 1e-9 && l10 >= 1.0 - 1e-9 && l10 <= 3.0 + 1e-9,
            "lambda", "paper-defaults allows only {0.1, 0.2, 0.3}");
  }

  if (s.sweep) {
    require(!s.sweep->values.empty(), "sweep.values", "must not be empty");
    require(!s.sweep->strategies.empty(), "sweep.strategies", "must not be empty");
    require(!s.sweep->seeds.empty(), "sweep.seeds", "must not be empty");
  }
}

Scenario parse_scenario(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::ostringstream os;
    os << "malformed JSON at line " << line_of(text, e.byte == 0 ? 0 : e.byte - 1) << ": "
       << e.what();
    throw ConfigError(os.str());
  }

  Scenario s;
  Reader root(doc, "", text);
  if (!root.has("schema_version")) throw ConfigError("field 'schema_version': missing");
  root.integer("schema_version", s.schema_version);
  if (s.schema_version != kScenarioSchemaVersion) {
    fail(text, "schema_version", "schema_version",
         "unsupported version " + std::to_string(s.schema_version));
  }
  root.string("name", s.name);
  root.integer("n_users", s.n_users);
  root.number("lambda", s.lambda);
  root.number("F_total", s.capacity);
  root.number("price_capacity", s.price_capacity);
  root.integer("slots", s.slots);
  root.number("slot_length", s.slot_length);
  root.strategy("pricing", s.strategy);
  root.seed("seed", s.seed);
  root.string("rng", s.rng);
  root.number("gamma", s.gamma);
  root.number("epsilon", s.epsilon);
  root.number("d", s.pricing.log_offset);
  root.number("a", s.pricing.a);
  root.number("b", s.pricing.b);
  root.numbers("uniform_price_set", s.pricing.uniform_price_set);
  root.integer("max_concurrent", s.max_concurrent);
  root.number("initial_charge", s.initial_charge);

  if (root.has("energy")) {
    Reader e = root.child("energy");
    auto& p = s.energy;
    e.number("switched_capacitance", p.switched_capacitance);
    e.number("cycles_per_bit", p.cycles_per_bit);
    e.number("panel_area", p.panel_area);
    e.number("irradiance", p.irradiance);
    e.number("efficiency", p.efficiency);
    e.number("correction", p.correction);
    e.number("uplink_power", p.uplink_power);
    e.number("downlink_power", p.downlink_power);
    e.number("output_ratio", p.output_ratio);
    e.number("battery_capacity", p.battery_capacity);
    e.finish();
  }
  if (root.has("workload")) {
    Reader w = root.child("workload");
    auto& r = s.workload;
    w.numbers("local_cpu_ghz", r.local_cpu_ghz);
    w.interval("data_kb", r.data_min_kb, r.data_max_kb);
    w.number("bits_per_kb", r.bits_per_kb);
    w.number("deadline_s", r.deadline_s);
    w.number("deadline_jitter", r.deadline_jitter);
    w.interval("tx_delay_s", r.tx_delay_min_s, r.tx_delay_max_s);
    w.finish();
  }
  if (root.has("sweep")) {
    Reader w = root.child("sweep");
    SweepSpec sw;
    std::string axis = "F_total";
    w.string("axis", axis);
    try {
      sw.axis = parse_axis(axis);
    } catch (const ConfigError& e) {
      fail(text, "sweep.axis", "axis", e.what());
    }
    w.numbers("values", sw.values);
    sw.strategies.assign(pricing::kAllStrategies.begin(), pricing::kAllStrategies.end());
    w.strategies("strategies", sw.strategies);
    sw.seeds = {s.seed};
    w.seeds("seeds", sw.seeds);
    w.finish();
    s.sweep = std::move(sw);
  }
  root.finish();
  validate(s);
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_scenario(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::string to_json(const Scenario& s, int indent) {
  json j;
  j["schema_version"] = s.schema_version;
  j["name"] = s.name;
  j["n_users"] = s.n_users;
  j["lambda"] = s.lambda;
  j["F_total"] = s.capacity;
  j["price_capacity"] = s.price_capacity;
  j["slots"] = s.slots;
  j["slot_length"] = s.slot_length;
  j["pricing"] = std::string(pricing::name(s.strategy));
  j["seed"] = s.seed;
  j["rng"] = s.rng;
  j["gamma"] = s.gamma;
  j["epsilon"] = s.epsilon;
  j["d"] = s.pricing.log_offset;
  j["a"] = s.pricing.a;
  j["b"] = s.pricing.b;
  j["uniform_price_set"] = s.pricing.uniform_price_set;
  j["max_concurrent"] = s.max_concurrent;
  j["initial_charge"] = s.initial_charge;
  const auto& p = s.energy;
  j["energy"] = {{"switched_capacitance", p.switched_capacitance},
                 {"cycles_per_bit", p.cycles_per_bit},
                 {"panel_area", p.panel_area},
                 {"irradiance", p.irradiance},
                 {"efficiency", p.efficiency},
                 {"correction", p.correction},
                 {"uplink_power", p.uplink_power},
                 {"downlink_power", p.downlink_power},
                 {"output_ratio", p.output_ratio},
                 {"battery_capacity", p.battery_capacity}};
  const auto& w = s.workload;
  j["workload"] = {{"local_cpu_ghz", w.local_cpu_ghz},
                   {"data_kb", {w.data_min_kb, w.data_max_kb}},
                   {"bits_per_kb", w.bits_per_kb},
                   {"deadline_s", w.deadline_s},
                   {"deadline_jitter", w.deadline_jitter},
                   {"tx_delay_s", {w.tx_delay_min_s, w.tx_delay_max_s}}};
  if (s.sweep) {
    json names = json::array();
    for (auto st : s.sweep->strategies) names.push_back(std::string(pricing::name(st)));
    j["sweep"] = {{"axis", std::string(name(s.sweep->axis))},
                  {"values", s.sweep->values},
                  {"strategies", names},
                  {"seeds", s.sweep->seeds}};
  }
  return j.dump(indent);
}

std::string scenario_schema() {
  const json number = {{"type", "number"}};
  const json integer = {{"type", "integer"}};
  const json pair = {{"type", "array"}, {"items", number}, {"minItems", 2}, {"maxItems", 2}};
  json names = json::array();
  for (auto st : pricing::kAllStrategies) names.push_back(std::string(pricing::name(st)));
  const json strategy = {{"type", "string"}, {"enum", names}};
  const json seed = {{"anyOf", json::array({{{"type", "integer"}, {"minimum", 0}},
                                            {{"type", "string"}}})}};

  json energy_props;
  for (const char* k : {"switched_capacitance", "cycles_per_bit", "panel_area", "irradiance",
                        "efficiency", "correction", "uplink_power", "downlink_power",
                        "output_ratio", "battery_capacity"}) {
    energy_props[k] = number;
  }

  json schema = {
      {"$schema", "https://json-schema.org/draft/2020-12/schema"},
      {"title", "ddps scenario"},
      {"type", "object"},
      {"required", {"schema_version"}},
      {"additionalProperties", false},
      {"properties",
       {{"schema_version", {{"const", kScenarioSchemaVersion}}},
        {"name", {{"type", "string"}}},
        {"n_users", integer},
        {"lambda", number},
        {"F_total", number},
        {"price_capacity", number},
        {"slots", integer},
        {"slot_length", number},
        {"pricing", strategy},
        {"seed", seed},
        {"rng", {{"const", std::string(queue::CounterRng::kName)}}},
        {"gamma", number},
        {"epsilon", number},
        {"d", number},
        {"a", number},
        {"b", number},
        {"uniform_price_set", {{"type", "array"}, {"items", number}}},
        {"max_concurrent", integer},
        {"initial_charge", number},
        {"energy",
         {{"type", "object"}, {"additionalProperties", false}, {"properties", energy_props}}},
        {"workload",
         {{"type", "object"},
          {"additionalProperties", false},
          {"properties",
           {{"local_cpu_ghz", {{"type", "array"}, {"items", number}}},
            {"data_kb", pair},
            {"bits_per_kb", number},
            {"deadline_s", number},
            {"deadline_jitter", number},
            {"tx_delay_s", pair}}}}},
        {"sweep",
         {{"type", "object"},
          {"additionalProperties", false},
          {"properties",
           {{"axis", {{"enum", {"F_total", "lambda"}}}},
            {"values", {{"type", "array"}, {"items", number}}},
            {"strategies", {{"type", "array"}, {"items", strategy}}},
            {"seeds", {{"type", "array"}, {"items", seed}}}}}}}}}};
  return schema.dump(2);
}

}  // namespace ddps
