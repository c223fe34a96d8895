#include "smas/api/feedback.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "smas/error.hpp"
#include "smas/json_io.hpp"

namespace smas::api {

namespace {

template <typename E, std::size_t N>
E parse_named(const std::array<std::pair<E, std::string_view>, N>& table, std::string_view text,
              std::string_view what) {
  for (const auto& [v, name] : table) {
    if (name == text) return v;
  }
  std::string choices;
  for (const auto& [v, name] : table) {
    if (!choices.empty()) choices += ", ";
    choices += name;
  }
  throw Error(ErrorCode::invalid_argument,
              "unknown " + std::string(what) + " '" + std::string(text) + "' (expected one of " + choices + ")");
}

template <typename E, std::size_t N>
std::string_view name_of(const std::array<std::pair<E, std::string_view>, N>& table, E v) {
  for (const auto& [e, name] : table) {
    if (e == v) return name;
  }
  return "unknown";
}

constexpr std::array<std::pair<RuleScope, std::string_view>, 3> kScopes{{
    {RuleScope::meter, "meter"}, {RuleScope::neighborhood, "neighborhood"}, {RuleScope::city, "city"}}};
constexpr std::array<std::pair<RuleMetric, std::string_view>, 5> kMetrics{{
    {RuleMetric::consumption, "consumption"},
    {RuleMetric::base_load, "base_load"},
    {RuleMetric::heating_gradient, "heating_gradient"},
    {RuleMetric::cooling_gradient, "cooling_gradient"},
    {RuleMetric::rank, "rank"}}};
constexpr std::array<std::pair<Comparator, std::string_view>, 8> kComparators{{
    {Comparator::gt, ">"}, {Comparator::ge, ">="}, {Comparator::lt, "<"}, {Comparator::le, "<="},
    {Comparator::gt, "gt"}, {Comparator::ge, "ge"}, {Comparator::lt, "lt"}, {Comparator::le, "le"}}};

bool compare(Comparator c, double value, double bound) {
  switch (c) {
    case Comparator::gt: return value > bound;
    case Comparator::ge: return value >= bound;
    case Comparator::lt: return value < bound;
    case Comparator::le: return value <= bound;
  }
  return false;
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

void replace_all(std::string& text, std::string_view key, const std::string& value) {
  for (auto pos = text.find(key); pos != std::string::npos; pos = text.find(key, pos + value.size())) {
    text.replace(pos, key.size(), value);
  }
}

}  // namespace

std::string_view to_string(RuleScope v) noexcept { return name_of(kScopes, v); }
std::string_view to_string(RuleMetric v) noexcept { return name_of(kMetrics, v); }
std::string_view to_string(Comparator v) noexcept { return name_of(kComparators, v); }
RuleScope parse_rule_scope(std::string_view text) { return parse_named(kScopes, text, "scope"); }
RuleMetric parse_rule_metric(std::string_view text) { return parse_named(kMetrics, text, "metric"); }
Comparator parse_comparator(std::string_view text) { return parse_named(kComparators, text, "comparator"); }

void FeedbackRule::validate() const {
  if (resend_interval.count() <= 0) throw Error(ErrorCode::invalid_argument, "resend interval must be positive");
  if (consumption_window.count() <= 0) {
    throw Error(ErrorCode::invalid_argument, "consumption window must be positive");
  }
  if (!std::isfinite(bound)) throw Error(ErrorCode::invalid_argument, "bound must be finite");
  if (rank_by == RuleMetric::rank) throw Error(ErrorCode::invalid_argument, "rank_by cannot be rank");
  if (scope != RuleScope::city && target.empty()) {
    throw Error(ErrorCode::invalid_argument, std::string(to_string(scope)) + " rules need a target");
  }
  if (message_template.empty()) throw Error(ErrorCode::invalid_argument, "message template must not be empty");
}

json to_json(const FeedbackRule& r) {
  return json{{"id", r.id},
              {"scope", std::string(to_string(r.scope))},
              {"target", r.target},
              {"metric", std::string(to_string(r.metric))},
              {"rank_by", std::string(to_string(r.rank_by))},
              {"comparator", std::string(to_string(r.comparator))},
              {"bound", json_io::put_double(r.bound)},
              {"message", r.message_template},
              {"resend_interval_s", r.resend_interval.count()},
              {"consumption_window_h", r.consumption_window.count()},
              {"enabled", r.enabled}};
}

FeedbackRule rule_from_json(const json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::invalid_argument, "rule must be a JSON object");
  try {
    FeedbackRule r;
    r.id = doc.value("id", std::string{});
    r.scope = parse_rule_scope(doc.value("scope", std::string("city")));
    r.target = doc.value("target", std::string{});
    r.metric = parse_rule_metric(doc.at("metric").get<std::string>());
    r.rank_by = parse_rule_metric(doc.value("rank_by", std::string("consumption")));
    r.comparator = parse_comparator(doc.at("comparator").get<std::string>());
    r.bound = doc.at("bound").get<double>();
    r.message_template = doc.value("message", r.message_template);
    r.resend_interval = std::chrono::seconds{doc.value("resend_interval_s", r.resend_interval.count())};
    r.consumption_window = std::chrono::hours{doc.value("consumption_window_h", r.consumption_window.count())};
    r.enabled = doc.value("enabled", true);
    r.validate();
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::invalid_argument, std::string("invalid rule: ") + e.what());
  }
}

json to_json(const OutboxMessage& m) {
  return json{{"rule_id", m.rule_id},
              {"meter_id", m.meter_id},
              {"created_at", format_timestamp(m.created_at)},
              {"value", json_io::put_double(m.value)},
              {"text", m.text}};
}

OutboxMessage message_from_json(const json& doc) {
  try {
    return OutboxMessage{doc.at("rule_id").get<std::string>(), doc.at("meter_id").get<std::string>(),
                         parse_timestamp(doc.at("created_at").get<std::string>()),
                         json_io::get_double(doc.at("value")), doc.at("text").get<std::string>()};
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse, std::string("malformed outbox message: ") + e.what());
  }
}

void MemoryOutbox::deliver(const OutboxMessage& message) {
  std::lock_guard lock(mutex_);
  messages_.push_back(message);
}

std::vector<OutboxMessage> MemoryOutbox::messages() const {
  std::lock_guard lock(mutex_);
  return messages_;
}

FileOutbox::FileOutbox(std::filesystem::path path) : path_(std::move(path)) {}

void FileOutbox::deliver(const OutboxMessage& message) {
  std::lock_guard lock(mutex_);
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
  std::ofstream out(path_, std::ios::app);
  out << json_io::dump(to_json(message)) << '\n';
  if (!out) throw Error(ErrorCode::io, "cannot append to " + path_.string());
}

std::vector<OutboxMessage> FileOutbox::messages() const {
  std::lock_guard lock(mutex_);
  std::vector<OutboxMessage> out;
  std::ifstream in(path_);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto doc = json::parse(line, nullptr, false);
    if (doc.is_discarded()) throw Error(ErrorCode::parse, "malformed line in " + path_.string());
    out.push_back(message_from_json(doc));
  }
  return out;
}

FeedbackEngine::FeedbackEngine(const core::ReadingStore& store, const analytics::ModelRegistry& registry,
                               DeliveryAdapter& outbox)
    : store_(store), registry_(registry), outbox_(outbox) {}

FeedbackRule FeedbackEngine::add_rule(FeedbackRule rule) {
  rule.validate();
  std::lock_guard lock(mutex_);
  if (rule.id.empty()) {
    do {
      rule.id = "rule-" + std::to_string(++next_id_);
    } while (std::any_of(rules_.begin(), rules_.end(), [&](const FeedbackRule& r) { return r.id == rule.id; }));
  }
  for (const auto& r : rules_) {
    if (r.id == rule.id) throw Error(ErrorCode::duplicate, "rule '" + rule.id + "' already exists");
  }
  rules_.push_back(rule);
  return rule;
}

void FeedbackEngine::set_enabled(const std::string& rule_id, bool enabled) {
  std::lock_guard lock(mutex_);
  for (auto& r : rules_) {
    if (r.id == rule_id) {
      r.enabled = enabled;
      return;
    }
  }
  throw Error(ErrorCode::not_found, "unknown rule '" + rule_id + "'");
}

std::vector<FeedbackRule> FeedbackEngine::rules() const {
  std::lock_guard lock(mutex_);
  return rules_;
}

std::vector<OutboxMessage> FeedbackEngine::evaluate(Timestamp now) {
  const auto rules = this->rules();
  const auto meters = store_.meter_ids();
  std::map<std::string, std::string> neighborhood;
  for (const auto& c : store_.customers()) neighborhood[c.meter_id] = c.neighborhood_id;
  const auto neighborhood_of = [&](const std::string& id) -> std::string {
    const auto it = neighborhood.find(id);
    return it == neighborhood.end() ? std::string{} : it->second;
  };

  const auto metric_value = [&](const std::string& id, RuleMetric metric,
                                const FeedbackRule& rule) -> std::optional<double> {
    if (metric == RuleMetric::consumption) {
      // Whole hours only: the window ends at the start of the current hour.
      const auto end = std::chrono::floor<std::chrono::hours>(now);
      const auto buckets = store_.aggregate(core::Selection::meters({id}), core::Granularity::monthly,
                                            core::AggregateFn::sum, end - rule.consumption_window, end);
      double total = 0.0;
      for (const auto& b : buckets) total += b.value;
      return total;
    }
    const auto models = registry_.models(id);
    if (!models.three_line) return std::nullopt;
    switch (metric) {
      case RuleMetric::base_load: return models.three_line->base_load;
      case RuleMetric::heating_gradient: return models.three_line->heating_gradient;
      case RuleMetric::cooling_gradient: return models.three_line->cooling_gradient;
      default: return std::nullopt;
    }
  };

  std::vector<Candidate> candidates;
  for (const auto& rule : rules) {
    if (!rule.enabled) continue;
    std::vector<std::string> scope;
    for (const auto& id : meters) {
      const bool in = rule.scope == RuleScope::city ||
                      (rule.scope == RuleScope::meter && id == rule.target) ||
                      (rule.scope == RuleScope::neighborhood && neighborhood_of(id) == rule.target);
      if (in) scope.push_back(id);
    }
    std::map<std::string, std::optional<double>> rank_values;
    const auto rank_value = [&](const std::string& id) {
      auto it = rank_values.find(id);
      if (it == rank_values.end()) it = rank_values.emplace(id, metric_value(id, rule.rank_by, rule)).first;
      return it->second;
    };
    for (const auto& id : scope) {
      std::size_t rank = 0, group_size = 0;
      std::optional<double> value;
      if (rule.metric == RuleMetric::rank || rule.message_template.find("{rank}") != std::string::npos ||
          rule.message_template.find("{group_size}") != std::string::npos) {
        const auto own = rank_value(id);
        if (own) {
          const auto hood = neighborhood_of(id);
          rank = 1;
          for (const auto& other : meters) {
            const bool peer = rule.scope == RuleScope::city || other == id || (!hood.empty() && neighborhood_of(other) == hood);
            if (!peer) continue;
            const auto v = rank_value(other);
            if (!v) continue;
            ++group_size;
            if (*v > *own) ++rank;
          }
        }
        if (rule.metric == RuleMetric::rank && own) value = static_cast<double>(rank);
      }
      if (rule.metric != RuleMetric::rank) value = metric_value(id, rule.metric, rule);
      if (!value || !compare(rule.comparator, *value, rule.bound)) continue;
      std::string text = rule.message_template;
      replace_all(text, "{meter_id}", id);
      replace_all(text, "{metric}", std::string(to_string(rule.metric)));
      replace_all(text, "{value}", format_number(*value));
      replace_all(text, "{rank}", std::to_string(rank));
      replace_all(text, "{group_size}", std::to_string(group_size));
      replace_all(text, "{bound}", format_number(rule.bound));
      replace_all(text, "{rule_id}", rule.id);
      candidates.push_back({OutboxMessage{rule.id, id, now, *value, std::move(text)}, rule.resend_interval});
    }
  }

  std::vector<OutboxMessage> sent;
  std::lock_guard lock(mutex_);
  for (auto& c : candidates) {
    const auto key = std::make_pair(c.message.rule_id, c.message.meter_id);
    const auto it = last_sent_.find(key);
    if (it != last_sent_.end() && now - it->second < c.interval) continue;
    outbox_.deliver(c.message);
    last_sent_[key] = now;
    sent.push_back(std::move(c.message));
  }
  return sent;
}

}  // namespace smas::api
