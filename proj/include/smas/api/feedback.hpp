#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "smas/analytics/registry.hpp"
#include "smas/core/store.hpp"

namespace smas::api {

using nlohmann::json;

enum class RuleScope { meter, neighborhood, city };
enum class RuleMetric { consumption, base_load, heating_gradient, cooling_gradient, rank };
enum class Comparator { gt, ge, lt, le };

[[nodiscard]] std::string_view to_string(RuleScope v) noexcept;
[[nodiscard]] std::string_view to_string(RuleMetric v) noexcept;
[[nodiscard]] std::string_view to_string(Comparator v) noexcept;
/// Each throws Error(invalid_argument) listing the accepted names.
[[nodiscard]] RuleScope parse_rule_scope(std::string_view text);
[[nodiscard]] RuleMetric parse_rule_metric(std::string_view text);
/// Accepts ">", ">=", "<", "<=" and gt, ge, lt, le.
[[nodiscard]] Comparator parse_comparator(std::string_view text);

/**
 * @brief Condition on a customer metric that triggers a message.
 *
 * Scope selects the meters: one meter (`target` is its id), one neighborhood
 * (`target` is the neighborhood id) or the whole city. `rank` is the 1-based
 * position by `rank_by`, highest value first, among the meter's neighborhood
 * (meter and neighborhood scope) or all meters (city scope). Consumption is
 * the stored total over the `consumption_window` before evaluation time.
 * Templates may use {meter_id}, {metric}, {value}, {rank}, {group_size},
 * {bound} and {rule_id}.
 */
struct FeedbackRule {
  std::string id;
  RuleScope scope = RuleScope::city;
  std::string target;
  RuleMetric metric = RuleMetric::consumption;
  RuleMetric rank_by = RuleMetric::consumption;
  Comparator comparator = Comparator::gt;
  double bound = 0.0;
  std::string message_template = "{metric} is {value} for {meter_id}";
  std::chrono::seconds resend_interval{std::chrono::hours{24}};
  std::chrono::hours consumption_window{24 * 30};
  bool enabled = true;

  /// Throws Error(invalid_argument) on an unusable rule.
  void validate() const;
};

[[nodiscard]] json to_json(const FeedbackRule& rule);
/// Throws Error(invalid_argument) for unknown names or missing fields.
[[nodiscard]] FeedbackRule rule_from_json(const json& doc);

struct OutboxMessage {
  std::string rule_id;
  std::string meter_id;
  Timestamp created_at{};
  double value = 0.0;
  std::string text;

  friend bool operator==(const OutboxMessage&, const OutboxMessage&) = default;
};

[[nodiscard]] json to_json(const OutboxMessage& message);
[[nodiscard]] OutboxMessage message_from_json(const json& doc);

/// Where rendered messages go. Only outbox implementations ship.
class DeliveryAdapter {
 public:
  virtual ~DeliveryAdapter() = default;
  virtual void deliver(const OutboxMessage& message) = 0;
  [[nodiscard]] virtual std::vector<OutboxMessage> messages() const = 0;
};

class MemoryOutbox final : public DeliveryAdapter {
 public:
  void deliver(const OutboxMessage& message) override;
  [[nodiscard]] std::vector<OutboxMessage> messages() const override;

 private:
  mutable std::mutex mutex_;
  std::vector<OutboxMessage> messages_;
};

/// Appends messages to a JSON-lines file.
class FileOutbox final : public DeliveryAdapter {
 public:
  explicit FileOutbox(std::filesystem::path path);
  void deliver(const OutboxMessage& message) override;
  [[nodiscard]] std::vector<OutboxMessage> messages() const override;

 private:
  std::filesystem::path path_;
  mutable std::mutex mutex_;
};

/// Evaluates rules against stored readings and fitted models. A rule sends at
/// most one message per meter per resend interval, also under concurrent
/// evaluate() calls.
class FeedbackEngine {
 public:
  FeedbackEngine(const core::ReadingStore& store, const analytics::ModelRegistry& registry, DeliveryAdapter& outbox);

  /// Validates and stores the rule, assigning "rule-N" when the id is empty.
  /// Throws Error(duplicate) for a taken id.
  FeedbackRule add_rule(FeedbackRule rule);
  void set_enabled(const std::string& rule_id, bool enabled);
  [[nodiscard]] std::vector<FeedbackRule> rules() const;

  /// Sends every due message and returns them in (rule, meter) order.
  std::vector<OutboxMessage> evaluate(Timestamp now);

 private:
  struct Candidate {
    OutboxMessage message;
    std::chrono::seconds interval{};
  };

  const core::ReadingStore& store_;
  const analytics::ModelRegistry& registry_;
  DeliveryAdapter& outbox_;
  mutable std::mutex mutex_;
  std::vector<FeedbackRule> rules_;
  std::map<std::pair<std::string, std::string>, Timestamp> last_sent_;
  std::size_t next_id_ = 0;
};

}  // namespace smas::api
