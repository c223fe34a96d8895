#include "smas/api/service.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "smas/analytics/forecast.hpp"
#include "smas/analytics/model_io.hpp"
#include "smas/error.hpp"
#include "smas/json_io.hpp"
#include "smas/stats/descriptive.hpp"

namespace smas::api {

namespace {

using nlohmann::json;

struct HttpError {
  int status;
  std::string code;
  std::string message;
};

ApiResponse respond(int status, const json& body) { return ApiResponse{status, json_io::dump(body)}; }

ApiResponse error_response(int status, const std::string& code, const std::string& message) {
  return respond(status, json{{"code", code}, {"message", message}});
}

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : path) {
    if (c == '/') {
      if (!cur.empty()) parts.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) parts.push_back(std::move(cur));
  return parts;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::optional<std::string> header(const ApiRequest& r, const std::string& name) {
  for (const auto& [k, v] : r.headers) {
    if (lower(k) == lower(name)) return v;
  }
  return std::nullopt;
}

std::optional<std::string> param(const ApiRequest& r, const std::string& name) {
  const auto it = r.query.find(name);
  if (it == r.query.end() || it->second.empty()) return std::nullopt;
  return it->second;
}

Timestamp parse_time_param(const std::string& text) {
  if (text.size() == 10) return start_of(parse_date(text));
  return parse_timestamp(text);
}

long parse_int_param(const std::string& name, const std::string& text, long lo, long hi) {
  long v = 0;
  const auto* end = text.data() + text.size();
  const auto [p, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || p != end || v < lo || v > hi) {
    throw Error(ErrorCode::invalid_argument,
                name + " must be an integer in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return v;
}

const Date kEarliest = parse_date("1970-01-01");
const Date kLatest = parse_date("9999-12-31");

bool parse_bool_param(const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw Error(ErrorCode::invalid_argument, "expected true or false, got '" + text + "'");
}

enum class Role { utility, customer };

struct Caller {
  Role role = Role::utility;
  std::string meter_id;
};

Caller caller_of(const ApiRequest& r) {
  const auto role = header(r, "X-Role").value_or("utility");
  if (role == "utility") return {};
  if (role == "customer") {
    const auto id = header(r, "X-Meter-Id");
    if (!id || id->empty()) throw HttpError{401, "unauthenticated", "customer requests need X-Meter-Id"};
    return Caller{Role::customer, *id};
  }
  throw HttpError{401, "unauthenticated", "unknown role '" + role + "' (expected utility or customer)"};
}

void require_utility(const Caller& c) {
  if (c.role != Role::utility) throw HttpError{403, "forbidden", "this endpoint needs the utility role"};
}

void require_meter_access(const Caller& c, const std::string& meter_id) {
  if (c.role == Role::customer && c.meter_id != meter_id) {
    throw HttpError{403, "forbidden", "customers may only access their own meter"};
  }
}

json parse_body(const ApiRequest& r) {
  const auto doc = json::parse(r.body, nullptr, false);
  if (doc.is_discarded()) throw Error(ErrorCode::parse, "request body is not valid JSON");
  return doc;
}

json threshold_json(const ThresholdSetting& s) {
  return json{{"meter_id", s.meter_id}, {"epsilon", json_io::put_double(s.epsilon)},
              {"updated_at", format_timestamp(s.updated_at)}};
}

}  // namespace

int http_status(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument:
    case ErrorCode::alignment:
    case ErrorCode::validation:
    case ErrorCode::parse: return 400;
    case ErrorCode::privacy: return 403;
    case ErrorCode::not_found: return 404;
    case ErrorCode::duplicate:
    case ErrorCode::dependency: return 409;
    case ErrorCode::insufficient_data:
    case ErrorCode::singular_fit:
    case ErrorCode::degenerate_model: return 422;
    case ErrorCode::io: return 500;
  }
  return 500;
}

ApiService::ApiService(ApiServices services) : s_(std::move(services)) {
  if (!s_.clock) throw Error(ErrorCode::invalid_argument, "api service needs a clock");
}

ApiResponse ApiService::handle(const ApiRequest& req) const {
  try {
    const auto caller = caller_of(req);
    const auto parts = split_path(req.path);
    const bool get = req.method == "GET";
    const bool post = req.method == "POST";
    const auto n = parts.size();

    const auto range = [&](const std::string& meter_id) {
      const auto stored = s_.store.stored_range(meter_id);
      if (!stored) throw Error(ErrorCode::not_found, "meter '" + meter_id + "' has no readings");
      const auto from = param(req, "from") ? parse_time_param(*param(req, "from")) : stored->first;
      const auto to = param(req, "to") ? parse_time_param(*param(req, "to")) : stored->second;
      if (to < from) throw Error(ErrorCode::invalid_argument, "'to' precedes 'from'");
      return std::make_pair(from, to);
    };
    const auto granularity = [&](core::Granularity fallback) {
      const auto g = param(req, "granularity");
      return g ? core::parse_granularity(*g) : fallback;
    };

    if (n == 1 && parts[0] == "health" && get) return respond(200, json{{"status", "ok"}});

    if (n == 1 && parts[0] == "meters" && get) {
      require_utility(caller);
      return respond(200, json{{"meters", s_.store.meter_ids()}});
    }

    if (n >= 3 && parts[0] == "meters") {
      const auto& id = parts[1];
      const auto& what = parts[2];
      require_meter_access(caller, id);
      if (n == 3 && what == "consumption" && get) {
        const auto [from, to] = range(id);
        const auto g = granularity(core::Granularity::daily);
        const auto fn = param(req, "fn") ? core::parse_aggregate_fn(*param(req, "fn")) : core::AggregateFn::sum;
        const auto buckets = s_.store.aggregate(core::Selection::meters({id}), g, fn, from, to);
        return respond(200, json{{"meter_id", id},
                                 {"granularity", std::string(core::to_string(g))},
                                 {"fn", std::string(core::to_string(fn))},
                                 {"from", format_timestamp(from)},
                                 {"to", format_timestamp(to)},
                                 {"buckets", analytics::to_json(buckets)}});
      }
      if (n == 3 && what == "compare" && get) {
        const auto [from, to] = range(id);
        const auto g = granularity(core::Granularity::daily);
        const auto self = s_.store.aggregate(core::Selection::meters({id}), g, core::AggregateFn::sum, from, to);
        const auto hood = s_.store.neighborhood_average(id, g, from, to);
        return respond(200, json{{"meter_id", id},
                                 {"granularity", std::string(core::to_string(g))},
                                 {"from", format_timestamp(from)},
                                 {"to", format_timestamp(to)},
                                 {"self", analytics::to_json(self)},
                                 {"neighborhood_avg", analytics::to_json(hood)}});
      }
      if (n == 3 && what == "profile" && get) {
        const auto models = s_.registry.models(id);
        if (!models.profile || !models.three_line) {
          throw Error(ErrorCode::dependency, "model not built for meter '" + id + "' (run fit first)");
        }
        const auto series = s_.store.query_all(id);
        std::vector<double> hours;
        for (std::size_t i = 0; i < series.size(); ++i) {
          if (!series.gap_mask[i]) hours.push_back(series.consumption[i]);
        }
        json histogram = json(nullptr);
        if (!hours.empty()) histogram = analytics::to_json(stats::equi_width_histogram(hours));
        const auto& t = *models.three_line;
        return respond(200, json{{"meter_id", id},
                                 {"profile", analytics::to_json(*models.profile)},
                                 {"three_line",
                                  json{{"base_load", json_io::put_double(t.base_load)},
                                       {"heating_gradient", json_io::put_double(t.heating_gradient)},
                                       {"cooling_gradient", json_io::put_double(t.cooling_gradient)},
                                       {"heating_available", t.heating_available},
                                       {"cooling_available", t.cooling_available}}},
                                 {"activity_load", models.activity_load ? json_io::put_double(*models.activity_load)
                                                                        : json(nullptr)},
                                 {"hours", hours.size()},
                                 {"histogram", histogram}});
      }
      if (n == 3 && what == "forecast" && get) {
        const auto method =
            analytics::parse_forecast_method(param(req, "method").value_or(std::string("averaging")));
        const auto horizon =
            static_cast<std::size_t>(parse_int_param("horizon", param(req, "horizon").value_or("24"), 1, 24 * 366));
        const auto g = granularity(core::Granularity::hourly);
        std::optional<analytics::ParxModel> parx;
        if (method == analytics::ForecastMethod::parx) {
          parx = s_.registry.models(id).parx;
          if (!parx) throw Error(ErrorCode::dependency, "model not built for meter '" + id + "' (run fit first)");
        }
        const auto history = s_.store.query_all(id);
        const auto f = analytics::forecast(method, history, g, horizon, parx ? &*parx : nullptr);
        auto body = analytics::to_json(f);
        body["meter_id"] = id;
        body["granularity"] = std::string(core::to_string(g));
        return respond(200, body);
      }
      if (n == 3 && what == "anomalies" && get) {
        const auto from = param(req, "from") ? parse_date(*param(req, "from")) : kEarliest;
        const auto to = param(req, "to") ? parse_date(*param(req, "to")) : kLatest;
        const bool flagged = param(req, "flagged_only") ? parse_bool_param(*param(req, "flagged_only")) : false;
        json reports = json::array();
        for (const auto& r : s_.anomalies.query(id, from, to, flagged)) reports.push_back(analytics::to_json(r));
        const auto eps = s_.thresholds.epsilon(id);
        return respond(200, json{{"meter_id", id},
                                 {"epsilon", eps ? json_io::put_double(*eps) : json(nullptr)},
                                 {"reports", reports}});
      }
      if (n == 3 && what == "threshold" && get) {
        const auto s = s_.thresholds.get(id);
        if (!s) return respond(200, json{{"meter_id", id}, {"epsilon", nullptr}, {"updated_at", nullptr}});
        return respond(200, threshold_json(*s));
      }
      if (n == 3 && what == "threshold" && post) {
        const auto doc = parse_body(req);
        if (!doc.is_object() || !doc.contains("epsilon") || !doc["epsilon"].is_number()) {
          throw Error(ErrorCode::validation, "body must be {\"epsilon\": number}");
        }
        if (s_.store.row_count(id) == 0 && !s_.registry.detector(id)) {
          throw Error(ErrorCode::not_found, "unknown meter '" + id + "'");
        }
        return respond(200, threshold_json(s_.thresholds.set(id, doc["epsilon"].get<double>(), s_.clock())));
      }
      throw HttpError{get || post ? 404 : 405, get || post ? "not_found" : "method_not_allowed",
                      "no route for " + req.method + " " + req.path};
    }

    if (n == 1 && parts[0] == "segments" && get) {
      require_utility(caller);
      analytics::FeatureSelection sel;
      if (const auto f = param(req, "features")) {
        sel = analytics::FeatureSelection{false, false, false, false, false};
        std::stringstream ss(*f);
        std::string name;
        while (std::getline(ss, name, ',')) {
          if (name == "base_load") sel.base_load = true;
          else if (name == "activity_load") sel.activity_load = true;
          else if (name == "heating_gradient") sel.heating_gradient = true;
          else if (name == "cooling_gradient") sel.cooling_gradient = true;
          else if (name == "weekday_profile") sel.weekday_profile = true;
          else {
            throw Error(ErrorCode::invalid_argument,
                        "unknown feature '" + name +
                            "' (expected base_load, activity_load, heating_gradient, cooling_gradient, weekday_profile)");
          }
        }
      }
      const auto k = static_cast<std::size_t>(parse_int_param("k", param(req, "k").value_or("3"), 1, 1000000));
      const auto seed =
          static_cast<std::uint64_t>(parse_int_param("seed", param(req, "seed").value_or("42"), 0, std::numeric_limits<long>::max()));
      std::vector<analytics::CustomerFeatures> features;
      std::vector<std::string> skipped;
      for (const auto& id : s_.registry.meter_ids()) {
        try {
          auto f = analytics::extract_features(id, s_.registry.models(id));
          if (sel.weekday_profile && !f.weekday_profile) {
            skipped.push_back(id);
            continue;
          }
          features.push_back(std::move(f));
        } catch (const Error& e) {
          if (e.code() != ErrorCode::dependency) throw;
          skipped.push_back(id);
        }
      }
      if (k > features.size()) {
        throw Error(ErrorCode::invalid_argument, "k = " + std::to_string(k) + " exceeds the " +
                                                     std::to_string(features.size()) + " meters with features");
      }
      const auto seg = analytics::segment_customers(features, k, sel, seed);
      auto body = analytics::to_json(seg);
      for (std::size_t c = 0; c < k; ++c) {
        json members = json::array();
        for (std::size_t i = 0; i < seg.meter_ids.size(); ++i) {
          if (seg.clustering.assignments[i] == c) members.push_back(seg.meter_ids[i]);
        }
        body["clusters"][c]["members"] = members;
      }
      body["seed"] = seed;
      body["skipped"] = skipped;
      return respond(200, body);
    }

    if (n == 1 && parts[0] == "anomalies" && get) {
      require_utility(caller);
      const auto from = param(req, "from") ? parse_date(*param(req, "from")) : kEarliest;
      const auto to = param(req, "to") ? parse_date(*param(req, "to")) : kLatest;
      const bool flagged = param(req, "flagged_only") ? parse_bool_param(*param(req, "flagged_only")) : true;
      json reports = json::array();
      for (const auto& r : s_.anomalies.query(std::nullopt, from, to, flagged)) reports.push_back(analytics::to_json(r));
      return respond(200, json{{"reports", reports}});
    }

    if (n >= 1 && parts[0] == "feedback-rules") {
      require_utility(caller);
      if (n == 1 && get) {
        json rules = json::array();
        for (const auto& r : s_.feedback.rules()) rules.push_back(to_json(r));
        return respond(200, json{{"rules", rules}});
      }
      if (n == 1 && post) return respond(201, to_json(s_.feedback.add_rule(rule_from_json(parse_body(req)))));
      if (n == 2 && parts[1] == "evaluate" && post) {
        const auto now = param(req, "now") ? parse_time_param(*param(req, "now")) : s_.clock();
        json sent = json::array();
        for (const auto& m : s_.feedback.evaluate(now)) sent.push_back(to_json(m));
        return respond(200, json{{"sent", sent}});
      }
    }

    if (n == 1 && parts[0] == "outbox" && get) {
      require_utility(caller);
      json messages = json::array();
      for (const auto& m : s_.outbox.messages()) messages.push_back(to_json(m));
      return respond(200, json{{"messages", messages}});
    }

    return error_response(404, "not_found", "no route for " + req.method + " " + req.path);
  } catch (const HttpError& e) {
    return error_response(e.status, e.code, e.message);
  } catch (const Error& e) {
    return error_response(http_status(e.code()), std::string(to_string(e.code())), e.what());
  } catch (const std::exception& e) {
    return error_response(500, "internal", e.what());
  }
}

}  // namespace smas::api
