#pragma once

#include <functional>
#include <map>
#include <string>

#include "smas/analytics/profile.hpp"
#include "smas/analytics/registry.hpp"
#include "smas/api/feedback.hpp"
#include "smas/api/thresholds.hpp"
#include "smas/core/store.hpp"
#include "smas/error.hpp"

namespace smas::api {

struct ApiRequest {
  std::string method = "GET";
  std::string path;
  std::map<std::string, std::string> query;
  /// Header names are matched case-insensitively.
  std::map<std::string, std::string> headers;
  std::string body;
};

struct ApiResponse {
  int status = 200;
  std::string body;
};

/// Everything the handlers read or update.
struct ApiServices {
  core::ReadingStore& store;
  analytics::ModelRegistry& registry;
  analytics::AnomalyLog& anomalies;
  ThresholdStore& thresholds;
  FeedbackEngine& feedback;
  DeliveryAdapter& outbox;
  std::function<Timestamp()> clock;
  analytics::Calendar calendar;
};

/**
 * @brief HTTP/JSON facade, independent of any socket layer.
 *
 * Roles come from the `X-Role` header: `utility` (the default) sees every
 * endpoint; `customer` must also send `X-Meter-Id` and may only use the
 * per-meter endpoints of that meter. Errors are `{code, message}` documents.
 * GET responses depend only on the stored state, so equal state yields
 * byte-identical bodies.
 */
class ApiService {
 public:
  explicit ApiService(ApiServices services);

  [[nodiscard]] ApiResponse handle(const ApiRequest& request) const;

  /// Serves HTTP/1.1 until the process stops. Throws Error(io) if the address cannot be bound.
  void serve(const std::string& host, int port) const;

 private:
  ApiServices s_;
};

/// HTTP status for an error code.
[[nodiscard]] int http_status(ErrorCode code) noexcept;

}  // namespace smas::api
