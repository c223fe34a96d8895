#include "smas/analytics/model_io.hpp"

#include "smas/error.hpp"
#include "smas/json_io.hpp"

namespace smas::analytics {

namespace {

using json_io::get_double;
using json_io::put_double;

json doubles(std::span<const double> values) {
  json arr = json::array();
  for (double v : values) arr.push_back(put_double(v));
  return arr;
}

template <typename Out>
void read_doubles(const json& arr, Out& out) {
  std::size_t i = 0;
  for (const auto& v : arr) {
    if constexpr (requires { out.push_back(0.0); }) {
      out.push_back(get_double(v));
    } else {
      if (i >= out.size()) throw Error(ErrorCode::parse, "too many values in array");
      out[i] = get_double(v);
    }
    ++i;
  }
}

void check_version(const json& doc, std::string_view kind) {
  if (!doc.is_object() || !doc.contains("format_version")) {
    throw Error(ErrorCode::parse, std::string(kind) + " document has no format_version");
  }
  if (doc.at("format_version").get<int>() != kModelFormatVersion) {
    throw Error(ErrorCode::parse, std::string(kind) + " document has unsupported format_version " +
                                      doc.at("format_version").dump());
  }
}

json ols_json(const stats::OlsFit& fit) {
  return json{{"coefficients", doubles(fit.coefficients)},
              {"std_errors", doubles(fit.std_errors)},
              {"t_values", doubles(fit.t_values)},
              {"p_values", doubles(fit.p_values)},
              {"r2", put_double(fit.r2)},
              {"adjusted_r2", put_double(fit.adjusted_r2)},
              {"residual_std_error", put_double(fit.residual_std_error)},
              {"n", fit.n}};
}

stats::OlsFit ols_from(const json& j) {
  stats::OlsFit fit;
  read_doubles(j.at("coefficients"), fit.coefficients);
  read_doubles(j.at("std_errors"), fit.std_errors);
  read_doubles(j.at("t_values"), fit.t_values);
  read_doubles(j.at("p_values"), fit.p_values);
  fit.r2 = get_double(j.at("r2"));
  fit.adjusted_r2 = get_double(j.at("adjusted_r2"));
  fit.residual_std_error = get_double(j.at("residual_std_error"));
  fit.n = j.at("n").get<std::size_t>();
  return fit;
}

json gaussian_json(const stats::GaussianModel& g) {
  return json{{"mu", put_double(g.mu)}, {"sigma2", put_double(g.sigma2)}, {"n_train", g.n_train}};
}

stats::GaussianModel gaussian_from(const json& j) {
  return stats::GaussianModel{get_double(j.at("mu")), get_double(j.at("sigma2")), j.at("n_train").get<std::size_t>()};
}

json piece_json(const LinePiece& p) {
  return json{{"available", p.available}, {"slope", put_double(p.slope)}, {"intercept", put_double(p.intercept)},
              {"bins", p.bins}};
}

LinePiece piece_from(const json& j) {
  return LinePiece{j.at("available").get<bool>(), get_double(j.at("slope")), get_double(j.at("intercept")),
                   j.at("bins").get<std::size_t>()};
}

json curve_json(const PercentileCurve& c) {
  json arr = json::array();
  for (const auto& p : c.pieces) arr.push_back(piece_json(p));
  return arr;
}

PercentileCurve curve_from(const json& j) {
  PercentileCurve c;
  if (j.size() != 3) throw Error(ErrorCode::parse, "a percentile curve needs 3 pieces");
  for (std::size_t i = 0; i < 3; ++i) c.pieces[i] = piece_from(j.at(i));
  return c;
}

}  // namespace

json to_json(const ParxModel& model) {
  json seasons = json::array();
  for (const auto& s : model.seasons) {
    json beta_active = json::array();
    for (bool b : s.beta_active) beta_active.push_back(b);
    json season{{"fitted", s.fitted},
                {"intercept", put_double(s.intercept)},
                {"alpha", doubles(s.alpha)},
                {"beta", doubles(s.beta)},
                {"beta_active", beta_active},
                {"failure", s.failure}};
    if (s.fitted) season["diagnostics"] = ols_json(s.diagnostics);
    seasons.push_back(std::move(season));
  }
  return json{{"format_version", kModelFormatVersion},
              {"kind", "parx"},
              {"meter_id", model.meter_id},
              {"order_p", model.order_p},
              {"train_from", format_date(model.train_from)},
              {"train_to", format_date(model.train_to)},
              {"seasons", seasons}};
}

ParxModel parx_from_json(const json& doc) {
  check_version(doc, "parx");
  ParxModel m;
  try {
    m.meter_id = doc.at("meter_id").get<std::string>();
    m.order_p = doc.at("order_p").get<std::size_t>();
    m.train_from = parse_date(doc.at("train_from").get<std::string>());
    m.train_to = parse_date(doc.at("train_to").get<std::string>());
    const auto& seasons = doc.at("seasons");
    if (seasons.size() != kHoursPerDay) throw Error(ErrorCode::parse, "parx document needs 24 seasons");
    for (std::size_t i = 0; i < kHoursPerDay; ++i) {
      const auto& j = seasons.at(i);
      auto& s = m.seasons[i];
      s.fitted = j.at("fitted").get<bool>();
      s.intercept = get_double(j.at("intercept"));
      read_doubles(j.at("alpha"), s.alpha);
      read_doubles(j.at("beta"), s.beta);
      for (std::size_t k = 0; k < 3; ++k) s.beta_active[k] = j.at("beta_active").at(k).get<bool>();
      s.failure = j.value("failure", "");
      if (j.contains("diagnostics")) s.diagnostics = ols_from(j.at("diagnostics"));
      if (s.alpha.size() != m.order_p) throw Error(ErrorCode::parse, "alpha length differs from order_p");
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse, std::string("malformed parx document: ") + e.what());
  }
  return m;
}

json to_json(const ThreeLineModel& m) {
  return json{{"format_version", kModelFormatVersion},
              {"kind", "three_line"},
              {"meter_id", m.meter_id},
              {"upper", curve_json(m.upper)},
              {"lower", curve_json(m.lower)},
              {"cooling_gradient", put_double(m.cooling_gradient)},
              {"heating_gradient", put_double(m.heating_gradient)},
              {"cooling_available", m.cooling_available},
              {"heating_available", m.heating_available},
              {"base_load", put_double(m.base_load)},
              {"t_min", put_double(m.t_min)},
              {"t_max", put_double(m.t_max)}};
}

ThreeLineModel three_line_from_json(const json& doc) {
  check_version(doc, "three_line");
  try {
    ThreeLineModel m;
    m.meter_id = doc.at("meter_id").get<std::string>();
    m.upper = curve_from(doc.at("upper"));
    m.lower = curve_from(doc.at("lower"));
    m.cooling_gradient = get_double(doc.at("cooling_gradient"));
    m.heating_gradient = get_double(doc.at("heating_gradient"));
    m.cooling_available = doc.at("cooling_available").get<bool>();
    m.heating_available = doc.at("heating_available").get<bool>();
    m.base_load = get_double(doc.at("base_load"));
    m.t_min = get_double(doc.at("t_min"));
    m.t_max = get_double(doc.at("t_max"));
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse, std::string("malformed three_line document: ") + e.what());
  }
}

json to_json(const AnomalyDetector& d) {
  json doc{{"format_version", kModelFormatVersion},
           {"kind", "anomaly_detector"},
           {"meter_id", d.meter_id},
           {"parx", to_json(d.parx)},
           {"gaussian", gaussian_json(d.gaussian)},
           {"epsilon", put_double(d.epsilon)},
           {"history_guard_density", put_double(d.history_guard_density)},
           {"train_from", format_date(d.train_from)},
           {"train_to", format_date(d.train_to)}};
  if (d.weekend_gaussian) doc["weekend_gaussian"] = gaussian_json(*d.weekend_gaussian);
  return doc;
}

AnomalyDetector detector_from_json(const json& doc) {
  check_version(doc, "anomaly_detector");
  try {
    AnomalyDetector d;
    d.meter_id = doc.at("meter_id").get<std::string>();
    d.parx = parx_from_json(doc.at("parx"));
    d.gaussian = gaussian_from(doc.at("gaussian"));
    if (doc.contains("weekend_gaussian")) d.weekend_gaussian = gaussian_from(doc.at("weekend_gaussian"));
    d.epsilon = get_double(doc.at("epsilon"));
    d.history_guard_density = get_double(doc.at("history_guard_density"));
    d.train_from = parse_date(doc.at("train_from").get<std::string>());
    d.train_to = parse_date(doc.at("train_to").get<std::string>());
    return d;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse, std::string("malformed anomaly_detector document: ") + e.what());
  }
}

json to_json(const DailyProfile& p) {
  return json{{"format_version", kModelFormatVersion},
              {"kind", "daily_profile"},
              {"meter_id", p.meter_id},
              {"weekday", doubles(p.weekday)},
              {"weekend", doubles(p.weekend)},
              {"weekday_available", p.weekday_available},
              {"weekend_available", p.weekend_available}};
}

DailyProfile profile_from_json(const json& doc) {
  check_version(doc, "daily_profile");
  try {
    DailyProfile p;
    p.meter_id = doc.at("meter_id").get<std::string>();
    read_doubles(doc.at("weekday"), p.weekday);
    read_doubles(doc.at("weekend"), p.weekend);
    p.weekday_available = doc.at("weekday_available").get<bool>();
    p.weekend_available = doc.at("weekend_available").get<bool>();
    return p;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse, std::string("malformed daily_profile document: ") + e.what());
  }
}

json to_json(const CustomerFeatures& f) {
  json j{{"meter_id", f.meter_id},
         {"base_load", put_double(f.base_load)},
         {"activity_load", put_double(f.activity_load)},
         {"heating_gradient", put_double(f.heating_gradient)},
         {"cooling_gradient", put_double(f.cooling_gradient)}};
  if (f.weekday_profile) j["weekday_profile"] = doubles(*f.weekday_profile);
  return j;
}

json to_json(const AnomalyReport& r) {
  return json{{"meter_id", r.meter_id},
              {"day", format_date(r.day)},
              {"distance", put_double(r.distance)},
              {"density", put_double(r.density)},
              {"flagged", r.flagged},
              {"epsilon", put_double(r.epsilon)},
              {"partial", r.partial},
              {"hours_used", r.hours_used}};
}

AnomalyReport report_from_json(const json& j) {
  try {
    AnomalyReport r;
    r.meter_id = j.at("meter_id").get<std::string>();
    r.day = parse_date(j.at("day").get<std::string>());
    r.distance = get_double(j.at("distance"));
    r.density = get_double(j.at("density"));
    r.flagged = j.at("flagged").get<bool>();
    r.epsilon = get_double(j.at("epsilon"));
    r.partial = j.at("partial").get<bool>();
    r.hours_used = j.at("hours_used").get<std::size_t>();
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse, std::string("malformed anomaly report: ") + e.what());
  }
}

json to_json(const Segmentation& s) {
  json clusters = json::array();
  for (Eigen::Index c = 0; c < s.centroids.rows(); ++c) {
    json centroid = json::object();
    for (Eigen::Index f = 0; f < s.centroids.cols(); ++f) {
      centroid[s.feature_names[static_cast<std::size_t>(f)]] = put_double(s.centroids(c, f));
    }
    clusters.push_back(json{{"cluster", c}, {"size", s.cluster_sizes[static_cast<std::size_t>(c)]}, {"centroid", centroid}});
  }
  json assignments = json::array();
  for (std::size_t i = 0; i < s.meter_ids.size(); ++i) {
    assignments.push_back(json{{"meter_id", s.meter_ids[i]}, {"cluster", s.clustering.assignments[i]}});
  }
  return json{{"k", s.clustering.k},
              {"features", s.feature_names},
              {"inertia", put_double(s.clustering.inertia)},
              {"iterations", s.clustering.iterations},
              {"converged", s.clustering.converged},
              {"clusters", clusters},
              {"assignments", assignments}};
}

json to_json(const EvaluationReport& r) {
  auto methods = [](const std::array<double, kEvalMethods>& v) {
    json j = json::object();
    for (std::size_t m = 0; m < kEvalMethods; ++m) j[std::string(to_string(static_cast<EvalMethod>(m)))] = put_double(v[m]);
    return j;
  };
  json meters = json::array();
  for (const auto& m : r.meters) {
    meters.push_back(json{{"meter_id", m.meter_id},
                          {"rmse", methods(m.rmse)},
                          {"train_days", m.train_days},
                          {"test_days", m.test_days},
                          {"test_hours", m.test_hours}});
  }
  return json{{"mean_rmse", methods(r.mean_rmse)},
              {"parx_wins_vs_averaging", r.parx_wins_vs_averaging},
              {"parx_wins_vs_three_line", r.parx_wins_vs_three_line},
              {"meter_count", r.meters.size()},
              {"meters", meters}};
}

json to_json(const BucketForecast& f) {
  json buckets = json::array();
  for (const auto& b : f.buckets) {
    buckets.push_back(json{{"start", format_timestamp(b.start)}, {"value", put_double(b.value)}, {"hours", b.count}});
  }
  return json{{"method", std::string(to_string(f.hourly.method))},
              {"start", format_timestamp(f.hourly.start)},
              {"temperature_fallback", f.hourly.temperature_fallback},
              {"buckets", buckets}};
}

json to_json(std::span<const core::Bucket> buckets) {
  json out = json::array();
  for (const auto& b : buckets) {
    out.push_back(json{{"start", format_timestamp(b.start)}, {"value", put_double(b.value)}, {"count", b.count}});
  }
  return out;
}

json to_json(const stats::Histogram& h) {
  json edges = json::array();
  for (std::size_t i = 0; i <= h.bucket_count; ++i) edges.push_back(put_double(h.lo + static_cast<double>(i) * h.width()));
  return json{{"bucket_count", h.bucket_count}, {"lo", put_double(h.lo)}, {"hi", put_double(h.hi)},
              {"edges", edges}, {"counts", h.counts}};
}

}  // namespace smas::analytics
