#include "smas/error.hpp"
#include "smas/json_io.hpp"
#include "smas/time.hpp"

#include <cctype>
#include <cstdio>

namespace smas {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::alignment: return "alignment";
    case ErrorCode::validation: return "validation";
    case ErrorCode::duplicate: return "duplicate";
    case ErrorCode::not_found: return "not_found";
    case ErrorCode::privacy: return "privacy";
    case ErrorCode::insufficient_data: return "insufficient_data";
    case ErrorCode::singular_fit: return "singular_fit";
    case ErrorCode::degenerate_model: return "degenerate_model";
    case ErrorCode::dependency: return "dependency";
    case ErrorCode::parse: return "parse";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

namespace {

bool read_number(std::string_view text, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > text.size()) return false;
  int value = 0;
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (!std::isdigit(static_cast<unsigned char>(text[i]))) return false;
    value = value * 10 + (text[i] - '0');
  }
  out = value;
  return true;
}

[[noreturn]] void bad_timestamp(std::string_view text) {
  throw Error(ErrorCode::parse, "malformed timestamp '" + std::string(text) + "'");
}

Date make_date(std::string_view text, int y, int m, int d) {
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                                        std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) bad_timestamp(text);
  return Date{ymd};
}

}  // namespace

Date parse_date(std::string_view text) {
  int y = 0, m = 0, d = 0;
  if (text.size() != 10 || text[4] != '-' || text[7] != '-' || !read_number(text, 0, 4, y) ||
      !read_number(text, 5, 2, m) || !read_number(text, 8, 2, d)) {
    bad_timestamp(text);
  }
  return make_date(text, y, m, d);
}

Timestamp parse_timestamp(std::string_view text) {
  std::string_view body = text;
  if (!body.empty() && (body.back() == 'Z' || body.back() == 'z')) body.remove_suffix(1);
  // YYYY-MM-DDTHH:MM or YYYY-MM-DDTHH:MM:SS
  if (body.size() != 16 && body.size() != 19) bad_timestamp(text);
  if (body[10] != 'T' && body[10] != ' ') bad_timestamp(text);
  const Date day = parse_date(body.substr(0, 10));
  int hh = 0, mm = 0, ss = 0;
  if (body[13] != ':' || !read_number(body, 11, 2, hh) || !read_number(body, 14, 2, mm)) bad_timestamp(text);
  if (body.size() == 19 && (body[16] != ':' || !read_number(body, 17, 2, ss))) bad_timestamp(text);
  if (hh > 23 || mm > 59 || ss > 59) bad_timestamp(text);
  return start_of(day) + std::chrono::hours{hh} + std::chrono::minutes{mm} + std::chrono::seconds{ss};
}

std::string format_date(Date d) {
  const std::chrono::year_month_day ymd{d};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()));
  return buf;
}

std::string format_timestamp(Timestamp t) {
  const Date d = date_of(t);
  const auto secs = (t - start_of(d)).count();
  char buf[32];
  std::snprintf(buf, sizeof buf, "%sT%02lld:%02lld:%02lldZ", format_date(d).c_str(), static_cast<long long>(secs / 3600),
                static_cast<long long>((secs / 60) % 60), static_cast<long long>(secs % 60));
  return buf;
}

namespace json_io {

namespace {

void write(const json& value, std::string& out) {
  switch (value.type()) {
    case json::value_t::object: {
      out += '{';
      bool first = true;
      for (const auto& [key, item] : value.items()) {
        if (!first) out += ',';
        first = false;
        out += json(key).dump();
        out += ':';
        write(item, out);
      }
      out += '}';
      break;
    }
    case json::value_t::array: {
      out += '[';
      bool first = true;
      for (const auto& item : value) {
        if (!first) out += ',';
        first = false;
        write(item, out);
      }
      out += ']';
      break;
    }
    case json::value_t::number_float: {
      const double v = value.get<double>();
      if (!std::isfinite(v)) {
        out += "null";
      } else {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out += buf;
      }
      break;
    }
    default:
      out += value.dump();
  }
}

}  // namespace

std::string dump(const json& value) {
  std::string out;
  write(value, out);
  return out;
}

}  // namespace json_io
}  // namespace smas
