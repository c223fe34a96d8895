#include "smas/ingest/anonymize.hpp"

#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <map>

#include "smas/error.hpp"

namespace smas::ingest {

std::string pseudonym(const std::string& meter_id, const std::string& salt) {
  if (salt.empty()) throw Error(ErrorCode::invalid_argument, "anonymization salt must not be empty");
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  HMAC(EVP_sha256(), salt.data(), static_cast<int>(salt.size()),
       reinterpret_cast<const unsigned char*>(meter_id.data()), meter_id.size(), digest, &len);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out = "anon_";
  for (unsigned int i = 0; i < 16 && i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::io, "SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

std::vector<core::HourlyReading> anonymize(std::span<const core::HourlyReading> rows, const std::string& salt) {
  std::map<std::string, std::string> cache;
  std::vector<core::HourlyReading> out(rows.begin(), rows.end());
  for (auto& r : out) {
    auto it = cache.find(r.meter_id);
    if (it == cache.end()) it = cache.emplace(r.meter_id, pseudonym(r.meter_id, salt)).first;
    r.meter_id = it->second;
  }
  if (out.empty()) (void)pseudonym("", salt);
  return out;
}

std::vector<core::CustomerRecord> anonymize(std::span<const core::CustomerRecord> records, const std::string& salt) {
  std::vector<core::CustomerRecord> out(records.begin(), records.end());
  for (auto& r : out) {
    r.meter_id = pseudonym(r.meter_id, salt);
    r.anonymized = true;
  }
  if (out.empty()) (void)pseudonym("", salt);
  return out;
}

}  // namespace smas::ingest
