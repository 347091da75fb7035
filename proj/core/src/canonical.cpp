// SPDX-License-Identifier: Apache-2.0
#include "cafscore/canonical.hpp"

#include <openssl/evp.h>

#include <array>
#include <memory>

#include "cafscore/errors.hpp"

namespace cafscore {
namespace {

void write_canonical(const Json& j, std::string& out) {
  switch (j.type()) {
    case Json::value_t::object: {
      // nlohmann's default object type is a std::map, so iteration is key-sorted.
      out.push_back('{');
      bool first = true;
      for (const auto& [k, v] : j.items()) {
        if (!first) out.push_back(',');
        first = false;
        out += Json(k).dump();
        out.push_back(':');
        write_canonical(v, out);
      }
      out.push_back('}');
      break;
    }
    case Json::value_t::array: {
      out.push_back('[');
      bool first = true;
      for (const auto& v : j) {
        if (!first) out.push_back(',');
        first = false;
        write_canonical(v, out);
      }
      out.push_back(']');
      break;
    }
    case Json::value_t::number_float:
      out += format_double(j.get<double>());
      break;
    default:
      out += j.dump();
  }
}

}  // namespace

std::string canonical_dump(const Json& j) {
  std::string out;
  write_canonical(j, out);
  return out;
}

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 digest failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    hex.push_back(kHex[md[i] >> 4]);
    hex.push_back(kHex[md[i] & 0xF]);
  }
  return hex;
}

}  // namespace cafscore
