#include "privesc/core/base64.hpp"

#include <openssl/evp.h>

#include <vector>

namespace privesc {

std::string base64_encode(std::string_view plain) {
  std::vector<unsigned char> out(4 * ((plain.size() + 2) / 3) + 1);
  const int n = EVP_EncodeBlock(out.data(), reinterpret_cast<const unsigned char*>(plain.data()),
                                static_cast<int>(plain.size()));
  return {reinterpret_cast<const char*>(out.data()), static_cast<std::size_t>(n)};
}

std::optional<std::string> base64_decode(std::string_view encoded) {
  if (encoded.size() % 4 != 0) return std::nullopt;
  std::vector<unsigned char> out(3 * (encoded.size() / 4) + 1);
  const int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(encoded.data()),
                                static_cast<int>(encoded.size()));
  if (n < 0) return std::nullopt;
  std::size_t len = static_cast<std::size_t>(n);
  // EVP_DecodeBlock keeps the zero bytes produced by '=' padding.
  for (std::size_t i = encoded.size(); i > 0 && encoded[i - 1] == '='; --i) --len;
  return std::string(reinterpret_cast<const char*>(out.data()), len);
}

}  // namespace privesc
