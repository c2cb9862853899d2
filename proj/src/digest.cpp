// SPDX-License-Identifier: Apache-2.0
#include "digest.hpp"

#include <openssl/evp.h>

#include <cstdio>

namespace wimerge {

std::string Digest128::hex() const {
  std::string out(32, '\0');
  for (size_t i = 0; i < bytes.size(); ++i)
    std::snprintf(out.data() + 2 * i, 3, "%02x", bytes[i]);
  return out;
}

Digest128 md5_digest(std::span<const uint8_t> data) {
  thread_local EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  Digest128 d;
  unsigned int len = 0;
  EVP_DigestInit_ex(ctx, EVP_md5(), nullptr);
  if (!data.empty()) EVP_DigestUpdate(ctx, data.data(), data.size());
  EVP_DigestFinal_ex(ctx, d.bytes.data(), &len);
  return d;
}

}  // namespace wimerge
