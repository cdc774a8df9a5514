#include "kgrec/digest.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdio>
#include <memory>
#include <vector>

#include "kgrec/error.hpp"

namespace kgrec {

namespace {

using CtxPtr = std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)>;

std::string finish_hex(EVP_MD_CTX* ctx) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_DigestFinal_ex(ctx, md, &len) != 1)
    throw Error("sha256: digest finalization failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 0xF]);
  }
  return out;
}

CtxPtr make_ctx() {
  CtxPtr ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
    throw Error("sha256: context init failed");
  return ctx;
}

}  // namespace

std::string sha256_hex(std::string_view data) {
  auto ctx = make_ctx();
  if (EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1)
    throw Error("sha256: update failed");
  return finish_hex(ctx.get());
}

std::string sha256_file(const std::string& path) {
  std::unique_ptr<std::FILE, decltype(&std::fclose)> f(
      std::fopen(path.c_str(), "rb"), &std::fclose);
  if (!f) throw IoError("cannot open file for digest: " + path);
  auto ctx = make_ctx();
  std::array<char, 1 << 16> buf;
  for (;;) {
    std::size_t n = std::fread(buf.data(), 1, buf.size(), f.get());
    if (n > 0 && EVP_DigestUpdate(ctx.get(), buf.data(), n) != 1)
      throw Error("sha256: update failed");
    if (n < buf.size()) {
      if (std::ferror(f.get())) throw IoError("read error while digesting: " + path);
      break;
    }
  }
  return finish_hex(ctx.get());
}

}  // namespace kgrec
