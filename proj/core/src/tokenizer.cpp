// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The synthkit Authors.

#include "synthkit/tokenizer.hpp"

#include <cctype>

namespace synthkit {

std::vector<std::string> tokenize_smiles(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    std::size_t len = 1;
    if (c == '[') {
      const std::size_t close = text.find(']', i + 1);
      if (close != std::string_view::npos) len = close - i + 1;
    } else if ((c == 'C' || c == 'B') && i + 1 < text.size() && text[i + 1] == (c == 'C' ? 'l' : 'r')) {
      len = 2;
    } else if (c == '%' && i + 2 < text.size() && std::isdigit(static_cast<unsigned char>(text[i + 1])) &&
               std::isdigit(static_cast<unsigned char>(text[i + 2]))) {
      len = 3;
    }
    tokens.emplace_back(text.substr(i, len));
    i += len;
  }
  return tokens;
}

std::vector<std::string> token_ngrams(const std::vector<std::string> &tokens, std::size_t n) {
  std::vector<std::string> out;
  if (n == 0 || tokens.size() < n) return out;
  out.reserve(tokens.size() - n + 1);
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string gram = tokens[i];
    for (std::size_t j = 1; j < n; ++j) {
      gram += ' ';
      gram += tokens[i + j];
    }
    out.push_back(std::move(gram));
  }
  return out;
}

}  // namespace synthkit
