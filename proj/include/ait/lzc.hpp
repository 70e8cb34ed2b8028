/*
 * Copyright 2026 The ait Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Bit-exact Lempel-Ziv code lengths, used as computable upper bounds on
// Kolmogorov complexity.
//
// LZ78: the input is parsed into phrases, each the longest phrase already in
//   the dictionary extended by one byte. Phrase k (1-based) is coded as a
//   ceil(log2 k)-bit dictionary index followed by an 8-bit literal. A
//   trailing partial phrase (input ends inside a known phrase) after T
//   complete phrases is coded as a ceil(log2(T + 1))-bit index alone.
//
// LZ77: greedy parse with matches searched over offsets 1..4095.
//   literal  '0' + 8-bit byte                          9 bits
//   match    '1' + 12-bit offset + 6-bit (length - 3)  19 bits, length 3..66
//   The longest match wins, ties go to the smallest offset, and matches
//   shorter than 3 are emitted as literals. Matches may overlap the cursor.
//
// Both streams are uniquely decodable given their bit length; encode/decode
// below materialize them.

#ifndef AIT_LZC_HPP_
#define AIT_LZC_HPP_

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ait/error.hpp"

namespace ait {

// Byte strings are carried in std::string; 0xFF is reserved as separator.
using ByteString = std::string;

inline constexpr char kSeparator = static_cast<char>(0xFF);

enum class CompressorId { lz77, lz78 };

inline std::string_view to_string(CompressorId c) { return c == CompressorId::lz77 ? "lz77" : "lz78"; }

inline std::optional<CompressorId> parse_compressor(std::string_view name) {
  if (name == "lz77" || name == "LZ77") return CompressorId::lz77;
  if (name == "lz78" || name == "LZ78") return CompressorId::lz78;
  return std::nullopt;
}

// MSB-first bit stream with an exact bit count.
class BitStream {
 public:
  void put(std::uint32_t value, unsigned width) {
    for (unsigned i = width; i-- > 0;) put_bit((value >> i) & 1u);
  }

  void put_bit(bool bit) {
    if (size_ % 8 == 0) bytes_.push_back(0);
    if (bit) bytes_.back() |= static_cast<std::uint8_t>(0x80u >> (size_ % 8));
    ++size_;
  }

  bool bit(std::uint64_t index) const { return (bytes_[index / 8] >> (7 - index % 8)) & 1u; }
  std::uint64_t size() const { return size_; }

 private:
  std::vector<std::uint8_t> bytes_;
  std::uint64_t size_ = 0;
};

namespace lz77 {

inline constexpr unsigned kOffsetBits = 12;
inline constexpr unsigned kLengthBits = 6;
inline constexpr std::size_t kMaxOffset = (1u << kOffsetBits) - 1;  // 4095
inline constexpr std::size_t kMinMatch = 3;
inline constexpr std::size_t kMaxMatch = kMinMatch + (1u << kLengthBits) - 1;  // 66
inline constexpr std::uint64_t kLiteralBits = 1 + 8;
inline constexpr std::uint64_t kMatchBits = 1 + kOffsetBits + kLengthBits;

struct Token {
  std::uint16_t offset = 0;  // 0 for literals
  std::uint8_t length = 0;   // 0 for literals
  char literal = 0;

  bool is_match() const { return offset != 0; }
  friend bool operator==(const Token&, const Token&) = default;
};

// Greedy parse using hash chains over 3-byte prefixes; chains are walked from
// the most recent position so the first longest match has the smallest offset.
inline std::vector<Token> parse(std::string_view s) {
  std::vector<Token> tokens;
  const std::size_t n = s.size();
  constexpr std::size_t kHashSize = 1u << 16;
  std::vector<std::int64_t> head(kHashSize, -1);
  std::vector<std::int64_t> prev(n, -1);
  auto hash_at = [&](std::size_t i) {
    const auto b = [&](std::size_t k) { return static_cast<std::uint32_t>(static_cast<std::uint8_t>(s[k])); };
    return ((b(i) << 16) ^ (b(i + 1) << 8) ^ b(i + 2)) * 2654435761u >> 16 & (kHashSize - 1);
  };
  std::size_t inserted = 0;
  auto insert_upto = [&](std::size_t end) {
    for (; inserted < end; ++inserted) {
      if (inserted + kMinMatch > n) continue;
      const auto h = hash_at(inserted);
      prev[inserted] = head[h];
      head[h] = static_cast<std::int64_t>(inserted);
    }
  };

  std::size_t i = 0;
  while (i < n) {
    insert_upto(i);
    std::size_t best_len = 0;
    std::size_t best_off = 0;
    const std::size_t limit = std::min(kMaxMatch, n - i);
    if (limit >= kMinMatch) {
      for (std::int64_t cand = head[hash_at(i)]; cand >= 0; cand = prev[cand]) {
        const std::size_t off = i - static_cast<std::size_t>(cand);
        if (off > kMaxOffset) break;
        std::size_t len = 0;
        while (len < limit && s[static_cast<std::size_t>(cand) + len] == s[i + len]) ++len;
        if (len > best_len) {
          best_len = len;
          best_off = off;
          if (len == limit) break;
        }
      }
    }
    if (best_len >= kMinMatch) {
      tokens.push_back(Token{static_cast<std::uint16_t>(best_off), static_cast<std::uint8_t>(best_len), 0});
      i += best_len;
    } else {
      tokens.push_back(Token{0, 0, s[i]});
      ++i;
    }
  }
  return tokens;
}

inline std::uint64_t bits(std::string_view s) {
  std::uint64_t total = 0;
  for (const Token& t : parse(s)) total += t.is_match() ? kMatchBits : kLiteralBits;
  return total;
}

inline BitStream encode(std::string_view s) {
  BitStream out;
  for (const Token& t : parse(s)) {
    if (t.is_match()) {
      out.put_bit(true);
      out.put(t.offset, kOffsetBits);
      out.put(static_cast<std::uint32_t>(t.length - kMinMatch), kLengthBits);
    } else {
      out.put_bit(false);
      out.put(static_cast<std::uint8_t>(t.literal), 8);
    }
  }
  return out;
}

inline std::string decode(const BitStream& in) {
  std::string out;
  std::uint64_t pos = 0;
  auto read = [&](unsigned width) {
    detail::require(pos + width <= in.size(), "truncated LZ77 stream");
    std::uint32_t v = 0;
    for (unsigned k = 0; k < width; ++k) v = (v << 1) | static_cast<std::uint32_t>(in.bit(pos++));
    return v;
  };
  while (pos < in.size()) {
    if (read(1) == 0) {
      out.push_back(static_cast<char>(read(8)));
      continue;
    }
    const std::size_t offset = read(kOffsetBits);
    const std::size_t length = read(kLengthBits) + kMinMatch;
    detail::require(offset >= 1 && offset <= out.size(), "LZ77 offset outside decoded data");
    const std::size_t start = out.size() - offset;
    for (std::size_t k = 0; k < length; ++k) out.push_back(out[start + k]);
  }
  return out;
}

}  // namespace lz77

namespace lz78 {

inline constexpr std::uint64_t kLiteralBits = 8;

inline unsigned index_bits(std::uint64_t choices) {
  return choices <= 1 ? 0u : static_cast<unsigned>(std::bit_width(choices - 1));
}

struct Phrase {
  std::uint32_t index = 0;  // dictionary entry extended by this phrase; 0 is empty
  std::optional<char> literal;  // absent only for a trailing partial phrase
};

inline std::vector<Phrase> parse(std::string_view s) {
  std::vector<Phrase> phrases;
  std::unordered_map<std::uint64_t, std::uint32_t> children;
  std::uint32_t next = 1;
  std::uint32_t cur = 0;
  for (char ch : s) {
    const std::uint64_t key = (static_cast<std::uint64_t>(cur) << 8) | static_cast<std::uint8_t>(ch);
    if (auto it = children.find(key); it != children.end()) {
      cur = it->second;
      continue;
    }
    phrases.push_back(Phrase{cur, ch});
    children.emplace(key, next++);
    cur = 0;
  }
  if (cur != 0) phrases.push_back(Phrase{cur, std::nullopt});
  return phrases;
}

inline std::uint64_t bits(std::string_view s) {
  std::uint64_t total = 0;
  std::uint64_t k = 1;
  for (const Phrase& p : parse(s)) {
    total += index_bits(k) + (p.literal ? kLiteralBits : 0);
    ++k;
  }
  return total;
}

inline BitStream encode(std::string_view s) {
  BitStream out;
  std::uint64_t k = 1;
  for (const Phrase& p : parse(s)) {
    out.put(p.index, index_bits(k));
    if (p.literal) out.put(static_cast<std::uint8_t>(*p.literal), 8);
    ++k;
  }
  return out;
}

inline std::string decode(const BitStream& in) {
  std::vector<std::string> dict{std::string()};
  std::string out;
  std::uint64_t pos = 0;
  auto read = [&](unsigned width) {
    detail::require(pos + width <= in.size(), "truncated LZ78 stream");
    std::uint32_t v = 0;
    for (unsigned k = 0; k < width; ++k) v = (v << 1) | static_cast<std::uint32_t>(in.bit(pos++));
    return v;
  };
  for (std::uint64_t k = 1; pos < in.size(); ++k) {
    const std::uint32_t index = read(index_bits(k));
    detail::require(index < dict.size(), "LZ78 index outside dictionary");
    if (pos == in.size()) {
      out += dict[index];
      break;
    }
    std::string phrase = dict[index];
    phrase.push_back(static_cast<char>(read(8)));
    out += phrase;
    dict.push_back(std::move(phrase));
  }
  return out;
}

}  // namespace lz78

inline std::uint64_t compressed_bits(std::string_view s, CompressorId c) {
  return c == CompressorId::lz77 ? lz77::bits(s) : lz78::bits(s);
}

inline BitStream encode(std::string_view s, CompressorId c) {
  return c == CompressorId::lz77 ? lz77::encode(s) : lz78::encode(s);
}

inline std::string decode(const BitStream& in, CompressorId c) {
  return c == CompressorId::lz77 ? lz77::decode(in) : lz78::decode(in);
}

namespace detail {

inline void require_payload(std::string_view s, const char* what) {
  require(s.find(kSeparator) == std::string_view::npos,
          std::string(what) + " contains the reserved separator byte 0xFF");
}

// max(0, R(ctx FF x) - R(ctx FF)); R(x) for an empty context. Separators
// inside x are allowed here (joint strings).
inline std::uint64_t conditional_bits(std::string_view x, std::string_view ctx, CompressorId c) {
  if (ctx.empty()) return compressed_bits(x, c);
  std::string prefix(ctx);
  prefix.push_back(kSeparator);
  const std::uint64_t base = compressed_bits(prefix, c);
  prefix.append(x);
  const std::uint64_t both = compressed_bits(prefix, c);
  return both > base ? both - base : 0;
}

}  // namespace detail

// R(a FF b).
inline std::uint64_t joint_bits(std::string_view a, std::string_view b, CompressorId c) {
  detail::require_payload(a, "first string");
  detail::require_payload(b, "second string");
  std::string joined(a);
  joined.push_back(kSeparator);
  joined.append(b);
  return compressed_bits(joined, c);
}

// Upper bound on K(x | ctx) as an increase in code length when x is appended
// to the context, clamped at zero.
inline std::uint64_t cond_complexity_estimate(std::string_view x, std::string_view ctx, CompressorId c) {
  detail::require_payload(x, "string");
  detail::require_payload(ctx, "context");
  return detail::conditional_bits(x, ctx, c);
}

}  // namespace ait

#endif  // AIT_LZC_HPP_
