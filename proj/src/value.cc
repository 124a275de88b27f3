// Copyright 2026 The snapnet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "snapnet/value.h"

#include <cassert>
#include <charconv>
#include <cstdint>
#include <string>
#include <vector>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"

namespace snapnet {
namespace {

uint32_t MaskFor(int len) {
  return len == 0 ? 0u : ~uint32_t{0} << (32 - len);
}

void AppendBigEndian(std::string& out, uint64_t v, int bytes) {
  for (int i = bytes - 1; i >= 0; --i) {
    out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
}

}  // namespace

bool Prefix::Contains(uint32_t ip) const {
  return (ip & MaskFor(len)) == addr;
}

bool Prefix::Contains(const Prefix& other) const {
  return other.len >= len && Contains(other.addr);
}

bool Prefix::Disjoint(const Prefix& other) const {
  return !Contains(other) && !other.Contains(*this);
}

Value Value::MakePrefix(uint32_t addr, int len) {
  assert(len >= 0 && len <= 32);
  return Value(Rep(Prefix{addr & MaskFor(len), len}));
}

Value Value::Tuple(std::vector<Value> elems) {
  assert(!elems.empty());
  return Value(Rep(std::move(elems)));
}

bool Value::Matches(const Value& pattern) const {
  if (pattern.is_prefix()) {
    return is_ip() && pattern.as_prefix().Contains(as_ip());
  }
  return *this == pattern;
}

int Value::Compare(const Value& a, const Value& b) {
  if (a.rep_.index() != b.rep_.index()) {
    return a.rep_.index() < b.rep_.index() ? -1 : 1;
  }
  auto three_way = [](const auto& x, const auto& y) {
    return x < y ? -1 : (y < x ? 1 : 0);
  };
  switch (a.kind()) {
    case Kind::kInt:
      return three_way(a.as_int(), b.as_int());
    case Kind::kBool:
      return three_way(a.as_bool(), b.as_bool());
    case Kind::kIp:
      return three_way(a.as_ip(), b.as_ip());
    case Kind::kPrefix: {
      const Prefix& pa = a.as_prefix();
      const Prefix& pb = b.as_prefix();
      if (pa.addr != pb.addr) return pa.addr < pb.addr ? -1 : 1;
      return three_way(pa.len, pb.len);
    }
    case Kind::kSymbol:
      return three_way(a.as_symbol(), b.as_symbol());
    case Kind::kTuple: {
      const auto& ta = a.as_tuple();
      const auto& tb = b.as_tuple();
      for (size_t i = 0; i < ta.size() && i < tb.size(); ++i) {
        if (int c = Compare(ta[i], tb[i]); c != 0) return c;
      }
      return three_way(ta.size(), tb.size());
    }
  }
  return 0;
}

std::string Value::ToString() const {
  switch (kind()) {
    case Kind::kInt:
      return absl::StrCat(as_int());
    case Kind::kBool:
      return as_bool() ? "true" : "false";
    case Kind::kIp:
      return FormatIpv4(as_ip());
    case Kind::kPrefix:
      return absl::StrCat(FormatIpv4(as_prefix().addr), "/", as_prefix().len);
    case Kind::kSymbol: {
      // Symbols always print quoted so they never collide with field or
      // keyword names on re-parse.
      std::string out = "\"";
      for (char c : as_symbol()) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
      }
      out.push_back('"');
      return out;
    }
    case Kind::kTuple:
      return absl::StrCat(
          "(",
          absl::StrJoin(as_tuple(), ", ",
                        [](std::string* out, const Value& v) {
                          out->append(v.ToString());
                        }),
          ")");
  }
  return "";
}

std::string Value::Encode() const {
  std::string out;
  out.push_back(static_cast<char>(rep_.index()));
  switch (kind()) {
    case Kind::kInt:
      // Offset so that unsigned byte order matches signed order.
      AppendBigEndian(out, static_cast<uint64_t>(as_int()) ^ (uint64_t{1} << 63),
                      8);
      break;
    case Kind::kBool:
      out.push_back(as_bool() ? 1 : 0);
      break;
    case Kind::kIp:
      AppendBigEndian(out, as_ip(), 4);
      break;
    case Kind::kPrefix:
      AppendBigEndian(out, as_prefix().addr, 4);
      out.push_back(static_cast<char>(as_prefix().len));
      break;
    case Kind::kSymbol:
      // NUL-terminated keeps prefix-free ordering for names without NULs.
      out.append(as_symbol());
      out.push_back('\0');
      break;
    case Kind::kTuple:
      for (const Value& v : as_tuple()) {
        out.push_back(1);
        out.append(v.Encode());
      }
      out.push_back(0);
      break;
  }
  return out;
}

std::optional<uint32_t> ParseIpv4(std::string_view text) {
  std::vector<absl::string_view> parts =
      absl::StrSplit(absl::string_view(text.data(), text.size()), '.');
  if (parts.size() != 4) return std::nullopt;
  uint32_t addr = 0;
  for (absl::string_view part : parts) {
    unsigned octet = 0;
    auto [ptr, ec] =
        std::from_chars(part.data(), part.data() + part.size(), octet);
    if (ec != std::errc() || ptr != part.data() + part.size() || part.empty() ||
        octet > 255) {
      return std::nullopt;
    }
    addr = (addr << 8) | octet;
  }
  return addr;
}

std::string FormatIpv4(uint32_t addr) {
  return absl::StrCat((addr >> 24) & 0xff, ".", (addr >> 16) & 0xff, ".",
                      (addr >> 8) & 0xff, ".", addr & 0xff);
}

}  // namespace snapnet
