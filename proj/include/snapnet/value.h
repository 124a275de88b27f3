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

#ifndef SNAPNET_VALUE_H_
#define SNAPNET_VALUE_H_

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace snapnet {

struct Ipv4 {
  uint32_t addr = 0;
  friend auto operator<=>(const Ipv4&, const Ipv4&) = default;
};

// An IPv4 prefix. Host bits below the mask are always zero.
struct Prefix {
  uint32_t addr = 0;
  int len = 0;
  friend auto operator<=>(const Prefix&, const Prefix&) = default;

  bool Contains(uint32_t ip) const;
  bool Contains(const Prefix& other) const;
  bool Disjoint(const Prefix& other) const;
};

struct Symbol {
  std::string name;
  friend auto operator<=>(const Symbol&, const Symbol&) = default;
};

// A value carried by packet fields, expressions and state cells.
//
// Values are totally ordered: first by kind (in the order of `Kind`), then by
// content. Tuples compare element-wise, shorter tuples first on a common
// prefix.
class Value {
 public:
  enum class Kind { kInt = 0, kBool, kIp, kPrefix, kSymbol, kTuple };

  Value() : rep_(int64_t{0}) {}
  static Value Int(int64_t v) { return Value(Rep(v)); }
  static Value Bool(bool v) { return Value(Rep(v)); }
  static Value Ip(uint32_t addr) { return Value(Rep(Ipv4{addr})); }
  // Masks off host bits. `len` must be in [0, 32].
  static Value MakePrefix(uint32_t addr, int len);
  static Value Sym(std::string name) { return Value(Rep(Symbol{std::move(name)})); }
  static Value Tuple(std::vector<Value> elems);

  Kind kind() const { return static_cast<Kind>(rep_.index()); }
  bool is_int() const { return kind() == Kind::kInt; }
  bool is_bool() const { return kind() == Kind::kBool; }
  bool is_ip() const { return kind() == Kind::kIp; }
  bool is_prefix() const { return kind() == Kind::kPrefix; }
  bool is_symbol() const { return kind() == Kind::kSymbol; }
  bool is_tuple() const { return kind() == Kind::kTuple; }

  int64_t as_int() const { return std::get<int64_t>(rep_); }
  bool as_bool() const { return std::get<bool>(rep_); }
  uint32_t as_ip() const { return std::get<Ipv4>(rep_).addr; }
  const Prefix& as_prefix() const { return std::get<Prefix>(rep_); }
  const std::string& as_symbol() const { return std::get<Symbol>(rep_).name; }
  const std::vector<Value>& as_tuple() const {
    return std::get<std::vector<Value>>(rep_);
  }

  // True if a packet field holding `*this` passes the test `f = pattern`:
  // equality, or containment when `pattern` is a prefix.
  bool Matches(const Value& pattern) const;

  // Concrete syntax accepted by the policy parser.
  std::string ToString() const;

  // Deterministic byte encoding; lexicographic order on encodings agrees
  // with `operator<=>`.
  std::string Encode() const;

  friend bool operator==(const Value& a, const Value& b) {
    return Compare(a, b) == 0;
  }
  friend std::strong_ordering operator<=>(const Value& a, const Value& b) {
    int c = Compare(a, b);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater
                          : std::strong_ordering::equal);
  }

  template <typename H>
  friend H AbslHashValue(H h, const Value& v) {
    return H::combine(std::move(h), v.Encode());
  }

 private:
  using Rep = std::variant<int64_t, bool, Ipv4, Prefix, Symbol,
                           std::vector<Value>>;
  explicit Value(Rep rep) : rep_(std::move(rep)) {}
  static int Compare(const Value& a, const Value& b);

  Rep rep_;
};

// Parses `a.b.c.d`. Returns nullopt on malformed input.
std::optional<uint32_t> ParseIpv4(std::string_view text);
std::string FormatIpv4(uint32_t addr);

}  // namespace snapnet

#endif  // SNAPNET_VALUE_H_
