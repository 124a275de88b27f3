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


// JSON encodings of values, expressions and diagram pieces, used by the
// deployment bundle files.

#ifndef SNAPNET_CODEC_H_
#define SNAPNET_CODEC_H_

#include "nlohmann/json.hpp"
#include "snapnet/atoms.h"
#include "snapnet/ast.h"
#include "snapnet/interp.h"
#include "snapnet/value.h"

namespace snapnet {

// Decoders throw std::invalid_argument on malformed input.
nlohmann::json ValueToJson(const Value& v);
Value ValueFromJson(const nlohmann::json& j);

nlohmann::json ExprToJson(const Expr& e);
Expr ExprFromJson(const nlohmann::json& j);

nlohmann::json TestToJson(const TestAtom& t);
TestAtom TestFromJson(const nlohmann::json& j);

nlohmann::json WritesToJson(const WriteList& w);
WriteList WritesFromJson(const nlohmann::json& j);

nlohmann::json SeqToJson(const ActionSeq& s);
ActionSeq SeqFromJson(const nlohmann::json& j);

// {"field": value, ...}
nlohmann::json PacketToJson(const Packet& p);
Packet PacketFromJson(const nlohmann::json& j);

}  // namespace snapnet

#endif  // SNAPNET_CODEC_H_
