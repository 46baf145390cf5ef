// Copyright 2026 The corpusalign Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CORPUSALIGN_UNICODE_H_
#define CORPUSALIGN_UNICODE_H_

#include <string>
#include <string_view>

namespace corpusalign {

// All character counts in the library are Unicode scalar values. Text is
// exchanged as UTF-8 and converted at module boundaries.

// Throws ValidationError on ill-formed UTF-8.
std::u32string DecodeUtf8(std::string_view utf8);
std::string EncodeUtf8(std::u32string_view text);

// Number of scalar values in well-formed UTF-8.
std::size_t CountScalars(std::string_view utf8);

}  // namespace corpusalign

#endif  // CORPUSALIGN_UNICODE_H_
