/*
 * Copyright 2026 The GRM Authors.
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

#ifndef GRM_TEXT_PORTER_STEMMER_HPP_
#define GRM_TEXT_PORTER_STEMMER_HPP_

#include <string>
#include <string_view>

namespace grm::text {

// Porter (1980) suffix-stripping stemmer, following the reference C
// implementation including its two documented departures ("bli" -> "ble"
// and "logi" -> "log" in step 2). Input is expected to be lowercase ASCII;
// words of length <= 2 are returned unchanged.
std::string porter_stem(std::string_view word);

}  // namespace grm::text

#endif  // GRM_TEXT_PORTER_STEMMER_HPP_
