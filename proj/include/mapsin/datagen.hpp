/*
 * Copyright (c) 2026 The mapsin authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or
 * implied. See the License for the specific language governing
 * permissions and limitations under the License.
 */

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

namespace mapsin {

// Synthetic graph generator: every entity gets one class-assignment
// triple, a few literal-valued attribute triples, and a few link triples
// to other entities. Output is byte-identical for equal configurations
// across platforms.
struct GenConfig {
    std::uint64_t seed = 1;
    std::uint64_t entities = 100;
    std::uint64_t classes = 5;
    std::uint32_t attributes_min = 2;
    std::uint32_t attributes_max = 4;
    std::uint32_t links_min = 1;
    std::uint32_t links_max = 3;
    // Probability that an entity lands in class 0; the remainder spreads
    // uniformly over the other classes. 1.0 puts every entity in one
    // class, the worst case for object-keyed storage.
    double class_skew = 0.5;

    void validate() const;  // throws PreconditionError
};

// Writes N-Triples lines and returns how many lines (triples, duplicates
// included) were written.
std::uint64_t generate(const GenConfig& config, std::ostream& out);

std::string generate_to_string(const GenConfig& config);

}  // namespace mapsin
