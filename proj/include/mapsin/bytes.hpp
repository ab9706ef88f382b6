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
#include <optional>
#include <string>

namespace mapsin {

// Arbitrary byte strings (may contain NUL). std::string keeps the byte-wise
// lexicographic ordering we need for row keys.
using Bytes = std::string;

// Smallest key strictly greater than every key with prefix `key` of the same
// length, i.e. the exclusive upper bound of the single-key range [key, key+0x00).
inline Bytes key_successor(Bytes key) {
    key.push_back('\0');
    return key;
}

// Exclusive upper bound of the set of keys starting with `prefix`, or nullopt
// when no finite bound exists (prefix is empty or all 0xff).
std::optional<Bytes> prefix_upper_bound(const Bytes& prefix);

std::string to_hex(const Bytes& data);
Bytes from_hex(const std::string& hex);  // throws CorruptFileError on bad input

// CRC-64/XZ over a buffer. Used as the integrity trailer of table files.
std::uint64_t crc64(const void* data, std::size_t size);

void put_u32_le(std::string& out, std::uint32_t v);
void put_u64_le(std::string& out, std::uint64_t v);
void put_u64_be(std::string& out, std::uint64_t v);
std::uint32_t get_u32_le(const unsigned char* p);
std::uint64_t get_u64_le(const unsigned char* p);
std::uint64_t get_u64_be(const unsigned char* p);

}  // namespace mapsin
