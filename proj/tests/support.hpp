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

#include <filesystem>
#include <string>
#include <vector>

#include "mapsin/rdf_store.hpp"
#include "mapsin/sparql.hpp"
#include "mapsin/term.hpp"

namespace mapsin::test {

// Unique directory under the system temp dir, removed on destruction.
class TempDir {
  public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

  private:
    std::filesystem::path path_;
};

inline Term iri(std::string s) { return Term::iri(std::move(s)); }
inline Term lit(std::string quoted) { return Term::literal(std::move(quoted)); }
inline PatternTerm var(std::string name) { return Variable{std::move(name)}; }

SolutionMapping mapping(std::initializer_list<std::pair<std::string, Term>> bindings);

// Small bibliographic graph used across suites: two articles with title,
// year, and authors, one citing the other. Nine triples.
std::vector<Triple> sample_graph();
void load_sample_graph(RdfStore& store);

// Sorted canonical keys, handy for comparing mapping multisets in asserts.
std::vector<std::string> canonical_rows(const MappingList& mappings);

}  // namespace mapsin::test
