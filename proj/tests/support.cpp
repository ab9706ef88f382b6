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

#include "support.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>

namespace mapsin::test {

TempDir::TempDir() {
    static std::atomic<std::uint64_t> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("mapsin-test-" + std::to_string(::getpid()) + "-" +
             std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
}

SolutionMapping mapping(std::initializer_list<std::pair<std::string, Term>> bindings) {
    SolutionMapping m;
    for (const auto& [name, term] : bindings) m.bindings.emplace(name, term);
    return m;
}

std::vector<Triple> sample_graph() {
    Term article1 = iri("Article1");
    Term article2 = iri("Article2");
    Term title = iri("title");
    Term year = iri("year");
    Term author = iri("author");
    Term cite = iri("cite");
    Term alex = iri("Alex");
    Term martin = iri("Martin");
    return {
        {article1, title, lit("\"PigSPARQL\"")},
        {article1, year, lit("\"2011\"")},
        {article1, author, alex},
        {article1, author, martin},
        {article2, title, lit("\"RDFPath\"")},
        {article2, year, lit("\"2011\"")},
        {article2, author, martin},
        {article2, author, alex},
        {article2, cite, article1},
    };
}

void load_sample_graph(RdfStore& store) {
    for (const Triple& t : sample_graph()) store.store_triple(t);
}

std::vector<std::string> canonical_rows(const MappingList& mappings) {
    std::vector<std::string> rows;
    rows.reserve(mappings.size());
    for (const SolutionMapping& m : mappings) rows.push_back(canonical_key(m));
    std::sort(rows.begin(), rows.end());
    return rows;
}

}  // namespace mapsin::test
