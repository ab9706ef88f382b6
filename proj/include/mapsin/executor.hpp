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

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "mapsin/planner.hpp"
#include "mapsin/rdf_store.hpp"
#include "mapsin/sparql.hpp"

namespace mapsin {

struct ExecStats {
    std::uint64_t stages_run = 0;
    std::uint64_t map_invocations = 0;  // input mappings processed across stages
    std::uint64_t get_requests = 0;
    std::uint64_t rows_scanned = 0;
    std::uint64_t cells_fetched = 0;
    std::uint64_t bytes_fetched = 0;
    std::uint64_t result_count = 0;
    // Substituted patterns that still needed a scan instead of a point
    // get (e.g. an unbound predicate with unbound subject and object).
    std::uint64_t scan_routed_substitutions = 0;
    std::uint64_t cartesian_stages = 0;
    std::vector<std::uint64_t> intermediate_mappings;  // after each stage
};

struct ExecOptions {
    unsigned workers = 1;
    // Mappings a partition may hold in memory between stages before the
    // surplus is written to a temporary file.
    std::size_t spill_threshold = std::size_t(1) << 22;
    std::filesystem::path spill_directory;  // empty: system temp directory
};

struct ExecResult {
    MappingList mappings;
    ExecStats stats;
};

// Runs execution plans against a store. Each stage maps every input
// mapping to its join results; the initial scan partitions work by region
// and partitions stay independent through all stages, so any worker count
// yields the same result multiset and the same meter readings.
class Executor {
  public:
    explicit Executor(const RdfStore& store, ExecOptions options = ExecOptions());

    ExecResult execute(const ExecutionPlan& plan) const;

    // One input mapping through one join step: substitutes the mapping
    // into the pattern, looks the substituted pattern up, and merges each
    // result back. No shared variable means the lookup ignores the input
    // and the merge is a cross product.
    MappingList map_mapsin(const SolutionMapping& mapping, const TriplePattern& pattern) const;

    // Joins one input mapping with several patterns: each pattern is
    // substituted with the *input* mapping, looked up separately, and the
    // per-pattern results are cross-merged. Returns empty as soon as one
    // pattern has no results at all.
    MappingList map_multiway(const SolutionMapping& mapping,
                             const std::vector<TriplePattern>& patterns) const;

    // Same contract as map_multiway for pattern groups sharing the row
    // position under join_variable, but served by a single row fetch.
    // Precondition: the mapping binds join_variable.
    MappingList map_multiway_optimized(const SolutionMapping& mapping,
                                       const std::vector<TriplePattern>& patterns,
                                       const std::string& join_variable) const;

    // Seed mappings for the pipeline, one list per store partition of the
    // pattern's table. Never issues gets.
    std::vector<MappingList> stage_initial_scan(const TriplePattern& pattern) const;

  private:
    void note_substituted_route(const TriplePattern& substituted) const;

    const RdfStore& store_;
    ExecOptions options_;
    mutable std::atomic<std::uint64_t> scan_routed_{0};
};

}  // namespace mapsin
