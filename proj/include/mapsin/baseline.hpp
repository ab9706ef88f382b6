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
#include <string>
#include <vector>

#include "mapsin/rdf_store.hpp"
#include "mapsin/sparql.hpp"

namespace mapsin {

// Cost model of a shuffle-based join: every input record crosses the
// network once, tagged by its join key, and the reducer sees one group
// per distinct key.
struct ShuffleStats {
    std::uint64_t records_shuffled = 0;
    std::uint64_t bytes_shuffled = 0;
    std::uint64_t reduce_groups = 0;
};

// Joins two mapping multisets the reduce-side way: both sides are
// shuffled in full, grouped by their value under join_variables, and
// merged pairwise within each group. An empty variable list sends
// everything to one group (a cross product). Inputs are expected to bind
// all join variables. Meters accumulate into stats.
MappingList reduce_side_join(const MappingList& left, const MappingList& right,
                             const std::vector<std::string>& join_variables,
                             ShuffleStats& stats);

struct BaselineResult {
    MappingList mappings;
    ShuffleStats stats;
};

// Evaluates a query as a chain of reduce-side joins over the same
// reordered patterns the map-side engine uses, so the shuffle meters are
// directly comparable to the map-side read meters.
BaselineResult execute_reduce_side(const RdfStore& store, const BasicGraphPattern& query);

// Reference evaluation straight from the definitions: match every
// pattern against every triple, keep compatible merges, project. Slow
// and obviously correct; the yardstick for everything else.
MappingList oracle_evaluate(const BasicGraphPattern& query, const std::vector<Triple>& triples);

}  // namespace mapsin
