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

#include <optional>
#include <string>
#include <vector>

#include "mapsin/rdf_store.hpp"
#include "mapsin/sparql.hpp"

namespace mapsin {

enum class PlanMode {
    Cascade,              // one join stage per pattern
    Multiway,             // star groups joined in one stage, optimized when possible
    MultiwayUnoptimized,  // star groups, but one lookup per member pattern
    Auto,                 // alias for Multiway
};

std::optional<PlanMode> parse_plan_mode(const std::string& text);
std::string to_string(PlanMode mode);

enum class RowSide { Subject, Object };

// A maximal run of consecutive patterns sharing one variable.
struct StarGroup {
    std::vector<TriplePattern> patterns;
    std::optional<std::string> join_variable;  // set for groups of two or more
    bool optimized = false;  // single-row fetch can serve the whole group
    RowSide side = RowSide::Subject;

    bool operator==(const StarGroup&) const = default;
};

// Orders patterns by estimated selectivity: fewer distinct variables
// first, then bound subject before bound object before bound predicate
// only before nothing bound, keeping the original order within ties.
std::vector<TriplePattern> reorder(const std::vector<TriplePattern>& patterns);

// Greedily groups consecutive ordered patterns while they still share at
// least one common variable. A group is optimized when one shared
// variable occupies the same row position (all subjects or all objects)
// in every member, the member predicates are bound and pairwise distinct,
// and no object-side member is a class-assignment pattern; the shared row
// then holds every candidate triple of the group.
std::vector<StarGroup> detect_star(const std::vector<TriplePattern>& ordered,
                                   const RdfConfig& config);

struct Stage {
    enum class Kind {
        InitialScan,   // table scan feeding the pipeline
        MapsinJoin,    // one lookup per input mapping
        MultiwayJoin,  // several patterns joined per input mapping
    };

    Kind kind = Kind::InitialScan;
    std::vector<TriplePattern> patterns;       // exactly one unless MultiwayJoin
    std::optional<std::string> join_variable;  // MultiwayJoin only
    bool optimized = false;                    // MultiwayJoin only
    // No variable shared with the mappings piped in: every lookup is
    // independent of its input and the stage degenerates to a cross
    // product.
    bool cartesian = false;

    bool operator==(const Stage&) const = default;
};

struct ExecutionPlan {
    PlanMode mode = PlanMode::Multiway;
    std::vector<Stage> stages;
    bool select_all = false;
    std::vector<std::string> projection;  // resolved, also for SELECT *

    bool operator==(const ExecutionPlan&) const = default;
};

// Builds the stage pipeline for a query. Cascade mode emits one join
// stage per pattern after the initial scan; multiway modes fuse each star
// group into one stage. The optimized flag is granted per stage, only in
// Multiway/Auto mode, and only when the join variable is bound by the
// time the stage runs.
ExecutionPlan plan(const BasicGraphPattern& query, PlanMode mode, const RdfConfig& config);

// Human-readable plan, one line per stage, with the access path each
// pattern would use before substitution.
std::string explain(const ExecutionPlan& plan, const RdfConfig& config);

}  // namespace mapsin
