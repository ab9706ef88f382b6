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

#include "mapsin/baseline.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "mapsin/planner.hpp"

namespace mapsin {

namespace {

// Key record size: variable names plus encoded terms, the payload a
// shuffle would move per record.
std::uint64_t record_bytes(const SolutionMapping& mapping) {
    std::uint64_t bytes = 0;
    for (const auto& [name, term] : mapping.bindings)
        bytes += name.size() + encode_term(term).size();
    return bytes;
}

std::string group_key(const SolutionMapping& mapping,
                      const std::vector<std::string>& join_variables) {
    std::string key;
    for (const std::string& var : join_variables) {
        if (const Term* term = mapping.find(var)) {
            key += encode_term(*term);  // NUL-free
        }
        key.push_back('\0');
    }
    return key;
}

MappingList project(const MappingList& mappings, const std::vector<std::string>& projection) {
    MappingList out;
    out.reserve(mappings.size());
    for (const SolutionMapping& mapping : mappings) {
        SolutionMapping projected;
        for (const std::string& var : projection) {
            if (const Term* term = mapping.find(var)) projected.bindings.emplace(var, *term);
        }
        out.push_back(std::move(projected));
    }
    return out;
}

}  // namespace

MappingList reduce_side_join(const MappingList& left, const MappingList& right,
                             const std::vector<std::string>& join_variables,
                             ShuffleStats& stats) {
    std::vector<std::string> vars = join_variables;
    std::sort(vars.begin(), vars.end());

    // Both full inputs are shuffled, whatever ends up joining.
    stats.records_shuffled += left.size() + right.size();
    for (const SolutionMapping& m : left) stats.bytes_shuffled += record_bytes(m);
    for (const SolutionMapping& m : right) stats.bytes_shuffled += record_bytes(m);

    struct Group {
        std::vector<const SolutionMapping*> left, right;
    };
    std::map<std::string, Group> groups;
    for (const SolutionMapping& m : left) groups[group_key(m, vars)].left.push_back(&m);
    for (const SolutionMapping& m : right) groups[group_key(m, vars)].right.push_back(&m);
    stats.reduce_groups += groups.size();

    MappingList out;
    for (const auto& [key, group] : groups) {
        for (const SolutionMapping* l : group.left) {
            for (const SolutionMapping* r : group.right) {
                if (compatible(*l, *r)) out.push_back(merge(*l, *r));
            }
        }
    }
    return out;
}

BaselineResult execute_reduce_side(const RdfStore& store, const BasicGraphPattern& query) {
    BaselineResult result;
    if (query.patterns.empty()) {
        result.mappings.push_back(SolutionMapping{});
        result.mappings = project(result.mappings, query.effective_projection());
        return result;
    }

    std::vector<TriplePattern> ordered = reorder(query.patterns);
    MappingList acc = store.lookup(ordered[0]);
    std::set<std::string> domain;
    for (const std::string& v : ordered[0].variables()) domain.insert(v);

    for (std::size_t i = 1; i < ordered.size(); ++i) {
        MappingList right = store.lookup(ordered[i]);
        std::vector<std::string> join_vars;
        for (const std::string& v : ordered[i].variables())
            if (domain.count(v)) join_vars.push_back(v);
        acc = reduce_side_join(acc, right, join_vars, result.stats);
        for (const std::string& v : ordered[i].variables()) domain.insert(v);
    }

    result.mappings = project(acc, query.effective_projection());
    return result;
}

MappingList oracle_evaluate(const BasicGraphPattern& query, const std::vector<Triple>& triples) {
    MappingList acc{SolutionMapping{}};
    for (const TriplePattern& pattern : query.patterns) {
        MappingList next;
        for (const SolutionMapping& mapping : acc) {
            for (const Triple& triple : triples) {
                if (auto m = match(pattern, triple)) {
                    if (compatible(mapping, *m)) next.push_back(merge(mapping, *m));
                }
            }
        }
        acc = std::move(next);
    }
    return project(acc, query.effective_projection());
}

}  // namespace mapsin
