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

#include "mapsin/planner.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "mapsin/errors.hpp"

namespace mapsin {

std::optional<PlanMode> parse_plan_mode(const std::string& text) {
    if (text == "cascade") return PlanMode::Cascade;
    if (text == "multiway") return PlanMode::Multiway;
    if (text == "multiway-unopt") return PlanMode::MultiwayUnoptimized;
    if (text == "auto") return PlanMode::Auto;
    return std::nullopt;
}

std::string to_string(PlanMode mode) {
    switch (mode) {
        case PlanMode::Cascade: return "cascade";
        case PlanMode::Multiway: return "multiway";
        case PlanMode::MultiwayUnoptimized: return "multiway-unopt";
        case PlanMode::Auto: return "auto";
    }
    return "?";
}

namespace {

// Sort class of the bound positions: a bound subject keys a point get on
// T_spo, a bound object one on T_ops, a bound predicate only narrows a
// scan, and an all-variable pattern scans everything.
int position_class(const TriplePattern& p) {
    if (is_term(p.subject)) return 0;
    if (is_term(p.object)) return 1;
    if (is_term(p.predicate)) return 2;
    return 3;
}

std::set<std::string> variable_set(const TriplePattern& p) {
    auto vars = p.variables();
    return {vars.begin(), vars.end()};
}

// Could one get of the row shared under `var` answer all `patterns`?
std::optional<RowSide> optimizable_side(const std::vector<TriplePattern>& patterns,
                                        const std::string& var, const RdfConfig& config) {
    auto is_var = [&](const PatternTerm& pt) {
        return is_variable(pt) && as_variable(pt).name == var;
    };
    bool subject_side = true, object_side = true;
    for (const TriplePattern& p : patterns) {
        subject_side = subject_side && is_var(p.subject);
        object_side = object_side && is_var(p.object);
    }
    if (!subject_side && !object_side) return std::nullopt;

    // The row is read once without a server-side filter, so the patterns
    // must be distinguishable by column: bound, pairwise distinct
    // predicates.
    std::vector<Term> predicates;
    for (const TriplePattern& p : patterns) {
        if (!is_term(p.predicate)) return std::nullopt;
        predicates.push_back(as_term(p.predicate));
    }
    std::sort(predicates.begin(), predicates.end());
    if (std::adjacent_find(predicates.begin(), predicates.end()) != predicates.end())
        return std::nullopt;

    if (subject_side) return RowSide::Subject;

    // Object side: class-assignment triples live in compound rows, not in
    // the row this lookup fetches.
    if (config.class_predicate) {
        for (const Term& p : predicates)
            if (p == *config.class_predicate) return std::nullopt;
    }
    return RowSide::Object;
}

}  // namespace

std::vector<TriplePattern> reorder(const std::vector<TriplePattern>& patterns) {
    std::vector<std::size_t> order(patterns.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        std::size_t va = patterns[a].variables().size();
        std::size_t vb = patterns[b].variables().size();
        if (va != vb) return va < vb;
        int ca = position_class(patterns[a]);
        int cb = position_class(patterns[b]);
        if (ca != cb) return ca < cb;
        return a < b;
    });
    std::vector<TriplePattern> out;
    out.reserve(patterns.size());
    for (std::size_t i : order) out.push_back(patterns[i]);
    return out;
}

std::vector<StarGroup> detect_star(const std::vector<TriplePattern>& ordered,
                                   const RdfConfig& config) {
    std::vector<StarGroup> groups;
    std::size_t i = 0;
    while (i < ordered.size()) {
        StarGroup group;
        group.patterns.push_back(ordered[i]);
        std::set<std::string> common = variable_set(ordered[i]);
        std::size_t j = i + 1;
        while (j < ordered.size() && !common.empty()) {
            std::set<std::string> vars = variable_set(ordered[j]);
            std::set<std::string> next;
            std::set_intersection(common.begin(), common.end(), vars.begin(), vars.end(),
                                  std::inserter(next, next.begin()));
            if (next.empty()) break;
            common = std::move(next);
            group.patterns.push_back(ordered[j]);
            ++j;
        }
        if (group.patterns.size() >= 2) {
            // Prefer a shared variable that makes the group optimizable;
            // fall back to the lexicographically first one.
            for (const std::string& var : common) {
                if (auto side = optimizable_side(group.patterns, var, config)) {
                    group.join_variable = var;
                    group.optimized = true;
                    group.side = *side;
                    break;
                }
            }
            if (!group.join_variable) group.join_variable = *common.begin();
        }
        groups.push_back(std::move(group));
        i = j;
    }
    return groups;
}

ExecutionPlan plan(const BasicGraphPattern& query, PlanMode mode, const RdfConfig& config) {
    ExecutionPlan out;
    out.mode = mode == PlanMode::Auto ? PlanMode::Multiway : mode;
    out.select_all = query.select_all;
    out.projection = query.effective_projection();
    if (query.patterns.empty()) return out;

    std::vector<TriplePattern> ordered = reorder(query.patterns);

    std::set<std::string> bound;  // variables bound after the stages so far
    auto push_stage = [&](Stage stage) {
        std::set<std::string> stage_vars;
        for (const TriplePattern& p : stage.patterns)
            for (const std::string& v : p.variables()) stage_vars.insert(v);
        if (stage.kind != Stage::Kind::InitialScan) {
            stage.cartesian = std::none_of(stage_vars.begin(), stage_vars.end(),
                                           [&](const std::string& v) { return bound.count(v); });
        }
        bound.insert(stage_vars.begin(), stage_vars.end());
        out.stages.push_back(std::move(stage));
    };

    auto push_multiway = [&](std::vector<TriplePattern> patterns, const std::string& join_var) {
        Stage stage;
        stage.kind = Stage::Kind::MultiwayJoin;
        stage.join_variable = join_var;
        // Re-derive the flag for the patterns this stage actually joins
        // (the group's scan pattern is not among them), and require the
        // join variable to be bound by the time the stage runs.
        stage.optimized = out.mode == PlanMode::Multiway && bound.count(join_var) &&
                          optimizable_side(patterns, join_var, config).has_value();
        stage.patterns = std::move(patterns);
        push_stage(std::move(stage));
    };

    if (out.mode == PlanMode::Cascade || ordered.size() == 1) {
        for (std::size_t i = 0; i < ordered.size(); ++i) {
            Stage stage;
            stage.kind = i == 0 ? Stage::Kind::InitialScan : Stage::Kind::MapsinJoin;
            stage.patterns = {ordered[i]};
            push_stage(std::move(stage));
        }
        return out;
    }

    std::vector<StarGroup> groups = detect_star(ordered, config);
    for (std::size_t g = 0; g < groups.size(); ++g) {
        StarGroup& group = groups[g];
        std::size_t first_pattern = 0;
        if (g == 0) {
            Stage stage;
            stage.kind = Stage::Kind::InitialScan;
            stage.patterns = {group.patterns[0]};
            push_stage(std::move(stage));
            first_pattern = 1;
        }
        std::vector<TriplePattern> rest(group.patterns.begin() +
                                            static_cast<std::ptrdiff_t>(first_pattern),
                                        group.patterns.end());
        if (rest.empty()) continue;
        if (rest.size() == 1) {
            Stage stage;
            stage.kind = Stage::Kind::MapsinJoin;
            stage.patterns = std::move(rest);
            push_stage(std::move(stage));
        } else {
            push_multiway(std::move(rest), *group.join_variable);
        }
    }
    return out;
}

std::string explain(const ExecutionPlan& plan, const RdfConfig& config) {
    std::ostringstream out;
    out << "mode: " << to_string(plan.mode) << "\n";
    out << "projection:";
    if (plan.select_all) out << " *";
    for (const std::string& v : plan.projection) out << " ?" << v;
    out << "\n";
    for (std::size_t i = 0; i < plan.stages.size(); ++i) {
        const Stage& stage = plan.stages[i];
        out << "stage " << i << ": ";
        switch (stage.kind) {
            case Stage::Kind::InitialScan: out << "initial-scan"; break;
            case Stage::Kind::MapsinJoin: out << "mapsin-join"; break;
            case Stage::Kind::MultiwayJoin:
                out << (stage.optimized ? "multiway-join[optimized]" : "multiway-join");
                break;
        }
        if (stage.join_variable) out << " on ?" << *stage.join_variable;
        if (stage.cartesian) out << " [cartesian]";
        for (const TriplePattern& pattern : stage.patterns) {
            out << "\n  " << to_string(pattern) << " via "
                << to_string(resolve_pattern(pattern, config));
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace mapsin
