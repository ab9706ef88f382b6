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

#include "mapsin/datagen.hpp"

#include <iterator>
#include <ostream>
#include <random>
#include <sstream>

#include "mapsin/errors.hpp"

namespace mapsin {

namespace {

constexpr const char* kAttributePredicates[] = {
    "http://example.org/attr/p0", "http://example.org/attr/p1", "http://example.org/attr/p2",
    "http://example.org/attr/p3", "http://example.org/attr/p4", "http://example.org/attr/p5",
};
constexpr const char* kLinkPredicates[] = {
    "http://example.org/link/l0",
    "http://example.org/link/l1",
    "http://example.org/link/l2",
    "http://example.org/link/l3",
};

std::string entity_iri(std::uint64_t i) {
    std::string digits = std::to_string(i);
    std::string padded(digits.size() < 6 ? 6 - digits.size() : 0, '0');
    return "http://example.org/ent/e" + padded + digits;
}

std::string class_iri(std::uint64_t i) { return "http://example.org/class/C" + std::to_string(i); }

}  // namespace

void GenConfig::validate() const {
    if (classes == 0) throw PreconditionError("classes must be at least 1");
    if (attributes_min > attributes_max)
        throw PreconditionError("attributes_min must not exceed attributes_max");
    if (links_min > links_max) throw PreconditionError("links_min must not exceed links_max");
    if (!(class_skew >= 0.0 && class_skew <= 1.0))
        throw PreconditionError("class_skew must lie in [0, 1]");
}

std::uint64_t generate(const GenConfig& config, std::ostream& out) {
    config.validate();
    // mt19937_64 output is pinned by the standard; reducing it with
    // modulo (instead of a distribution, whose mapping is
    // implementation-defined) keeps the stream identical everywhere.
    std::mt19937_64 rng(config.seed);
    auto pick = [&rng](std::uint64_t n) { return n == 0 ? 0 : rng() % n; };

    // class_skew compared against a fixed-resolution draw, not a double
    // multiply per entity, to keep rounding out of the stream.
    const std::uint64_t kResolution = 1'000'000;
    const auto skew_cut = static_cast<std::uint64_t>(config.class_skew * double(kResolution));

    std::uint64_t lines = 0;
    auto emit = [&](const std::string& s, const std::string& p, const std::string& o,
                    bool literal) {
        out << "<" << s << "> <" << p << "> ";
        if (literal)
            out << o;
        else
            out << "<" << o << ">";
        out << " .\n";
        ++lines;
    };

    for (std::uint64_t i = 0; i < config.entities; ++i) {
        std::string subject = entity_iri(i);

        std::uint64_t cls;
        if (config.classes == 1) {
            cls = 0;
        } else {
            bool skewed = pick(kResolution) < skew_cut;
            cls = skewed ? 0 : 1 + pick(config.classes - 1);
        }
        emit(subject, "rdf:type", class_iri(cls), false);

        std::uint32_t attrs =
            config.attributes_min + static_cast<std::uint32_t>(pick(config.attributes_max -
                                                                    config.attributes_min + 1));
        for (std::uint32_t a = 0; a < attrs; ++a) {
            const char* predicate = kAttributePredicates[pick(std::size(kAttributePredicates))];
            std::string value = "\"v" + std::to_string(pick(config.entities + 1)) + "\"";
            emit(subject, predicate, value, true);
        }

        std::uint32_t links = config.links_min + static_cast<std::uint32_t>(
                                                     pick(config.links_max - config.links_min + 1));
        for (std::uint32_t l = 0; l < links; ++l) {
            const char* predicate = kLinkPredicates[pick(std::size(kLinkPredicates))];
            std::string target = entity_iri(pick(config.entities));
            emit(subject, predicate, target, false);
        }
    }
    if (!out) throw IoError("failed to write generated triples");
    return lines;
}

std::string generate_to_string(const GenConfig& config) {
    std::ostringstream out;
    generate(config, out);
    return out.str();
}

}  // namespace mapsin
