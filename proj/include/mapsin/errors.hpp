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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mapsin {

// Base class for every error raised by this library. CLI maps subclasses
// to exit codes, so new error types should derive from one of these.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// A table name was used that has not been created.
struct UnknownTableError : Error {
    explicit UnknownTableError(const std::string& table)
        : Error("unknown table: " + table) {}
};

// A scan was requested with end < start.
struct InvertedRangeError : Error {
    InvertedRangeError() : Error("scan range is inverted (end < start)") {}
};

// Filesystem-level failure (unreadable file, unwritable directory, ...).
struct IoError : Error {
    explicit IoError(const std::string& msg) : Error(msg) {}
};

// A persisted file failed structural or checksum validation.
struct CorruptFileError : Error {
    explicit CorruptFileError(const std::string& msg)
        : Error("corrupt store file: " + msg) {}
};

// A byte string in a cell is not a valid term encoding.
struct MalformedEncodingError : Error {
    explicit MalformedEncodingError(const std::string& msg)
        : Error("malformed term encoding: " + msg) {}
};

// merge() was called on mappings that disagree on a shared variable.
struct IncompatibleMappingsError : Error {
    explicit IncompatibleMappingsError(const std::string& var)
        : Error("cannot merge: mappings disagree on ?" + var) {}
};

// An operation's documented precondition was violated by the caller.
struct PreconditionError : Error {
    explicit PreconditionError(const std::string& msg) : Error(msg) {}
};

// Query text failed to parse; line/column are 1-based.
struct SyntaxError : Error {
    SyntaxError(const std::string& msg, std::size_t line, std::size_t column)
        : Error("syntax error at " + std::to_string(line) + ":" +
                std::to_string(column) + ": " + msg),
          line(line),
          column(column) {}
    std::size_t line;
    std::size_t column;
};

// Query uses a recognized SPARQL feature outside the supported subset.
struct UnsupportedConstructError : Error {
    explicit UnsupportedConstructError(const std::string& construct)
        : Error("unsupported construct: " + construct), construct(construct) {}
    std::string construct;
};

}  // namespace mapsin
