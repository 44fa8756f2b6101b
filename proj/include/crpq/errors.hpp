#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace crpq {

// Malformed input text (query, graph, regex, PCP instance).
struct parse_error : std::runtime_error {
    std::size_t pos;
    parse_error(const std::string& msg, std::size_t at)
        : std::runtime_error(msg + " (at offset " + std::to_string(at) + ")"), pos(at) {}
};

// A precondition on values was violated (wrong query class, arity mismatch, ...).
struct domain_error : std::runtime_error {
    explicit domain_error(const std::string& msg) : std::runtime_error(msg) {}
};

// A configurable resource cap was exceeded (disjunct cap, search budget, ...).
struct resource_error : std::runtime_error {
    explicit resource_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace crpq
