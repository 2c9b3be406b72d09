#pragma once

#include <stdexcept>
#include <string>

namespace qatsp {

// Problem too large for an exact method's hard capacity bound.
struct capacity_error : std::runtime_error {
    explicit capacity_error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input file; the message names the offending field.
struct parse_error : std::runtime_error {
    explicit parse_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace qatsp
