#pragma once

#include <stdexcept>
#include <string>

namespace slngeo {

/// Thrown when a value fails one of its declared type invariants; the
/// message names the violated invariant so the CLI can surface it verbatim.
class InvariantError : public std::runtime_error {
public:
    explicit InvariantError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace slngeo
