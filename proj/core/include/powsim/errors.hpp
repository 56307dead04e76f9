#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace powsim {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad arguments to an operation (parameter domain violations).
struct InvalidArgument : Error {
    using Error::Error;
};

// Graph metric requested on a disconnected (sub)graph; carries the components.
struct DisconnectedGraph : Error {
    DisconnectedGraph(std::string msg, std::vector<std::vector<std::uint32_t>> comps)
        : Error(std::move(msg)), components(std::move(comps)) {}
    std::vector<std::vector<std::uint32_t>> components;
};

// Vertex cut requested for adjacent endpoints (undefined).
struct AdjacentVertices : Error {
    using Error::Error;
};

// Regression input that cannot support a fit.
struct DegenerateData : Error {
    using Error::Error;
};

// Operation applied to a node of the wrong class.
struct WrongNodeClass : Error {
    using Error::Error;
};

// Config file or schema violation (CLI exit status 2).
struct ConfigError : Error {
    using Error::Error;
};

// Acceptance criteria evaluated against a bundle of the wrong experiment kind.
struct MismatchedKind : Error {
    using Error::Error;
};

} // namespace powsim
