#pragma once

#include <stdexcept>
#include <string>

namespace dyadic {

// Base for everything this library throws on purpose.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed textual or structural input (bad word characters, bad rational
// syntax, ill-formed tables). CLI maps this to exit code 2.
struct ParseError : Error {
    explicit ParseError(const std::string& what) : Error(what) {}
};

// A precondition or mathematical obstruction, with a certificate in the
// message. CLI maps this to exit code 1.
struct DomainError : Error {
    explicit DomainError(const std::string& what) : Error(what) {}
};

// The specific refusal for exact transport between sets of different kraft
// sum at lambda = 1/2: there the product measure is preserved by every
// admissible map, so no approximation budget can help.
struct ObstructionError : DomainError {
    explicit ObstructionError(const std::string& what) : DomainError(what) {}
};

} // namespace dyadic
