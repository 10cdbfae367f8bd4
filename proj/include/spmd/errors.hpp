#pragma once

#include <stdexcept>
#include <string>

namespace spmd {

/// Root of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Rank out of range, world size incompatible with a grid, self-addressed message.
class TopologyError : public Error {
public:
    using Error::Error;
};

/// The transport world was shut down, or a peer disconnected.
class TransportError : public Error {
public:
    using Error::Error;
};

/// Malformed payload or frame.
class CodecError : public Error {
public:
    using Error::Error;
};

class ShapeError : public Error {
public:
    using Error::Error;
};

/// Two sequences whose element i lives on different ranks.
class AlignmentError : public Error {
public:
    using Error::Error;
};

class IndexError : public Error {
public:
    using Error::Error;
};

class EmptySequenceError : public Error {
public:
    using Error::Error;
};

/// q does not divide n, or q < 1.
class DecompositionError : public Error {
public:
    using Error::Error;
};

/// A block is missing (or duplicated) when assembling a distributed result.
class AssemblyError : public Error {
public:
    using Error::Error;
};

/// Argument outside the domain of a cost-model formula.
class DomainError : public Error {
public:
    using Error::Error;
};

}  // namespace spmd
