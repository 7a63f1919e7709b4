#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace covctl {

// Base class for every error raised by the library.
class CoverageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DuplicateGenerators : public CoverageError {
public:
    DuplicateGenerators(std::size_t i, std::size_t j)
        : CoverageError("duplicate generators: agents " + std::to_string(i) + " and " +
                        std::to_string(j) + " coincide"),
          first(i), second(j) {}
    std::size_t first;
    std::size_t second;
};

class DegenerateTriangle : public CoverageError {
public:
    DegenerateTriangle() : CoverageError("degenerate triangle: generators are collinear") {}
};

class EmptyRegion : public CoverageError {
public:
    EmptyRegion() : CoverageError("empty region") {}
};

class ZeroMass : public CoverageError {
public:
    explicit ZeroMass(double mass)
        : CoverageError("cell mass " + std::to_string(mass) + " below threshold"), mass(mass) {}
    double mass;
};

class PartitionMismatch : public CoverageError {
public:
    PartitionMismatch(std::size_t cells, std::size_t agents)
        : CoverageError("partition has " + std::to_string(cells) + " cells for " +
                        std::to_string(agents) + " agents") {}
};

// Raised when a configuration map violates the Lloyd-variant properties.
class PropertyViolation : public CoverageError {
public:
    PropertyViolation(char property, std::size_t agent, std::size_t iteration)
        : CoverageError(std::string("property (") + property + ") violated by agent " +
                        std::to_string(agent) + " at iteration " + std::to_string(iteration)),
          property(property), agent(agent), iteration(iteration) {}
    char property;
    std::size_t agent;
    std::size_t iteration;
};

class ControllerContractViolation : public CoverageError {
public:
    ControllerContractViolation(std::size_t vehicle, double before, double after)
        : CoverageError("vehicle " + std::to_string(vehicle) +
                        " did not approach its target: " + std::to_string(before) + " -> " +
                        std::to_string(after)),
          vehicle(vehicle) {}
    std::size_t vehicle;
};

class NonTermination : public CoverageError {
public:
    explicit NonTermination(std::size_t agent)
        : CoverageError("radius adjustment did not terminate for agent " +
                        std::to_string(agent)) {}
};

class FairnessViolation : public CoverageError {
public:
    FairnessViolation(std::size_t agent, const std::string& thread)
        : CoverageError("agent " + std::to_string(agent) + " starved its " + thread +
                        " thread") {}
};

class ParseError : public CoverageError {
public:
    ParseError(std::size_t line, const std::string& what)
        : CoverageError("line " + std::to_string(line) + ": " + what), line(line) {}
    std::size_t line;
};

class ValidationError : public CoverageError {
public:
    using CoverageError::CoverageError;
};

}  // namespace covctl
