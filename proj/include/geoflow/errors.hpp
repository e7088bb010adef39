#pragma once

#include <stdexcept>
#include <string>

namespace geoflow {

// Errors are thrown as distinct types so callers and tests can match on the
// failure kind rather than on message strings.

struct DimensionMismatch : std::invalid_argument {
    explicit DimensionMismatch(const std::string& what) : std::invalid_argument(what) {}
};

struct NonSymmetric : std::invalid_argument {
    explicit NonSymmetric(const std::string& what) : std::invalid_argument(what) {}
};

struct EvaluationFailure : std::runtime_error {
    explicit EvaluationFailure(const std::string& what) : std::runtime_error(what) {}
};

// A vector carries mass outside the support of a boundary state, so the
// minimal-rank inner product / projection is undefined for it.
struct OutsideDomain : std::domain_error {
    explicit OutsideDomain(const std::string& what) : std::domain_error(what) {}
};

struct ZeroSalience : std::domain_error {
    explicit ZeroSalience(const std::string& what) : std::domain_error(what) {}
};

struct NonSteep : std::logic_error {
    explicit NonSteep(const std::string& what) : std::logic_error(what) {}
};

struct NotInterior : std::domain_error {
    explicit NotInterior(const std::string& what) : std::domain_error(what) {}
};

// A revision protocol was evaluated at payoffs violating its sign condition.
struct SignViolation : std::domain_error {
    explicit SignViolation(const std::string& what) : std::domain_error(what) {}
};

struct StepExplosion : std::runtime_error {
    explicit StepExplosion(const std::string& what) : std::runtime_error(what) {}
};

struct MissingPotential : std::logic_error {
    explicit MissingPotential(const std::string& what) : std::logic_error(what) {}
};

struct EnumerationImpossible : std::logic_error {
    explicit EnumerationImpossible(const std::string& what) : std::logic_error(what) {}
};

// Combinatorial enumeration (equilibrium supports, cone faces) refused
// because the instance is too large for exhaustive search.
struct DimensionalityLimit : std::length_error {
    explicit DimensionalityLimit(const std::string& what) : std::length_error(what) {}
};

// Scenario file failed validation; `field` names the offending JSON path.
struct ScenarioError : std::runtime_error {
    std::string field;
    ScenarioError(std::string field_, const std::string& what)
        : std::runtime_error("scenario field '" + field_ + "': " + what), field(std::move(field_)) {}
};

} // namespace geoflow
