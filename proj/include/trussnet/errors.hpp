#pragma once

#include <stdexcept>
#include <string>

namespace trussnet {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// input problems: bad documents, invalid structures, bad arguments
class InputError : public Error {
public:
    using Error::Error;
};

class ParseError : public InputError {
public:
    using InputError::InputError;
};

class ValidationError : public InputError {
public:
    ValidationError(std::string entity, const std::string& what)
        : InputError(what), entity_(std::move(entity)) {}
    const std::string& entity() const { return entity_; }

private:
    std::string entity_;
};

class DimensionMismatch : public InputError {
public:
    using InputError::InputError;
};

// numerical failures
class NumericalError : public Error {
public:
    using Error::Error;
};

class PoleProximity : public NumericalError {
public:
    PoleProximity(std::string rod, long order, double omega)
        : NumericalError("omega = " + std::to_string(omega) + " is within the pole guard of rod " +
                         rod + " resonance n = " + std::to_string(order)),
          rod_(std::move(rod)), order_(order) {}
    const std::string& rod() const { return rod_; }
    long order() const { return order_; }

private:
    std::string rod_;
    long order_;
};

class SingularAtFrequency : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class NotARoot : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class DegenerateJoint : public NumericalError {
public:
    explicit DegenerateJoint(std::string joint)
        : NumericalError("rods at joint " + joint + " do not span the ambient dimension"),
          joint_(std::move(joint)) {}
    const std::string& joint() const { return joint_; }

private:
    std::string joint_;
};

class EventExplosion : public NumericalError {
public:
    using NumericalError::NumericalError;
};

} // namespace trussnet
