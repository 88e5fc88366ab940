#pragma once

#include <stdexcept>
#include <string>

namespace kgscatter {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// special functions
class PoleError : public Error {
    using Error::Error;
};
class CPoleError : public Error {
    using Error::Error;
};
class NoConvergence : public Error {
    using Error::Error;
};
class DegenerateTransform : public Error {
    using Error::Error;
};

// potential
class BadRange : public Error {
    using Error::Error;
};

// scattering
class SubBarrierEnergy : public Error {
    using Error::Error;
};
class SingularMatching : public Error {
    using Error::Error;
};

// bound states
class OutOfWell : public Error {
    using Error::Error;
};
class RootLost : public Error {
    using Error::Error;
};

// direct integration
class StepLimit : public Error {
    using Error::Error;
};
class BoxTooSmall : public Error {
    using Error::Error;
};

}  // namespace kgscatter
