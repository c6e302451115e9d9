#pragma once

#include <stdexcept>
#include <string>

namespace trajmine {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// --- ingestion ---
class EmptyInput : public Error {
public:
  using Error::Error;
};
class MixedScenes : public Error {
public:
  using Error::Error;
};
class NonContiguousTrack : public Error {
public:
  using Error::Error;
};
class NonPositiveDt : public Error {
public:
  using Error::Error;
};
class StepOutOfRange : public Error {
public:
  using Error::Error;
};

// --- geometry ---
class PointNotOnPolyline : public Error {
public:
  using Error::Error;
};
class NonPositiveBuffer : public Error {
public:
  using Error::Error;
};

// --- mtl ---
class SyntaxError : public Error {
public:
  SyntaxError(const std::string& msg, std::size_t position)
      : Error(msg + " (at position " + std::to_string(position) + ")"),
        pos(position) {}
  std::size_t pos;
};
class BadInterval : public Error {
public:
  using Error::Error;
};
class UnknownAtom : public Error {
public:
  using Error::Error;
};

// --- synth / stats / cli ---
class InvalidSpec : public Error {
public:
  using Error::Error;
};
class ZeroScenes : public Error {
public:
  using Error::Error;
};
class UnknownEventId : public Error {
public:
  using Error::Error;
};

/// Precondition breach on an internal contract (caller bug, not data).
class ContractViolation : public Error {
public:
  using Error::Error;
};

}  // namespace trajmine
