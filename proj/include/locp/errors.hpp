#pragma once

#include <stdexcept>
#include <string>

namespace locp {

/// Malformed input: bad shapes, bad levels, schema violations. CLI exit 2.
struct SpecError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LevelError : SpecError {
  explicit LevelError(const std::string& what) : SpecError(what) {}
};

/// Operands built over different algebras / domains / shapes.
struct MismatchError : SpecError {
  explicit MismatchError(const std::string& what) : SpecError(what) {}
};

struct IoError : SpecError {
  explicit IoError(const std::string& what) : SpecError(what) {}
};

/// Numerically detected failure of a mathematical contract. CLI exit 1.
struct MathError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Matrix leaks across the flag: not a member of the operator algebra.
struct NotInFlagAlgebraError : MathError {
  int level;
  NotInFlagAlgebraError(int level_, const std::string& what)
      : MathError(what), level(level_) {}
};

/// Gram matrix not PSD within tolerance.
struct NotAdmissibleError : MathError {
  explicit NotAdmissibleError(const std::string& what) : MathError(what) {}
};

/// Representation lift is not well defined; names the slot and basis index.
struct ConstructionError : MathError {
  int slot;
  int basis_index;
  ConstructionError(int slot_, int basis_index_, const std::string& what)
      : MathError(what), slot(slot_), basis_index(basis_index_) {}
};

/// Required domination does not hold.
struct OrderError : MathError {
  explicit OrderError(const std::string& what) : MathError(what) {}
};

/// Inputs are mutually inconsistent (e.g. triples of different maps).
struct InconsistencyError : MathError {
  explicit InconsistencyError(const std::string& what) : MathError(what) {}
};

struct NotInCommutantError : MathError {
  explicit NotInCommutantError(const std::string& what) : MathError(what) {}
};

/// Operation precondition violated in a mathematically meaningful way
/// (e.g. non-minimal triple where a minimal one is required).
struct PreconditionError : MathError {
  explicit PreconditionError(const std::string& what) : MathError(what) {}
};

}  // namespace locp
