#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace molforge {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define MOLFORGE_DEFINE_ERROR(Name)    \
  class Name : public Error {          \
   public:                             \
    using Error::Error;                \
  }

// molgraph
MOLFORGE_DEFINE_ERROR(ValenceViolation);
MOLFORGE_DEFINE_ERROR(SelfBond);
MOLFORGE_DEFINE_ERROR(IndexOutOfRange);
MOLFORGE_DEFINE_ERROR(DisconnectedMolecule);

// actions
MOLFORGE_DEFINE_ERROR(TerminalState);
MOLFORGE_DEFINE_ERROR(ForeignAction);

// fingerprint / properties / rewards
MOLFORGE_DEFINE_ERROR(LengthMismatch);
MOLFORGE_DEFINE_ERROR(UncoveredAtomType);
MOLFORGE_DEFINE_ERROR(UnknownProperty);
MOLFORGE_DEFINE_ERROR(DivisionByZero);

// qlearn
MOLFORGE_DEFINE_ERROR(DimensionMismatch);
MOLFORGE_DEFINE_ERROR(HeadOutOfRange);
MOLFORGE_DEFINE_ERROR(EmptyActionSet);
MOLFORGE_DEFINE_ERROR(InsufficientData);
MOLFORGE_DEFINE_ERROR(ArchitectureMismatch);
MOLFORGE_DEFINE_ERROR(IoError);
MOLFORGE_DEFINE_ERROR(VersionMismatch);
MOLFORGE_DEFINE_ERROR(CorruptCheckpoint);

// configuration values outside their declared ranges
MOLFORGE_DEFINE_ERROR(ConfigError);

#undef MOLFORGE_DEFINE_ERROR

/// Raised by the SMILES reader; carries the byte offset of the offending token.
class ParseError : public Error {
 public:
  ParseError(std::size_t position, const std::string& message)
      : Error(message + " (at position " + std::to_string(position) + ")"),
        position_(position),
        message_(message) {}

  std::size_t position() const noexcept { return position_; }
  const std::string& message() const noexcept { return message_; }

 private:
  std::size_t position_;
  std::string message_;
};

}  // namespace molforge
