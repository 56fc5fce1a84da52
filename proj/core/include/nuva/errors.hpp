// SPDX-License-Identifier: Apache-2.0
#ifndef NUVA_ERRORS_HPP
#define NUVA_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace nuva {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// File system errors: a path that cannot be opened or written.
class FileError : public Error { public: using Error::Error; };

// Audio container errors.
class MalformedWav : public Error { public: using Error::Error; };
class UnsupportedEncoding : public Error { public: using Error::Error; };
class UnsupportedRate : public Error { public: using Error::Error; };

// Manifest errors.
class SchemaMismatch : public Error { public: using Error::Error; };
class DuplicateKey : public Error { public: using Error::Error; };
class UnknownCategory : public Error { public: using Error::Error; };

// Binary container errors.
class BadMagic : public Error { public: using Error::Error; };
class ShapeMismatch : public Error { public: using Error::Error; };
class NonFiniteWeight : public Error { public: using Error::Error; };

// Front end errors.
class EmptyOutput : public Error { public: using Error::Error; };

// Model and synthesis errors.
class ModelDimensionError : public Error { public: using Error::Error; };
class InvalidPeak : public Error { public: using Error::Error; };
class IndexOutOfRange : public Error { public: using Error::Error; };

// Matcher errors.
class DimensionMismatch : public Error { public: using Error::Error; };
class EmptySequence : public Error { public: using Error::Error; };
class EmptyList : public Error { public: using Error::Error; };
class InvalidThreshold : public Error { public: using Error::Error; };
class MissingTemplate : public Error { public: using Error::Error; };

// Calibration errors.
class EmptyAttempts : public Error { public: using Error::Error; };
class MissingPatientData : public Error { public: using Error::Error; };
class SingleClass : public Error { public: using Error::Error; };
class TooFewAttempts : public Error { public: using Error::Error; };

// Statistics errors.
class LengthMismatch : public Error { public: using Error::Error; };
class ZeroStdErr : public Error { public: using Error::Error; };

// Command line errors.
class UsageError : public Error { public: using Error::Error; };

} // namespace nuva

#endif
