#pragma once

#include <stdexcept>
#include <string>

namespace fpgate {

// Base error; `code()` is the stable machine-readable name that the CLI
// and the event log emit.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& msg)
      : std::runtime_error(code + ": " + msg), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

#define FPGATE_DEFINE_ERROR(Name)                         \
  class Name : public Error {                             \
   public:                                                \
    explicit Name(const std::string& msg)                 \
        : Error(#Name, msg) {}                            \
  }

// imaging
FPGATE_DEFINE_ERROR(BadMagic);
FPGATE_DEFINE_ERROR(UnsupportedDepth);
FPGATE_DEFINE_ERROR(Truncated);
FPGATE_DEFINE_ERROR(BadDimensions);

// surface3d
FPGATE_DEFINE_ERROR(EmptyForeground);

// wavelets / matcher
FPGATE_DEFINE_ERROR(ShapeMismatch);

// store
FPGATE_DEFINE_ERROR(DuplicateId);
FPGATE_DEFINE_ERROR(UnknownId);
FPGATE_DEFINE_ERROR(CorruptLayout);
FPGATE_DEFINE_ERROR(IoFailure);

// telemetry
FPGATE_DEFINE_ERROR(OutOfOrderEvent);

// evaluation
FPGATE_DEFINE_ERROR(InsufficientData);

// cli
FPGATE_DEFINE_ERROR(EmptyGallery);

#undef FPGATE_DEFINE_ERROR

}  // namespace fpgate
