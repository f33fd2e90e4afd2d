#pragma once

#include <stdexcept>
#include <string>

namespace scramble {

/// Base class for every error raised by the library. The CLI maps these to
/// exit code 2 (data error).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Zero or otherwise unusable block/image dimensions.
class InvalidGeometry : public Error {
 public:
  using Error::Error;
};

/// Dimensions that do not line up (non-divisible image, block count or
/// shape mismatch, wrong composite stacking axis).
class GeometryMismatch : public Error {
 public:
  using Error::Error;
};

/// Wrong channel count or bit depth for the requested operation.
class FormatError : public Error {
 public:
  using Error::Error;
};

class KeyFormatError : public Error {
 public:
  using Error::Error;
};

class CodecError : public Error {
 public:
  using Error::Error;
};

/// Upload exceeds the provider resolution cap and downscaling is disabled.
class SizeCapError : public Error {
 public:
  using Error::Error;
};

class MetadataError : public Error {
 public:
  using Error::Error;
};

}  // namespace scramble
