// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace stylodet {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad user input: missing paths, empty corpora, malformed config. CLI exit code 2.
class InputError : public Error {
 public:
  using Error::Error;
};

// Artifacts that cannot be used together (bundle vs grammar, model vs matrix
// width, index-map family). CLI exit code 3.
class ArtifactMismatch : public Error {
 public:
  using Error::Error;
};

}  // namespace stylodet
