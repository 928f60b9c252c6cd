// Copyright combo contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace combo {

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct SingularMatrix : Error {
  explicit SingularMatrix(const std::string& what = "singular matrix")
      : Error(what) {}
};

struct NotSymmetric : Error {
  explicit NotSymmetric(const std::string& what = "matrix not symmetric")
      : Error(what) {}
};

struct BadLambda : Error {
  explicit BadLambda(const std::string& what) : Error(what) {}
};

struct InadmissibleMacroState : Error {
  explicit InadmissibleMacroState(const std::string& what) : Error(what) {}
};

struct BadShapeSpec : Error {
  explicit BadShapeSpec(const std::string& what) : Error(what) {}
};

struct NonDividingFactor : Error {
  explicit NonDividingFactor(const std::string& what) : Error(what) {}
};

struct ZeroReference : Error {
  explicit ZeroReference(const std::string& what) : Error(what) {}
};

struct IOFailure : Error {
  explicit IOFailure(const std::string& what) : Error(what) {}
};

struct ConfigInvalid : Error {
  explicit ConfigInvalid(const std::string& what) : Error(what) {}
};

struct LoadPathFailed : Error {
  explicit LoadPathFailed(const std::string& what) : Error(what) {}
};

}  // namespace combo
