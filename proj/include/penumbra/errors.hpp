/*
 * Copyright 2026 The Penumbra Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace penumbra {

/// Every failure mode the library reports, one code per contract breach.
enum class Errc {
  SchemaMismatch,
  DuplicateSystemId,
  NonFiniteFeature,
  ProvenanceViolation,
  BoundsViolation,
  ArityMismatch,
  EmptyClearSet,
  UnknownSystem,
  DegenerateInterval,
  NonZeroFloor,
  LandmarkMismatch,
  PreconditionUnmet,
  UnfaithfulFramework,
  InvalidGeneratorConfig,
  ParseError,
  HeaderMismatch,
  UnknownField,
  InvalidMetric,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::SchemaMismatch: return "SchemaMismatch";
    case Errc::DuplicateSystemId: return "DuplicateSystemId";
    case Errc::NonFiniteFeature: return "NonFiniteFeature";
    case Errc::ProvenanceViolation: return "ProvenanceViolation";
    case Errc::BoundsViolation: return "BoundsViolation";
    case Errc::ArityMismatch: return "ArityMismatch";
    case Errc::EmptyClearSet: return "EmptyClearSet";
    case Errc::UnknownSystem: return "UnknownSystem";
    case Errc::DegenerateInterval: return "DegenerateInterval";
    case Errc::NonZeroFloor: return "NonZeroFloor";
    case Errc::LandmarkMismatch: return "LandmarkMismatch";
    case Errc::PreconditionUnmet: return "PreconditionUnmet";
    case Errc::UnfaithfulFramework: return "UnfaithfulFramework";
    case Errc::InvalidGeneratorConfig: return "InvalidGeneratorConfig";
    case Errc::ParseError: return "ParseError";
    case Errc::HeaderMismatch: return "HeaderMismatch";
    case Errc::UnknownField: return "UnknownField";
    case Errc::InvalidMetric: return "InvalidMetric";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace penumbra
