// Copyright 2026 The macast Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MACAST_ERRORS_HPP_
#define MACAST_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace macast {

// Placement index out of range, duplicated, or of the wrong cardinality.
class InvalidPlacement : public std::invalid_argument {
 public:
  explicit InvalidPlacement(const std::string& what) : std::invalid_argument(what) {}
};

// Channel or beamformer vectors whose lengths disagree.
class DimensionMismatch : public std::invalid_argument {
 public:
  explicit DimensionMismatch(const std::string& what) : std::invalid_argument(what) {}
};

// Every user channel is identically zero, so no direction can be formed.
class ZeroChannel : public std::domain_error {
 public:
  explicit ZeroChannel(const std::string& what) : std::domain_error(what) {}
};

// Exhaustive enumeration would exceed the configured subset cap.
class SearchCapExceeded : public std::length_error {
 public:
  explicit SearchCapExceeded(const std::string& what) : std::length_error(what) {}
};

// Experiment or CLI configuration that fails validation.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace macast

#endif  // MACAST_ERRORS_HPP_
