/*  Copyright 2026 The factlog Authors

    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License. */

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace factlog {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Language / source classification.
class ConfigError : public Error {
 public:
  using Error::Error;
};
class UnbalancedInput : public Error {
 public:
  explicit UnbalancedInput(std::size_t offset)
      : Error("unbalanced input: no matching close for delimiter at offset " +
              std::to_string(offset)),
        offset(offset) {}
  std::size_t offset;
};

// Templates.
class MalformedHole : public Error {
 public:
  MalformedHole(std::size_t position, const std::string& what)
      : Error("malformed hole at " + std::to_string(position) + ": " + what),
        position(position) {}
  std::size_t position;
};
class DuplicateHoleName : public Error {
 public:
  explicit DuplicateHoleName(const std::string& name)
      : Error("duplicate hole name $" + name), name(name) {}
  std::string name;
};
class UnboundHole : public Error {
 public:
  explicit UnboundHole(const std::string& name)
      : Error("unbound hole $" + name), name(name) {}
  std::string name;
};

// Facts.
class MalformedFact : public Error {
 public:
  MalformedFact(std::size_t position, const std::string& what)
      : Error("malformed fact at column " + std::to_string(position + 1) +
              ": " + what),
        position(position) {}
  std::size_t position;
};

// Datalog.
class DatalogSyntaxError : public Error {
 public:
  DatalogSyntaxError(std::size_t line, std::size_t column,
                     const std::string& what)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " +
              what),
        line(line),
        column(column) {}
  std::size_t line, column;
};
class ArityMismatch : public Error {
 public:
  using Error::Error;
};
class UnsafeRule : public Error {
 public:
  using Error::Error;
};
class UnstratifiableProgram : public Error {
 public:
  using Error::Error;
};
class UnknownRelation : public Error {
 public:
  explicit UnknownRelation(const std::string& name)
      : Error("unknown relation " + name), name(name) {}
  std::string name;
};
class TypeMismatch : public Error {
 public:
  using Error::Error;
};

}  // namespace factlog
