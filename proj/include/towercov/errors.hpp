// SPDX-License-Identifier: Apache-2.0
//
// towercov: coverage analysis for massive-MIMO base stations on tall towers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef TOWERCOV_ERRORS_HPP
#define TOWERCOV_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace towercov
{

// Broad classes used by the CLI to pick an exit code.
enum class ErrorClass
{
    input,     // bad configuration, argument or file contents
    numerical, // solver failure or degenerate numerics
    io         // filesystem failures
};

class Error : public std::runtime_error
{
  public:
    Error(ErrorClass cls, const std::string &kind, const std::string &what)
        : std::runtime_error(what), cls_(cls), kind_(kind) {}

    ErrorClass error_class() const noexcept { return cls_; }
    const std::string &kind() const noexcept { return kind_; }

  private:
    ErrorClass cls_;
    std::string kind_;
};

struct InvalidConfig : Error
{
    explicit InvalidConfig(const std::string &what) : Error(ErrorClass::input, "invalid-config", what) {}
};

struct InvalidArgument : Error
{
    explicit InvalidArgument(const std::string &what) : Error(ErrorClass::input, "invalid-argument", what) {}
};

struct OutOfRange : Error
{
    explicit OutOfRange(const std::string &what) : Error(ErrorClass::input, "out-of-range", what) {}
};

struct InvalidDrop : Error
{
    explicit InvalidDrop(const std::string &what) : Error(ErrorClass::input, "invalid-drop", what) {}
};

struct ParseError : Error
{
    explicit ParseError(const std::string &what) : Error(ErrorClass::input, "parse-error", what) {}
};

struct IoError : Error
{
    explicit IoError(const std::string &what) : Error(ErrorClass::io, "io-error", what) {}
};

struct DegenerateChannel : Error
{
    explicit DegenerateChannel(const std::string &what) : Error(ErrorClass::numerical, "degenerate-channel", what) {}
};

// Carries the reciprocal condition estimate of the failing system when one is available.
struct NumericalError : Error
{
    explicit NumericalError(const std::string &what, double rcond = -1.0)
        : Error(ErrorClass::numerical, "numerical-error", what), reciprocal_condition(rcond) {}
    double reciprocal_condition;
};

} // namespace towercov

#endif
