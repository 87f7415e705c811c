/*
 * Copyright 2026 The coexsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
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
#include <string_view>

namespace coexsim {

/// Base for every error raised by the simulator. `kind()` is the stable,
/// machine-readable name used in CLI error JSON.
class CoexError : public std::runtime_error {
public:
    CoexError(std::string_view kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define COEXSIM_DEFINE_ERROR(Name)                                             \
    class Name : public CoexError {                                            \
    public:                                                                    \
        explicit Name(const std::string& what) : CoexError(#Name, what) {}     \
    }

COEXSIM_DEFINE_ERROR(SchedulingInPast);
COEXSIM_DEFINE_ERROR(AnchorConflict);
COEXSIM_DEFINE_ERROR(EmptyWindow);
COEXSIM_DEFINE_ERROR(PayloadTooLarge);
COEXSIM_DEFINE_ERROR(RateInfeasible);
COEXSIM_DEFINE_ERROR(EmptyAudit);
COEXSIM_DEFINE_ERROR(UncoveredInterval);
COEXSIM_DEFINE_ERROR(InvalidInterval);
COEXSIM_DEFINE_ERROR(IllegalTransition);
COEXSIM_DEFINE_ERROR(UnsupportedPhy);
COEXSIM_DEFINE_ERROR(OutOfRange);
COEXSIM_DEFINE_ERROR(DegenerateFit);

#undef COEXSIM_DEFINE_ERROR

/// Requested (fwd, rev) point lies outside the achievable frontier.
class Infeasible : public CoexError {
public:
    Infeasible(const std::string& what, double nearest_fwd_kbps, double nearest_rev_kbps)
        : CoexError("Infeasible", what), fwd_(nearest_fwd_kbps), rev_(nearest_rev_kbps) {}

    double nearest_fwd_kbps() const noexcept { return fwd_; }
    double nearest_rev_kbps() const noexcept { return rev_; }

private:
    double fwd_;
    double rev_;
};

class ParseError : public CoexError {
public:
    ParseError(const std::string& what, int line, std::string field)
        : CoexError("ParseError", what), line_(line), field_(std::move(field)) {}

    int line() const noexcept { return line_; }
    const std::string& field() const noexcept { return field_; }

private:
    int line_;
    std::string field_;
};

class SchemaViolation : public CoexError {
public:
    SchemaViolation(std::string field, std::string constraint)
        : CoexError("SchemaViolation", field + ": " + constraint),
          field_(std::move(field)),
          constraint_(std::move(constraint)) {}

    const std::string& field() const noexcept { return field_; }
    const std::string& constraint() const noexcept { return constraint_; }

private:
    std::string field_;
    std::string constraint_;
};

}  // namespace coexsim
