#pragma once

//! \file commands.hpp
//! Command dispatch and reproducible CSV/JSON writers.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "config.hpp"

namespace rwre::cli
{

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kArtifactVersion = "1.0.0";

//! Exit codes of the runner.
enum ExitCode : int
{
    kExitOk = 0,
    kExitConfig = 2,
    kExitResource = 3,
    kExitInvariant = 4
};

//! 64-bit FNV-1a of a byte string, as 16 lowercase hex digits.
std::string fnv1a64_hex(const std::string& bytes);

//! Shortest text that reads back to the same double ("%.17g").
std::string format_double(double v);

//! Quote a CSV field when it holds a comma, quote or line break.
std::string csv_field(const std::string& s);

//! Run one command; returns the data files written, manifest last.
std::vector<std::string> run_command(const RunConfig& cfg);

//! Full runner: parse argv, run, map exceptions to exit codes.
int run_main(int argc, const char* const* argv, std::ostream& err);

}  // namespace rwre::cli
