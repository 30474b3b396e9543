// Copyright 2026 The pdm Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>

namespace pdm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitUsage = 2;

/// Runs the pdm command line. Subcommands: render, validate, bench, serve, trace.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pdm::cli
