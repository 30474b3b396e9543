// Copyright 2026 The pdm Authors.
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "cli.h"

int main(int argc, char** argv) { return pdm::cli::run(argc, argv, std::cout, std::cerr); }
