// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The synthkit Authors.

#include <iostream>

#include "cli.hpp"

int main(int argc, char **argv) { return synthkit::cli::run(argc, argv, std::cout, std::cerr); }
