// Copyright 2026 The AHDR Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "ahdr/cli.hpp"

int main(int argc, char** argv) { return ahdr::cli_dispatch(argc, argv, std::cout, std::cerr); }
