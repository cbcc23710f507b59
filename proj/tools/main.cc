// SPDX-FileCopyrightText: (c) 2026 The semx Authors
//
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "cli.h"

int main(int argc, char** argv) {
  return semx::cli::run(std::vector<std::string>(argv, argv + argc), std::cout);
}
