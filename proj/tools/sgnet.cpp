// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sgnet Authors.
#include <iostream>

#include "sgnet/service.hpp"

int main(int argc, char** argv) {
  return sgnet::run_cli({argv + 1, argv + argc}, std::cout, std::cerr);
}
