// SPDX-License-Identifier: Apache-2.0

#include <malloc.h>

#include <iostream>

#include "cma/cli.hpp"

int main(int argc, char** argv) {
  // Keep freed field buffers in the heap instead of returning them to the OS.
  mallopt(M_MMAP_THRESHOLD, 32 << 20);
  mallopt(M_TRIM_THRESHOLD, 1 << 30);
  return cma::cli::run(argc, argv, std::cout, std::cerr);
}
