#include <iostream>

#include "proxsim/cli/dispatch.h"

int main(int argc, char** argv) {
  return proxsim::dispatch(argc, argv, std::cout, std::cerr);
}
