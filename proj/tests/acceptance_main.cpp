#include <iostream>

#include "sublex/acceptance.hpp"

int main() {
  const auto results = sublex::run_acceptance(std::cout);
  return sublex::all_passed(results) ? 0 : 1;
}
