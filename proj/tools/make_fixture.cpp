// Regenerates the bundled reference scenario file.
#include "flocksim/io.hpp"
#include "flocksim/scenarios.hpp"

#include <iostream>

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_fixture <output.json>\n";
    return 64;
  }
  try {
    flocksim::write_scenario(flocksim::reference_scenario(), argv[1]);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 3;
  }
  return 0;
}
