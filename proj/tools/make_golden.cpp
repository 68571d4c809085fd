// Regenerates tests/golden/constants_golden.csv from the pinned input grid.
// Usage: make_golden <output-path>

#include <cstdio>

#include "support/golden_cases.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: make_golden <output-csv>\n");
    return 2;
  }
  std::FILE* out = std::fopen(argv[1], "w");
  if (!out) {
    std::fprintf(stderr, "cannot open %s\n", argv[1]);
    return 2;
  }
  std::fprintf(out, "# sldlab-constants-golden v1\n");
  std::fprintf(out, "name,args...,value\n");
  for (const auto& c : sld::testing::golden_cases()) {
    std::fprintf(out, "%s", c.name.c_str());
    for (double a : c.args) std::fprintf(out, ",%.17g", a);
    std::fprintf(out, ",%.17g\n", c.value);
  }
  std::fclose(out);
  return 0;
}
