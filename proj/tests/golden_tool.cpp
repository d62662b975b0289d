// golden_tool            compare every case against its golden file
// golden_tool --update   rewrite the golden files
#include <cstring>
#include <fstream>
#include <iostream>

#include "golden.hpp"

int main(int argc, char** argv) {
  const bool update = argc > 1 && std::strcmp(argv[1], "--update") == 0;
  int failures = 0;
  for (const auto& c : golden::load()) {
    const auto a = golden::invoke(c);
    const auto b = golden::invoke(c);
    if (update) {
      std::ofstream(golden::path(c), std::ios::binary) << a.out;
      std::cout << "wrote " << golden::path(c) << "\n";
      continue;
    }
    const bool ok = a.exit_code == c.exit_code && a.out == b.out &&
                    a.out == golden::read_file(golden::path(c));
    std::cout << (ok ? "ok   " : "FAIL ") << c.name << " (exit " << a.exit_code << ")\n";
    if (!ok) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
