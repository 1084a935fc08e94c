// Writes the canonical fixture set to disk. Run from the repository root
// (or pass the target directory) after changing any generator; the
// test_fixtures suite fails whenever the checked-in files drift.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "wcat/fixtures.hpp"

int main(int argc, char** argv) {
  std::filesystem::path root = argc > 1 ? argv[1] : "fixtures";
  for (const auto& [rel, content] : wcat::fixture_files()) {
    std::filesystem::path path = root / rel;
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) {
      std::cerr << "cannot write " << path << "\n";
      return 1;
    }
    out << content;
    std::cout << path.string() << " (" << content.size() << " bytes)\n";
  }
  return 0;
}
