#pragma once

#include <map>
#include <string>

namespace wcat {

// Canonical content of every bundled fixture, keyed by path relative to the
// fixtures directory. The emit tool writes these files; a sync test keeps
// the checked-in copies byte-identical with the generators, so the fixtures
// can never drift from the code that defines them.
std::map<std::string, std::string> fixture_files();

}  // namespace wcat
