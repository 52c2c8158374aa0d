#pragma once

// medctl front end. Every command is a function of its arguments and input
// files; logs go to `err`, reports to `out`.
//
// Exit codes: 0 certified optimal, 2 best-found (certificate failed), 1 error.

#include <iosfwd>
#include <string>
#include <vector>

namespace med::cli {

inline constexpr int kExitCertified = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitBestFound = 2;

/// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);

struct GridAxis {
  std::string name;
  std::vector<double> values;
};

/// Parses "a=0,0.25;theta=0.5;n=3". Names must be one of a, theta, n, two_j.
std::vector<GridAxis> parse_grid(const std::string& spec);

}  // namespace med::cli
