// Golden CLI cases: tests/golden/cases.tsv lists name, expected exit code and
// the arguments; tests/golden/<name>.json holds the expected stdout.
#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "psiest/cli.hpp"

namespace golden {

struct Case {
  std::string name;
  int exit_code = 0;
  std::vector<std::string> args;
};

struct Output {
  int exit_code = 0;
  std::string out;
};

inline std::string dir() { return std::string(PSIEST_SOURCE_DIR) + "/tests/golden"; }

inline std::vector<Case> load() {
  std::ifstream in(dir() + "/cases.tsv");
  if (!in) throw std::runtime_error("cannot open " + dir() + "/cases.tsv");
  std::vector<Case> cases;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto t1 = line.find('\t');
    const auto t2 = line.find('\t', t1 + 1);
    if (t1 == std::string::npos || t2 == std::string::npos) {
      throw std::runtime_error("bad golden line: " + line);
    }
    Case c;
    c.name = line.substr(0, t1);
    c.exit_code = std::stoi(line.substr(t1 + 1, t2 - t1 - 1));
    std::istringstream args(line.substr(t2 + 1));
    for (std::string a; args >> a;) c.args.push_back(a);
    cases.push_back(std::move(c));
  }
  return cases;
}

inline Output invoke(const Case& c) {
  std::vector<const char*> argv = {"psiest"};
  for (const auto& a : c.args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code =
      psiest::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str()};
}

inline std::string path(const Case& c) { return dir() + "/" + c.name + ".json"; }

inline std::string read_file(const std::string& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace golden
