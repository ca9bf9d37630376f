#pragma once

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fixture {

struct Line {
  std::string row, col;
  int dx2, dy2;
  double value;
};

// "a/b" or a plain decimal
inline double parse_fraction(const std::string& s) {
  auto slash = s.find('/');
  if (slash == std::string::npos) return std::stod(s);
  return std::stod(s.substr(0, slash)) / std::stod(s.substr(slash + 1));
}

inline std::vector<Line> parse(std::istream& in) {
  std::vector<Line> out;
  Line l;
  std::string v;
  while (in >> l.row >> l.col >> l.dx2 >> l.dy2 >> v) {
    l.value = parse_fraction(v);
    out.push_back(l);
  }
  return out;
}

inline std::vector<Line> load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return parse(in);
}

}  // namespace fixture
