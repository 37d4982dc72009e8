#pragma once

#include <string>

#include "fodof/config.hpp"
#include "fodof/interval_model.hpp"

namespace fodof::testing {

inline std::string fixture(const std::string& name) { return std::string(FODOF_FIXTURE_DIR) + "/" + name; }

inline UncertainFoltiSystem example1() { return parse_config(fixture("example1.json")).system(); }
inline UncertainFoltiSystem example2() { return parse_config(fixture("example2.json")).system(); }

inline Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

inline UncertainFoltiSystem certain(double alpha, const Matrix& a, const Matrix& b, const Matrix& c) {
  return UncertainFoltiSystem(alpha, IntervalMatrix::point(a), IntervalMatrix::point(b), c);
}

}  // namespace fodof::testing
