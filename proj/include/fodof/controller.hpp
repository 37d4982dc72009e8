#pragma once

#include "fodof/matrix_core.hpp"

namespace fodof {

// D^alpha x_c = A_c x_c + B_c y,  u = C_c x_c + D_c y.
// With n_c = 0 the controller is the static gain D_c.
struct DynamicController {
  int n_c = 0;
  Matrix a_c;  // n_c x n_c
  Matrix b_c;  // n_c x m
  Matrix c_c;  // l x n_c
  Matrix d_c;  // l x m

  static DynamicController static_gain(const Matrix& d) {
    return {0, Matrix(0, 0), Matrix(0, d.cols()), Matrix(d.rows(), 0), d};
  }

  // Throws kShapeMismatch unless the blocks fit a plant with l inputs and m
  // outputs, or kInvalidArgument on non-finite entries.
  void validate(int inputs, int outputs) const;
};

}  // namespace fodof
