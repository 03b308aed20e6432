#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include "cliquewalk/graph.hpp"

// Scaled-integer fixed-point matrices for the high-precision lane. Entries
// are nonnegative values num / 2^bits; multiplication is exact integer
// arithmetic followed by a floor shift, so every computed entry is an
// under-approximation of the exact product with deficit below 2^-bits.

namespace cliquewalk::fx {

using BigInt = boost::multiprecision::cpp_int;

/// Largest double not exceeding num / 2^bits.
double fixed_to_double_floor(const BigInt& num, int bits);

class FixedMatrix {
 public:
  FixedMatrix() = default;
  FixedMatrix(int rows, int cols, int bits)
      : rows_(rows), cols_(cols), bits_(bits),
        num_(static_cast<size_t>(rows) * cols) {}

  /// floor(w(u,v) * 2^bits / deg(u)); exact inputs, subtractive by
  /// construction.
  static FixedMatrix from_graph_transition(const Graph& g, int bits);

  /// floor((m[i][j] - margin) * 2^bits), clamped at zero. Pass a margin of
  /// one ulp when m itself may over-approximate an exact value.
  static FixedMatrix from_f64(const Mat& m, int bits, double margin = 0.0);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int bits() const { return bits_; }
  BigInt& at(int i, int j) { return num_[static_cast<size_t>(i) * cols_ + j]; }
  const BigInt& at(int i, int j) const { return num_[static_cast<size_t>(i) * cols_ + j]; }

  /// floor((A * B) / 2^bits): exact integer product, truncated.
  static FixedMatrix multiply_trunc(const FixedMatrix& a, const FixedMatrix& b);

  void square_trunc_inplace() { *this = multiply_trunc(*this, *this); }

  /// Same values at a different width; shifting down floors (subtractive).
  FixedMatrix rescaled(int new_bits) const;

  /// Per-entry floor conversion; every double is <= the fixed value.
  Mat to_f64_floor() const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  int bits_ = 0;
  std::vector<BigInt> num_;
};

}  // namespace cliquewalk::fx
