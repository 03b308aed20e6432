#include "cliquewalk/bigmat.hpp"

#include <cmath>

namespace cliquewalk::fx {

double fixed_to_double_floor(const BigInt& num, int bits) {
  if (num == 0) return 0.0;
  CW_ASSERT(num > 0, "fixed-point values are nonnegative");
  size_t bl = boost::multiprecision::msb(num) + 1;
  int shift = bl > 53 ? static_cast<int>(bl - 53) : 0;
  BigInt top = num >> shift;
  double d = top.convert_to<double>();  // at most 53 bits, exact
  return std::ldexp(d, shift - bits);
}

FixedMatrix FixedMatrix::from_graph_transition(const Graph& g, int bits) {
  FixedMatrix m(g.n(), g.n(), bits);
  BigInt one = BigInt(1) << bits;
  for (int u = 0; u < g.n(); ++u) {
    BigInt deg = g.weighted_degree(u);
    for (auto [v, w] : g.neighbors(u)) {
      m.at(u, v) = (BigInt(w) << bits) / deg;  // floor division
    }
  }
  return m;
}

FixedMatrix FixedMatrix::from_f64(const Mat& src, int bits, double margin) {
  FixedMatrix m(src.rows(), src.cols(), bits);
  for (int i = 0; i < src.rows(); ++i) {
    for (int j = 0; j < src.cols(); ++j) {
      double x = src.at(i, j) - margin;
      if (x <= 0.0) continue;
      // x = imant * 2^(exp-53) with an exact 53-bit integer mantissa, so
      // floor(x * 2^bits) reduces to an exact shift of imant.
      int exp = 0;
      double mant = std::frexp(x, &exp);
      BigInt imant(std::ldexp(mant, 53));
      int shift = bits + exp - 53;
      if (shift >= 0) {
        m.at(i, j) = imant << shift;
      } else {
        m.at(i, j) = imant >> (-shift);
      }
    }
  }
  return m;
}

FixedMatrix FixedMatrix::multiply_trunc(const FixedMatrix& a, const FixedMatrix& b) {
  CW_ASSERT(a.cols() == b.rows(), "fixed multiply shape mismatch");
  CW_ASSERT(a.bits() == b.bits(), "fixed multiply bit-width mismatch");
  FixedMatrix c(a.rows(), b.cols(), a.bits());
  const int inner = a.cols();
  BigInt acc;
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < b.cols(); ++j) {
      acc = 0;
      for (int k = 0; k < inner; ++k) {
        const BigInt& x = a.at(i, k);
        if (x != 0) acc += x * b.at(k, j);
      }
      c.at(i, j) = acc >> a.bits();
    }
  }
  return c;
}

FixedMatrix FixedMatrix::rescaled(int new_bits) const {
  FixedMatrix out(rows_, cols_, new_bits);
  int shift = new_bits - bits_;
  for (int i = 0; i < rows_; ++i) {
    for (int j = 0; j < cols_; ++j) {
      if (shift >= 0) {
        out.at(i, j) = at(i, j) << shift;
      } else {
        out.at(i, j) = at(i, j) >> (-shift);
      }
    }
  }
  return out;
}

Mat FixedMatrix::to_f64_floor() const {
  Mat m(rows_, cols_);
  for (int i = 0; i < rows_; ++i) {
    for (int j = 0; j < cols_; ++j) m.at(i, j) = fixed_to_double_floor(at(i, j), bits_);
  }
  return m;
}

}  // namespace cliquewalk::fx
