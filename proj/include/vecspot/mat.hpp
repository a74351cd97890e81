#pragma once

#include <cstddef>
#include <vector>

namespace vecspot {

// Dense row-major matrix of doubles. Small on purpose; everything the
// models need is matmul plus elementwise work on raw storage.
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;

  Mat() = default;
  Mat(int r, int c, double fill = 0.0)
      : rows(r), cols(c), a(static_cast<size_t>(r) * c, fill) {}

  double& operator()(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
  double operator()(int r, int c) const { return a[static_cast<size_t>(r) * cols + c]; }
  size_t size() const { return a.size(); }
  bool same_shape(const Mat& o) const { return rows == o.rows && cols == o.cols; }
};

// Parallel over result rows; bitwise identical to matmul_serial for any
// thread count since each row is reduced independently in index order.
Mat matmul(const Mat& a, const Mat& b);
Mat matmul_serial(const Mat& a, const Mat& b);  // reference kept for tests/bench

Mat matmul_nt(const Mat& a, const Mat& b);  // a * b^T
Mat matmul_tn(const Mat& a, const Mat& b);  // a^T * b
Mat transpose(const Mat& a);

// Forwards to omp_set_num_threads; n <= 0 leaves the runtime default.
void set_num_threads(int n);
int max_threads();

}  // namespace vecspot
