#include "vecspot/mat.hpp"

#include <omp.h>

#include <stdexcept>

namespace vecspot {

namespace {

void check_mm(const Mat& a, const Mat& b, int a_cols, int b_rows) {
  if (a_cols != b_rows) {
    throw std::invalid_argument("matmul: inner dimensions do not match");
  }
  (void)a;
  (void)b;
}

}  // namespace

Mat matmul(const Mat& a, const Mat& b) {
  check_mm(a, b, a.cols, b.rows);
  Mat c(a.rows, b.cols);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < a.rows; ++i) {
    const double* arow = &a.a[static_cast<size_t>(i) * a.cols];
    double* crow = &c.a[static_cast<size_t>(i) * c.cols];
    for (int k = 0; k < a.cols; ++k) {
      const double aik = arow[k];
      const double* brow = &b.a[static_cast<size_t>(k) * b.cols];
      for (int j = 0; j < b.cols; ++j) {
        crow[j] += aik * brow[j];
      }
    }
  }
  return c;
}

Mat matmul_serial(const Mat& a, const Mat& b) {
  check_mm(a, b, a.cols, b.rows);
  Mat c(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i) {
    const double* arow = &a.a[static_cast<size_t>(i) * a.cols];
    double* crow = &c.a[static_cast<size_t>(i) * c.cols];
    for (int k = 0; k < a.cols; ++k) {
      const double aik = arow[k];
      const double* brow = &b.a[static_cast<size_t>(k) * b.cols];
      for (int j = 0; j < b.cols; ++j) {
        crow[j] += aik * brow[j];
      }
    }
  }
  return c;
}

Mat matmul_nt(const Mat& a, const Mat& b) {
  check_mm(a, b, a.cols, b.cols);
  Mat c(a.rows, b.rows);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < a.rows; ++i) {
    const double* arow = &a.a[static_cast<size_t>(i) * a.cols];
    for (int j = 0; j < b.rows; ++j) {
      const double* brow = &b.a[static_cast<size_t>(j) * b.cols];
      double acc = 0.0;
      for (int k = 0; k < a.cols; ++k) acc += arow[k] * brow[k];
      c(i, j) = acc;
    }
  }
  return c;
}

Mat matmul_tn(const Mat& a, const Mat& b) {
  check_mm(a, b, a.rows, b.rows);
  Mat c(a.cols, b.cols);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < a.cols; ++i) {
    double* crow = &c.a[static_cast<size_t>(i) * c.cols];
    for (int k = 0; k < a.rows; ++k) {
      const double aki = a(k, i);
      const double* brow = &b.a[static_cast<size_t>(k) * b.cols];
      for (int j = 0; j < b.cols; ++j) {
        crow[j] += aki * brow[j];
      }
    }
  }
  return c;
}

Mat transpose(const Mat& a) {
  Mat t(a.cols, a.rows);
  for (int i = 0; i < a.rows; ++i) {
    for (int j = 0; j < a.cols; ++j) t(j, i) = a(i, j);
  }
  return t;
}

void set_num_threads(int n) {
  if (n > 0) omp_set_num_threads(n);
}

int max_threads() { return omp_get_max_threads(); }

}  // namespace vecspot
