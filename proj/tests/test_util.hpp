#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "dmc/error.hpp"
#include "doctest.h"

// Run `f`, which must throw dmc::Error, and return its code.
inline dmc::Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const dmc::Error& e) {
    return e.code();
  }
  FAIL("expected a dmc::Error");
  return dmc::Errc::UsageError;
}

inline bool close(std::complex<double> a, std::complex<double> b,
                  double tol = 1e-9) {
  return std::abs(a - b) <= tol;
}

inline bool close(double a, double b, double tol = 1e-9) {
  return std::abs(a - b) <= tol;
}
