#pragma once

#include <cstdint>
#include <vector>

namespace radrect {

// Arithmetic in GF(p), p = 2^31 - 1. Used only by the offline template
// generator, where rank decisions must be exact.
struct Zp {
  static constexpr uint64_t p = 2147483647ull;
  uint64_t v = 0;

  Zp() = default;
  Zp(int64_t x) : v(((x % int64_t(p)) + int64_t(p)) % int64_t(p)) {}

  friend Zp operator+(Zp a, Zp b) { return from(a.v + b.v >= p ? a.v + b.v - p : a.v + b.v); }
  friend Zp operator-(Zp a, Zp b) { return from(a.v >= b.v ? a.v - b.v : a.v + p - b.v); }
  friend Zp operator*(Zp a, Zp b) { return from(a.v * b.v % p); }
  friend bool operator==(Zp a, Zp b) { return a.v == b.v; }
  friend bool operator!=(Zp a, Zp b) { return a.v != b.v; }

  Zp pow(uint64_t e) const {
    Zp r = from(1), b = *this;
    while (e) {
      if (e & 1) r = r * b;
      b = b * b;
      e >>= 1;
    }
    return r;
  }
  Zp inv() const { return pow(p - 2); }
  // p % 4 == 3, so a^((p+1)/4) is a square root when one exists
  bool sqrt(Zp& out) const {
    if (v == 0) { out = from(0); return true; }
    Zp r = pow((p + 1) / 4);
    if (r * r == *this) { out = r; return true; }
    return false;
  }

  static Zp from(uint64_t raw) {
    Zp z;
    z.v = raw;
    return z;
  }
};

// dense row-major matrix over GF(p)
struct ZpMatrix {
  int rows = 0, cols = 0;
  std::vector<Zp> a;

  ZpMatrix() = default;
  ZpMatrix(int r, int c) : rows(r), cols(c), a(size_t(r) * c) {}
  Zp& at(int r, int c) { return a[size_t(r) * cols + c]; }
  const Zp& at(int r, int c) const { return a[size_t(r) * cols + c]; }
};

// Reduced row echelon form with pivots chosen left-to-right in the given
// column order. Returns the pivot column of each pivot row, in row order.
std::vector<int> rref(ZpMatrix& m);

}  // namespace radrect
