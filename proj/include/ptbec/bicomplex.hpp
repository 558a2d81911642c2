#pragma once

#include "ptbec/types.hpp"

namespace ptbec {

/// A doubly complexified number x = x_r + j x_i, with x_r = rr + i ri and
/// x_i = ir + i ii. Both units square to -1 and commute.
///
/// The algebra is isomorphic to C x C through the idempotents (1 +- ij)/2.
/// `first()` and `second()` are those idempotent components; multiplication is
/// componentwise there, and the j-conjugate swaps them. `second()` coincides
/// with the recombined value (rr - ii) + i (ri + ir).
struct Bicomplex {
  double rr = 0.0;
  double ri = 0.0;
  double ir = 0.0;
  double ii = 0.0;

  Complex real_part() const { return {rr, ri}; }
  Complex imag_part() const { return {ir, ii}; }

  Complex first() const { return real_part() - kI * imag_part(); }
  Complex second() const { return real_part() + kI * imag_part(); }

  static Bicomplex from_components(Complex first, Complex second) {
    const Complex re = 0.5 * (first + second);
    const Complex im = (second - first) / (2.0 * kI);
    return {re.real(), re.imag(), im.real(), im.imag()};
  }

  /// Embeds an ordinary complex number z = Re z + j Im z.
  static Bicomplex from_ordinary(Complex z) { return {z.real(), 0.0, z.imag(), 0.0}; }

  friend bool operator==(const Bicomplex&, const Bicomplex&) = default;
};

inline Complex recombine(const Bicomplex& k) { return {k.rr - k.ii, k.ri + k.ir}; }

}  // namespace ptbec
