#pragma once

#include <mpfr.h>

#include <utility>

namespace subdiff::detail {

/// Owning handle for an mpfr_t. Arithmetic goes through the C API.
class Mpfr {
 public:
  explicit Mpfr(mpfr_prec_t bits, double v = 0.0) {
    mpfr_init2(x_, bits);
    mpfr_set_d(x_, v, MPFR_RNDN);
  }
  Mpfr(const Mpfr& o) {
    mpfr_init2(x_, mpfr_get_prec(o.x_));
    mpfr_set(x_, o.x_, MPFR_RNDN);
  }
  Mpfr& operator=(const Mpfr& o) {
    if (this != &o) {
      mpfr_set_prec(x_, mpfr_get_prec(o.x_));
      mpfr_set(x_, o.x_, MPFR_RNDN);
    }
    return *this;
  }
  ~Mpfr() { mpfr_clear(x_); }

  mpfr_ptr get() noexcept { return x_; }
  mpfr_srcptr get() const noexcept { return x_; }
  double to_double() const { return mpfr_get_d(x_, MPFR_RNDN); }

 private:
  mpfr_t x_;
};

}  // namespace subdiff::detail
