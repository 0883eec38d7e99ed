#pragma once

#include <complex>

namespace tnspec {

// Global scalar precision toggle.  Double is the default; defining
// TNSPEC_SINGLE_PRECISION at configure time switches the whole stack to
// complex<float>.  All shipped tests run in double.
#ifdef TNSPEC_SINGLE_PRECISION
using real_t = float;
#else
using real_t = double;
#endif

using cx = std::complex<real_t>;

}  // namespace tnspec
