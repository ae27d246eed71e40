#pragma once

namespace rmtfin {

// Modified Bessel function of the second kind for orders that are
// non-negative multiples of 1/2.
//
// Half-integer orders start from the closed forms of K_{1/2} and K_{3/2};
// integer orders start from K_0 and K_1 (power series for x <= 2, Steed's
// continued fraction beyond). Higher orders follow the upward recurrence
// K_{v+1} = K_{v-1} + (2v/x) K_v, carried out on the ratio K_{v+1}/K_v so the
// whole evaluation stays in log space and cannot overflow.
//
// All three throw InvalidArgument for x <= 0 or an order that is not a
// non-negative multiple of 1/2.
double log_bessel_k(double nu, double x);
double bessel_k(double nu, double x);
double bessel_k_scaled(double nu, double x); // e^x K_nu(x)
double log_bessel_k_scaled(double nu, double x);

} // namespace rmtfin
