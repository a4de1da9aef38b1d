#pragma once

// Frozen reference values for the test suite.  Every constant here was
// produced outside the library under test: closed forms evaluated by
// hand, 30-digit arbitrary-precision arithmetic, or published cipher
// test vectors.  Tests compare library output against these numbers;
// none of them is computed by the code they validate.

#include <cstdint>

namespace oracle {

// --- special functions -------------------------------------------------
// Riemann zeta(1.6); the mode sum for lambda_i = i^2, s_i = 1 at
// regularity exponent 0.2 telescopes to it.
inline constexpr double kZeta16 = 2.2857656656801299;

// int_r^inf e^{-s^2/2} ds at r = 0 and r = sqrt(5).
inline constexpr double kGaussTail0 = 1.2533141373155003;
inline constexpr double kGaussTailSqrt5 = 0.031768152841512204;

// (5e/2) int_{sqrt5}^inf e^{-s^2/2} ds: the one-dimensional supremum
// tail bound at its smallest non-vacuous threshold.
inline constexpr double kOneDimBoundAtSqrt5 = 0.21588698148198052;

// sup_{u>0} (1 - e^{-u}) / sqrt(u), attained at u = 1.2564312086...
inline constexpr double kHoelderCHalf = 0.63817268633895148;

// --- contraction rates -------------------------------------------------
// sup_s (s - L e^{s r0}) with the stationary point clamped at lambda1:
// (lambda1, L, r0) = (5, 1, 0.2) gives 5 - e.
inline constexpr double kRateClamped = 2.2817181715409548;
// Interior stationary point: (10, 0.1, 1) gives ln(10) - 1.
inline constexpr double kRateInterior = 1.3025850929940457;
// (2, 0.5, 0.5) gives 2 - e/2 (stationary point again beyond lambda1).
inline constexpr double kRateHalfE = 0.64085908577047738;
// (1, 0.05, 1) gives 1 - 0.05 e.
inline constexpr double kRateSmallL = 0.86408590857704774;
// (1, 0.2, 1) gives 1 - 0.2 e.
inline constexpr double kRateFifthE = 0.45634363430819095;

// --- spectral gap bounds ----------------------------------------------
inline constexpr double kPiSq = 9.869604401089358;
inline constexpr double kTwoPiSq = 19.739208802178716;
inline constexpr double kPiFourth = 97.409091034002437;

// --- exact OU transition ----------------------------------------------
// Stationary-increment variance over one unit step at lambda = s = 1.
inline constexpr double kOuVarUnit = 0.43233235838169365;
// Variance of X(2) from X(0) = 0, lambda = s = 1.
inline constexpr double kOuVarT2 = 0.49084218055563291;

// --- matrix exponential ------------------------------------------------
inline constexpr double kCos1 = 0.54030230586813972;
inline constexpr double kSin1 = 0.8414709848078965;
inline constexpr double kCos30 = 0.15425144988758405;
inline constexpr double kSin30 = -0.98803162409286183;
// phi1(1) = e - 1, phi2(1) = e - 2.
inline constexpr double kPhi1At1 = 1.7182818284590452;
inline constexpr double kPhi2At1 = 0.71828182845904524;

// --- supremum tail machinery --------------------------------------------
// theta for the single-scale hook delta_1 = 1: log(e + 1).
inline constexpr double kLogEPlus1 = 1.3132616875182228;

// --- confidence bounds --------------------------------------------------
// Wilson 95% upper limit at zero successes: z^2/(M + z^2) for M = 1e5.
inline constexpr double kWilsonZeroE5 = 3.8413112443311705e-05;
// Wilson 95% upper limit for 50 successes out of 100.
inline constexpr double kWilsonHalf100 = 0.59616846963400436;

// --- block cipher test vectors ------------------------------------------
// philox4x32-10 known-answer vectors (counter, key -> output), as
// published with the reference implementation of the generator.
inline constexpr uint32_t kPhiloxZeroOut[4] = {0x6627e8d5u, 0xe169c58du,
                                               0xbc57ac4cu, 0x9b00dbd8u};
inline constexpr uint32_t kPhiloxOnesOut[4] = {0x408f276du, 0x41c83b0eu,
                                               0xa20bc7c6u, 0x6d5451fdu};
// splitmix64 outputs from state 0.
inline constexpr uint64_t kSplitmix0First = 0xE220A8397B1DCDAFull;
inline constexpr uint64_t kSplitmix0Second = 0x6E789E6AA1B965F4ull;

}  // namespace oracle
