#pragma once

// Frozen reference values computed by independent scripts (closed forms,
// binomial sums and brute-force enumeration), never by this library.

namespace oracle {

// m = tanh(1.5 m), positive root by bisection.
inline constexpr double kCurieWeissM15 = 0.8585596366401104;
// inf H_W for the spin model at beta = 1.5 (and 0 at beta = 0.5).
inline constexpr double kSpinInf15 = -0.11519416888149473;

// (1/n) log Z~_n for the spin model at beta = 1.5, binomial sums.
inline constexpr double kSpinZn15[][2] = {
    {50, 0.13037959938721862},   {100, 0.12271133754210174}, {200, 0.11893918148618244},
    {400, 0.11706368029724966},  {800, 0.11612821440786704}, {1600, 0.11566101846156881},
};

// Rate identification at beta = 1.5, nu = (0.25, 0.75), n = 400.
inline constexpr double kRateIdentification400 = 0.06037571623838662;
inline constexpr double kRateFunction = 0.05850620482263168;

// (1/3) log E exp(3 U_3) for W = -(1/2) x y on uniform spins.
inline constexpr double kSpinMgfBeta1N3 = 0.08548058521575143;

// -H((0.2, 0.8) | uniform).
inline constexpr double kSanovTarget = -0.19274475702175753;

}  // namespace oracle
