#pragma once

#include "swmsl/types.hpp"

namespace swmsl {

/// Bundled two-material phantom: a raised square (depth bin 549, stronger
/// spectral response) on a flat background plane (bin 399). Reference
/// responses are scaled so the mean per-pixel signal mass sum_l r_l G_l is
/// about 0.42 with the bundled IRFs, which reproduces the desk-scale count
/// and SBR regimes of the synthetic study.
GroundTruth make_phantom(int rows = 32, int cols = 32, int L = 1);

/// Bundled IRF bank: asymmetric pulse shapes (fast Gaussian rise, slow
/// exponential decay) with band-dependent temporal delays, normalized to
/// unit integral, on a T = 1500 histogram with admissible window [300, 899]
/// (0-based).
IrfBank make_default_irf(int L = 1);

}  // namespace swmsl
