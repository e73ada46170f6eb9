#pragma once

// Umbrella header.

#include "multihomeo/dyadic.hpp"
#include "multihomeo/experiments.hpp"
#include "multihomeo/families.hpp"
#include "multihomeo/fft.hpp"
#include "multihomeo/frequency_partition.hpp"
#include "multihomeo/grid_signal.hpp"
#include "multihomeo/interval.hpp"
#include "multihomeo/modulus.hpp"
#include "multihomeo/multiplier.hpp"
#include "multihomeo/net_homeo.hpp"
#include "multihomeo/nets.hpp"
#include "multihomeo/norm_estimation.hpp"
#include "multihomeo/parallel.hpp"
#include "multihomeo/radial_homeo.hpp"
#include "multihomeo/report.hpp"
#include "multihomeo/rng.hpp"
#include "multihomeo/spectral.hpp"
