#pragma once

// Gibbs partitions derived from stable subordinators: exact EPPF evaluation,
// partition and mass-partition samplers, the PD(alpha,-beta) fragmentation
// operator with its dual dependent coagulation, and a statistical
// verification harness.

#include "gibbspart/errors.hpp"
#include "gibbspart/rng.hpp"
#include "gibbspart/mathutil.hpp"
#include "gibbspart/quadrature.hpp"
#include "gibbspart/stable.hpp"
#include "gibbspart/special_fn.hpp"
#include "gibbspart/partitions.hpp"
#include "gibbspart/eppf.hpp"
#include "gibbspart/samplers.hpp"
#include "gibbspart/fragcoag.hpp"
#include "gibbspart/verify.hpp"
