#pragma once

#include "dvoc/contraction.hpp"
#include "dvoc/dynamics.hpp"
#include "dvoc/errors.hpp"
#include "dvoc/metrics.hpp"
#include "dvoc/network.hpp"
#include "dvoc/phasor.hpp"
#include "dvoc/scenarios.hpp"
#include "dvoc/simulation.hpp"
