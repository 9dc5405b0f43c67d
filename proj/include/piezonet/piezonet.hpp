#pragma once

// Everything except the command-line layer.

#include "piezonet/beam_modal.hpp"
#include "piezonet/circuits.hpp"
#include "piezonet/coupled.hpp"
#include "piezonet/errors.hpp"
#include "piezonet/reduction.hpp"
#include "piezonet/si_number.hpp"
#include "piezonet/timesim.hpp"
#include "piezonet/transducers.hpp"
