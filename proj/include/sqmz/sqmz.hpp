#pragma once

// Umbrella header: the complete public surface of the library.

#include "errors.hpp"
#include "fock.hpp"
#include "metrology.hpp"
#include "moments.hpp"
#include "network.hpp"
#include "operators.hpp"
#include "source.hpp"
#include "sweep.hpp"
#include "units.hpp"
#include "verify.hpp"
