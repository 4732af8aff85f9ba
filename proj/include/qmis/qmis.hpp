#pragma once

#include "qmis/common.hpp"     // IWYU pragma: export
#include "qmis/rng.hpp"        // IWYU pragma: export
#include "qmis/bitset.hpp"     // IWYU pragma: export
#include "qmis/graph.hpp"      // IWYU pragma: export
#include "qmis/statevector.hpp"  // IWYU pragma: export
#include "qmis/lightcone.hpp"  // IWYU pragma: export
#include "qmis/qaoa_plus.hpp"  // IWYU pragma: export
#include "qmis/simplex.hpp"    // IWYU pragma: export
#include "qmis/ensemble.hpp"   // IWYU pragma: export
#include "qmis/ogp.hpp"        // IWYU pragma: export
#include "qmis/tailbounds.hpp" // IWYU pragma: export
#include "qmis/experiment.hpp" // IWYU pragma: export
#include "qmis/reproduce.hpp"  // IWYU pragma: export
#include "qmis/runner.hpp"     // IWYU pragma: export
