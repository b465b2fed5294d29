#pragma once

// Umbrella header for the library. The command-line front end lives in
// lrbisim/cli.hpp and is not included here.

#include "lrbisim/branching.hpp"
#include "lrbisim/error.hpp"
#include "lrbisim/giry_span.hpp"
#include "lrbisim/io.hpp"
#include "lrbisim/lifting.hpp"
#include "lrbisim/lts.hpp"
#include "lrbisim/markov.hpp"
#include "lrbisim/measure.hpp"
#include "lrbisim/rational.hpp"
#include "lrbisim/strong.hpp"
#include "lrbisim/weak.hpp"
