#pragma once

#include "jasm/encoder.hpp"
#include "jasm/ir.hpp"
#include "jasm/layout.hpp"
#include "jasm/oracles.hpp"
#include "jasm/parser.hpp"
#include "jasm/relax.hpp"
#include "jasm/rng.hpp"
#include "jasm/testgen.hpp"
