#pragma once

#include "gamebsde/affine_rep.hpp"
#include "gamebsde/bsde.hpp"
#include "gamebsde/errors.hpp"
#include "gamebsde/evaluations.hpp"
#include "gamebsde/game.hpp"
#include "gamebsde/generators.hpp"
#include "gamebsde/lattice.hpp"
#include "gamebsde/reflected.hpp"
#include "gamebsde/runner.hpp"
