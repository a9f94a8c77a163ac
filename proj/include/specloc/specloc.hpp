#pragma once

#include "specloc/clifford.hpp"
#include "specloc/dirac.hpp"
#include "specloc/kernels.hpp"
#include "specloc/lattice_op.hpp"
#include "specloc/localizer.hpp"
#include "specloc/models.hpp"
#include "specloc/oracles.hpp"
#include "specloc/site.hpp"
#include "specloc/symmetry.hpp"
#include "specloc/types.hpp"
