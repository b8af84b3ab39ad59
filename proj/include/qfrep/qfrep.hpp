#pragma once

#include "arch.hpp"
#include "count.hpp"
#include "expsum.hpp"
#include "forms.hpp"
#include "gamma.hpp"
#include "hnf.hpp"
#include "json_io.hpp"
#include "lattice_enum.hpp"
#include "local.hpp"
#include "local_count.hpp"
#include "matrix.hpp"
#include "modp.hpp"
#include "reduction.hpp"
#include "rng.hpp"
