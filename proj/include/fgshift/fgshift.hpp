#pragma once

#include "fgshift/budget.hpp"
#include "fgshift/coding.hpp"
#include "fgshift/config_io.hpp"
#include "fgshift/entropy.hpp"
#include "fgshift/errors.hpp"
#include "fgshift/group.hpp"
#include "fgshift/measure.hpp"
#include "fgshift/partition.hpp"
#include "fgshift/pattern.hpp"
#include "fgshift/rational.hpp"
#include "fgshift/siteset.hpp"
#include "fgshift/support_gap.hpp"
