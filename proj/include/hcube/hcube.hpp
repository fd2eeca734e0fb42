#pragma once

#include "hcube/errors.hpp"
#include "hcube/weighted_space.hpp"
#include "hcube/cylinder.hpp"
#include "hcube/isometry.hpp"
#include "hcube/span.hpp"
#include "hcube/extension.hpp"
#include "hcube/quasi_random.hpp"
#include "hcube/covering.hpp"
#include "hcube/measure.hpp"
#include "hcube/io.hpp"
