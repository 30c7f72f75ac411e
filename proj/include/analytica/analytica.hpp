#pragma once

#include "analytica/certify.hpp"
#include "analytica/errors.hpp"
#include "analytica/forms.hpp"
#include "analytica/geometry.hpp"
#include "analytica/interpolation.hpp"
#include "analytica/io.hpp"
#include "analytica/oracle.hpp"
#include "analytica/random.hpp"
#include "analytica/rational.hpp"
#include "analytica/series.hpp"
#include "analytica/taylor.hpp"
