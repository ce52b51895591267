#pragma once

#include "mwt/bundled_filters.hpp"
#include "mwt/cascade.hpp"
#include "mwt/filter.hpp"
#include "mwt/filter_file.hpp"
#include "mwt/harmonic_algebra.hpp"
#include "mwt/parallel.hpp"
#include "mwt/solenoid.hpp"
#include "mwt/transfer.hpp"
#include "mwt/trigmat.hpp"
