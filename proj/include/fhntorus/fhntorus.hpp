#pragma once

#include "fhntorus/errors.hpp"
#include "fhntorus/params.hpp"
#include "fhntorus/model.hpp"
#include "fhntorus/symmetry.hpp"
#include "fhntorus/spectral.hpp"
#include "fhntorus/bifurcation.hpp"
#include "fhntorus/ode.hpp"
#include "fhntorus/simulate.hpp"
#include "fhntorus/criticality.hpp"
#include "fhntorus/report.hpp"
