#pragma once

#include "adm/config.hpp"
#include "adm/csv.hpp"
#include "adm/deconvolution.hpp"
#include "adm/diagnostics.hpp"
#include "adm/error.hpp"
#include "adm/experiment.hpp"
#include "adm/fft.hpp"
#include "adm/field.hpp"
#include "adm/filters.hpp"
#include "adm/inequalities.hpp"
#include "adm/lattice.hpp"
#include "adm/report.hpp"
#include "adm/snapshot.hpp"
#include "adm/solvers.hpp"
