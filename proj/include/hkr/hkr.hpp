#pragma once

// Everything except the JSON/CSV layer (hkr/report.hpp), which needs nlohmann_json.

#include "hkr/acr.hpp"
#include "hkr/blowup.hpp"
#include "hkr/error.hpp"
#include "hkr/inequality.hpp"
#include "hkr/lrcalc.hpp"
#include "hkr/scalar/interval.hpp"
#include "hkr/scalar/rational.hpp"
#include "hkr/scalar/real.hpp"
#include "hkr/scheme.hpp"
#include "hkr/series.hpp"
#include "hkr/stepfn.hpp"
#include "hkr/verify.hpp"
