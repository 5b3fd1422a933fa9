#pragma once

#include "kdvcurve/eca_geometry.hpp"
#include "kdvcurve/errors.hpp"
#include "kdvcurve/euclidean_geometry.hpp"
#include "kdvcurve/flow_engine.hpp"
#include "kdvcurve/checks.hpp"
#include "kdvcurve/miura.hpp"
#include "kdvcurve/periodic_calculus.hpp"
#include "kdvcurve/plane.hpp"
#include "kdvcurve/sampling.hpp"
#include "kdvcurve/serialization.hpp"
