#pragma once

#include "lfrl/baseline2d.hpp"
#include "lfrl/config.hpp"
#include "lfrl/deblur.hpp"
#include "lfrl/errors.hpp"
#include "lfrl/geometry.hpp"
#include "lfrl/lfb_io.hpp"
#include "lfrl/light_field.hpp"
#include "lfrl/metrics.hpp"
#include "lfrl/mosaic.hpp"
#include "lfrl/regularizers.hpp"
#include "lfrl/renderer.hpp"
#include "lfrl/synth.hpp"
