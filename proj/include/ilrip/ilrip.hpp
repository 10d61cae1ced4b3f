#pragma once

#include "ilrip/bdrate.hpp"
#include "ilrip/codebook.hpp"
#include "ilrip/codec1d.hpp"
#include "ilrip/codec2d.hpp"
#include "ilrip/container.hpp"
#include "ilrip/core.hpp"
#include "ilrip/entropy.hpp"
#include "ilrip/pgm.hpp"
#include "ilrip/predict.hpp"
#include "ilrip/transform.hpp"
#include "ilrip/vq.hpp"
