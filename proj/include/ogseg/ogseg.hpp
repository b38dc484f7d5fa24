#pragma once

#include "ogseg/admm.hpp"
#include "ogseg/baseline.hpp"
#include "ogseg/dct_basis.hpp"
#include "ogseg/error.hpp"
#include "ogseg/eval.hpp"
#include "ogseg/image_io.hpp"
#include "ogseg/operators.hpp"
#include "ogseg/segmentation.hpp"
#include "ogseg/synth.hpp"
