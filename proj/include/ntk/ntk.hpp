#pragma once

#include "denominator.hpp"
#include "fourier.hpp"
#include "linalg.hpp"
#include "nehari.hpp"
#include "realization.hpp"
#include "resolvent.hpp"
#include "schur.hpp"
#include "stein.hpp"
#include "types.hpp"
