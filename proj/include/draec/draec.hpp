#pragma once

#include "draec/adaptive.hpp"
#include "draec/config.hpp"
#include "draec/error.hpp"
#include "draec/fft.hpp"
#include "draec/metrics.hpp"
#include "draec/parallel.hpp"
#include "draec/pipeline.hpp"
#include "draec/rng.hpp"
#include "draec/scene.hpp"
#include "draec/stft.hpp"
#include "draec/textio.hpp"
#include "draec/variant.hpp"
#include "draec/wav.hpp"
