#pragma once

// Umbrella header pulling in the whole public API.

#include "ouphase/config.hpp"
#include "ouphase/griffin_lim.hpp"
#include "ouphase/metrics.hpp"
#include "ouphase/sampler.hpp"
#include "ouphase/score.hpp"
#include "ouphase/score_net.hpp"
#include "ouphase/sde.hpp"
#include "ouphase/spectrogram.hpp"
#include "ouphase/stft.hpp"
#include "ouphase/synth.hpp"
#include "ouphase/training.hpp"
#include "ouphase/transforms.hpp"
#include "ouphase/wave.hpp"
