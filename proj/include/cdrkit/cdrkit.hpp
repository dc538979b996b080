#ifndef CDRKIT_CDRKIT_HPP
#define CDRKIT_CDRKIT_HPP

#include "cdrkit/baselines.hpp"
#include "cdrkit/evaluation.hpp"
#include "cdrkit/geo.hpp"
#include "cdrkit/ingest.hpp"
#include "cdrkit/linalg.hpp"
#include "cdrkit/log.hpp"
#include "cdrkit/model.hpp"
#include "cdrkit/model_io.hpp"
#include "cdrkit/neural.hpp"
#include "cdrkit/normalizer.hpp"
#include "cdrkit/optimizer.hpp"
#include "cdrkit/pipeline.hpp"
#include "cdrkit/prep.hpp"
#include "cdrkit/rng.hpp"
#include "cdrkit/synth.hpp"
#include "cdrkit/text.hpp"
#include "cdrkit/types.hpp"

#endif  // CDRKIT_CDRKIT_HPP
