#pragma once

#include "newsfmt/error.hpp"
#include "newsfmt/image.hpp"
#include "newsfmt/imaging.hpp"
#include "newsfmt/geometry.hpp"
#include "newsfmt/band_detection.hpp"
#include "newsfmt/text_detection.hpp"
#include "newsfmt/features.hpp"
#include "newsfmt/classifier.hpp"
#include "newsfmt/change_detection.hpp"
#include "newsfmt/reasoning.hpp"
#include "newsfmt/evaluation.hpp"
#include "newsfmt/image_io.hpp"
#include "newsfmt/features_io.hpp"
#include "newsfmt/ground_truth.hpp"
#include "newsfmt/config.hpp"
#include "newsfmt/corpus.hpp"
#include "newsfmt/pipeline.hpp"
