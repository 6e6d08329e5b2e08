#pragma once

#include <scanpath/augment.hpp>
#include <scanpath/classifier.hpp>
#include <scanpath/clustering.hpp>
#include <scanpath/eval.hpp>
#include <scanpath/features.hpp>
#include <scanpath/gaze_data.hpp>
#include <scanpath/generator.hpp>
#include <scanpath/model.hpp>
#include <scanpath/model_builder.hpp>
#include <scanpath/model_io.hpp>
#include <scanpath/render.hpp>
#include <scanpath/shape_model.hpp>
#include <scanpath/update_rule.hpp>
