#ifndef WWL_WWL_HPP
#define WWL_WWL_HPP

#include "wwl/dataset_io.hpp"
#include "wwl/embedding.hpp"
#include "wwl/error.hpp"
#include "wwl/experiments.hpp"
#include "wwl/graph.hpp"
#include "wwl/ground_distance.hpp"
#include "wwl/kernel.hpp"
#include "wwl/lemma.hpp"
#include "wwl/ot.hpp"
#include "wwl/version.hpp"

#endif  // WWL_WWL_HPP
