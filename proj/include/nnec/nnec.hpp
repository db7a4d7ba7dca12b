#ifndef NNEC_NNEC_HPP
#define NNEC_NNEC_HPP

#include "clustering.hpp"
#include "dataset.hpp"
#include "equilibrium.hpp"
#include "error.hpp"
#include "eval.hpp"
#include "lambda.hpp"
#include "neighbours.hpp"
#include "synth.hpp"
#include "tuning.hpp"

#endif  // NNEC_NNEC_HPP
