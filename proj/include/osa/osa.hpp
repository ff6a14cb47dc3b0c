#ifndef OSA_OSA_HPP
#define OSA_OSA_HPP

#include "osa/config.hpp"
#include "osa/error.hpp"
#include "osa/experiment.hpp"
#include "osa/fls.hpp"
#include "osa/fuzzy.hpp"
#include "osa/radio.hpp"
#include "osa/simulator.hpp"

#endif  // OSA_OSA_HPP
