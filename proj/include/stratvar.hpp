#ifndef STRATVAR_HPP
#define STRATVAR_HPP

#include "stratvar/error.hpp"
#include "stratvar/ratio.hpp"
#include "stratvar/model.hpp"
#include "stratvar/variance.hpp"
#include "stratvar/oracle.hpp"
#include "stratvar/theorems.hpp"
#include "stratvar/rng.hpp"
#include "stratvar/simulate.hpp"
#include "stratvar/io.hpp"

#endif  // STRATVAR_HPP
