#ifndef DEPSCALE_DEPSCALE_HPP
#define DEPSCALE_DEPSCALE_HPP

#include <depscale/ace.hpp>
#include <depscale/error.hpp>
#include <depscale/estimate.hpp>
#include <depscale/gaussian.hpp>
#include <depscale/joint.hpp>
#include <depscale/oracle.hpp>
#include <depscale/spectral.hpp>
#include <depscale/structure.hpp>

#endif  // DEPSCALE_DEPSCALE_HPP
