#ifndef QMRANK_QMRANK_HPP
#define QMRANK_QMRANK_HPP

#include "common.hpp"
#include "efunc.hpp"
#include "modular.hpp"
#include "partitions.hpp"
#include "qmf.hpp"
#include "qseries.hpp"
#include "quadrature.hpp"
#include "quantumset.hpp"
#include "ranksum.hpp"
#include "rational.hpp"
#include "series.hpp"
#include "sl2.hpp"
#include "verify.hpp"
#include "zwegers.hpp"

#endif
