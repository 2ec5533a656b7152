#pragma once

#include "keygraph/analysis.hpp"
#include "keygraph/candidates.hpp"
#include "keygraph/corpus.hpp"
#include "keygraph/error.hpp"
#include "keygraph/evaluation.hpp"
#include "keygraph/extraction.hpp"
#include "keygraph/features.hpp"
#include "keygraph/gbdt.hpp"
#include "keygraph/graph.hpp"
#include "keygraph/log.hpp"
#include "keygraph/models.hpp"
#include "keygraph/naive_bayes.hpp"
#include "keygraph/parallel.hpp"
#include "keygraph/phrases.hpp"
#include "keygraph/porter.hpp"
#include "keygraph/random.hpp"
#include "keygraph/stoplist.hpp"
#include "keygraph/training.hpp"
#include "keygraph/unicode.hpp"
