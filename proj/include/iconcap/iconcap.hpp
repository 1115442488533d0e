#pragma once

#include "iconcap/analysis.hpp"
#include "iconcap/annotations.hpp"
#include "iconcap/caption.hpp"
#include "iconcap/correlates.hpp"
#include "iconcap/error.hpp"
#include "iconcap/jsonl.hpp"
#include "iconcap/metrics/bleu.hpp"
#include "iconcap/metrics/cider.hpp"
#include "iconcap/metrics/evaluate.hpp"
#include "iconcap/metrics/meteor.hpp"
#include "iconcap/metrics/rouge.hpp"
#include "iconcap/notation.hpp"
#include "iconcap/porter_stemmer.hpp"
#include "iconcap/splits.hpp"
#include "iconcap/tokenize.hpp"
#include "iconcap/version.hpp"
