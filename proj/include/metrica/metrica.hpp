#pragma once

#include "metrica/baseline.hpp"
#include "metrica/corpus.hpp"
#include "metrica/error.hpp"
#include "metrica/lexicon.hpp"
#include "metrica/metrics.hpp"
#include "metrica/pattern.hpp"
#include "metrica/phonology.hpp"
#include "metrica/scansion.hpp"
#include "metrica/utf8.hpp"
#include "metrica/xml.hpp"
