#pragma once
// Umbrella header for the offline parts of memforge. Network clients live in
// memforge/remote_extractor.hpp and memforge/pubmed.hpp.

#include "memforge/activation.hpp"
#include "memforge/attention.hpp"
#include "memforge/config.hpp"
#include "memforge/corpus.hpp"
#include "memforge/digest.hpp"
#include "memforge/embedding.hpp"
#include "memforge/error.hpp"
#include "memforge/eval.hpp"
#include "memforge/extraction.hpp"
#include "memforge/graph.hpp"
#include "memforge/matrix.hpp"
#include "memforge/memory_bank.hpp"
#include "memforge/pipeline.hpp"
#include "memforge/report.hpp"
#include "memforge/snapshot.hpp"
#include "memforge/text.hpp"
