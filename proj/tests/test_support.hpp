#pragma once

#include <cstdint>
#include <string>

// Synthetic topic-model corpus for the document-similarity tests. Documents
// draw Zipf-weighted words from a shared vocabulary; each document also draws
// about half its words from one of `ntopics` dedicated topic blocks, and
// document lengths follow a log-uniform ladder. This yields the structure
// the document experiment needs: strongly varying document norms, topic
// clusters, and a heavy-tailed shared-word distribution.
struct SyntheticCorpusParams {
  int ndocs = 402;
  int vocab = 6000;      // vocabulary size (word ids 0..vocab-1)
  int ntopics = 4;
  int len_min = 24;      // shortest document length (tokens)
  int len_max = 760;     // longest document length
  double zipf_s = 0.65;  // Zipf exponent of the word-frequency law
  double topic_frac = 0.5;  // expected fraction of topic-block words per doc
  int block = 800;       // words per topic block
  int base = 2000;       // first word id of the topic blocks
};

// Writes one "doc####.txt" file per document into `dir` (created if needed),
// tokens "w<id>" separated by spaces. Pure function of (params, seed).
void write_synthetic_corpus(const std::string& dir,
                            const SyntheticCorpusParams& params,
                            std::uint64_t seed);
