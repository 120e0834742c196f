#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "codepurify/dataset.hpp"

namespace codepurify {

struct SyntheticOptions {
  std::size_t count = 2000;
  std::uint64_t seed = 1;
  std::string id_prefix = "s";
};

/// Seeded generator of Java-style methods built from a fixed naming
/// vocabulary and statement templates. It stands in for a public code corpus
/// when running end-to-end scenarios offline. Ids are `<prefix>-<index>`.
Dataset generate_corpus(const SyntheticOptions& options);

}  // namespace codepurify
