// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "stylodet/corpus.hpp"

namespace stylodet {

// Two mechanically distinct Java styles:
//  - classic: indexed for loops, camelCase identifiers
//  - rewritten: while / for-each loops, snake_case identifiers
enum class SynthStyle { classic, rewritten };

struct SynthOptions {
  std::size_t files = 200;  // split evenly between the styles
  std::size_t human_authors = 5;
  std::string llm_model = "synth-llm";
  std::uint64_t seed = 42;
  std::size_t min_methods = 4;
  std::size_t max_methods = 9;
};

struct SynthFile {
  std::string path;  // human/<author>/..., llm/<model>/...
  std::string text;
  SynthStyle style = SynthStyle::classic;
};

std::string generate_java_class(SynthStyle style, const std::string& class_name, std::uint64_t seed,
                                std::size_t methods);

// Deterministic for fixed options; paths follow the default label rules.
std::vector<SynthFile> generate_style_corpus(const SynthOptions& options);

void write_style_corpus(const std::filesystem::path& root, const SynthOptions& options);

}  // namespace stylodet
