#pragma once

#include <filesystem>
#include <optional>

#include "uu/data.hpp"

namespace uu {

/// Parsed `f1,...,fd[,label]` file.
struct CsvTable {
  Matrix features;
  std::optional<LabelVector> labels;
};

/// Throws ParseError carrying the 1-based line number on malformed input.
CsvTable read_csv(const std::filesystem::path& path);

/// Requires a label column with values in {+1, -1}.
LabeledSet load_csv(const std::filesystem::path& path);

/// Label column, if present, is dropped.
UnlabeledSet load_unlabeled_csv(const std::filesystem::path& path, double declared_prior);

/// Values are written in shortest round-trip form, so save/load is exact.
void save_csv(const std::filesystem::path& path, const LabeledSet& set);
void save_csv(const std::filesystem::path& path, const UnlabeledSet& set);

}  // namespace uu
