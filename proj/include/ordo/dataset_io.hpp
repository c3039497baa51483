// Copyright (c) the ordo authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ordo/types.hpp"

namespace ordo {

/// Offset index over one scored JSONL corpus. Holds no payload bytes; records
/// are re-read from source_path on demand.
struct CorpusHandle {
  std::filesystem::path source_path;
  std::vector<RecordSpan> records;
  std::size_t n = 0;
  std::string score_field;
  std::string sha256_hex;
};

struct LoadedCorpus {
  CorpusHandle handle;
  std::vector<ScoredSample> samples;
};

/// Reproducibility sidecar written next to every materialized output.
struct Manifest {
  std::string spec_version = "1";
  std::string strategy;
  std::map<std::string, std::string> params;
  std::optional<std::uint64_t> seed;
  std::string input_digest;
  std::size_t n = 0;
  std::string created_at;
};

/// Hex SHA-256 of a file's full contents.
std::string sha256_file(const std::filesystem::path& path);

/// Parses one JSON object per line, taking the sample score from
/// `score_field` and the id from the "id" field (line number when absent).
/// Byte offsets of every record are kept for later streaming.
LoadedCorpus load_scored_jsonl(const std::filesystem::path& path,
                               const std::string& score_field = "score");

enum class PermFormat { Text, Binary };

/// Text: one decimal index per LF-terminated line. Binary: magic "ORDO1",
/// then a 64-bit little-endian count, then that many 64-bit little-endian
/// indices.
void export_permutation(const OrderingPlan& plan, const std::filesystem::path& path,
                        PermFormat format);

/// Reads either permutation format (sniffed via the magic), validates the
/// bijection, and returns it tagged as an external plan.
OrderingPlan import_permutation(const std::filesystem::path& path);

/// Streams source records into out_path in plan order, one record per line,
/// payload bytes copied verbatim. Writes `<out_path>.manifest.json` and
/// returns the manifest. Only the offset index and the permutation are held
/// in memory.
Manifest materialize(const CorpusHandle& handle, const OrderingPlan& plan,
                     const std::filesystem::path& out_path);

/// Manifest describing a plan over an indexed corpus, stamped with the
/// current UTC time.
Manifest make_manifest(const CorpusHandle& handle, const OrderingPlan& plan);

std::string manifest_to_json(const Manifest& manifest);

}  // namespace ordo
