// Copyright (c) the ordo authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#include "ordo/dataset_io.hpp"

#include <openssl/evp.h>

#include <array>
#include <cmath>
#include <cstring>
#include <ctime>
#include <fstream>
#include <unordered_set>

#include <json.hpp>

#include "ordo/error.hpp"
#include "ordo/ordering.hpp"

namespace ordo {

namespace {

constexpr char kBinaryMagic[5] = {'O', 'R', 'D', 'O', '1'};

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new()) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr) != 1) {
      throw Error(ErrorCode::IoError, "failed to initialize SHA-256");
    }
  }
  ~Sha256() { EVP_MD_CTX_free(ctx_); }
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  void update(const char* data, std::size_t len) {
    if (EVP_DigestUpdate(ctx_, data, len) != 1) {
      throw Error(ErrorCode::IoError, "SHA-256 update failed");
    }
  }

  std::string hex() {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx_, digest, &len) != 1) {
      throw Error(ErrorCode::IoError, "SHA-256 finalize failed");
    }
    static const char* kHex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
      out.push_back(kHex[digest[i] >> 4]);
      out.push_back(kHex[digest[i] & 0xF]);
    }
    return out;
  }

 private:
  EVP_MD_CTX* ctx_;
};

std::ifstream open_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  return in;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void put_u64_le(std::ostream& out, std::uint64_t v) {
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(bytes, 8);
}

std::uint64_t get_u64_le(std::istream& in) {
  unsigned char bytes[8];
  in.read(reinterpret_cast<char*>(bytes), 8);
  if (in.gcount() != 8) throw Error(ErrorCode::FormatError, "truncated 64-bit word");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return v;
}

}  // namespace

std::string sha256_file(const std::filesystem::path& path) {
  auto in = open_binary(path);
  Sha256 hasher;
  std::array<char, 1 << 16> buf;
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    const auto got = in.gcount();
    if (got > 0) hasher.update(buf.data(), static_cast<std::size_t>(got));
  }
  return hasher.hex();
}

LoadedCorpus load_scored_jsonl(const std::filesystem::path& path, const std::string& score_field) {
  auto in = open_binary(path);
  Sha256 hasher;

  LoadedCorpus corpus;
  corpus.handle.source_path = path;
  corpus.handle.score_field = score_field;

  std::unordered_set<std::string> seen_ids;
  std::string line;
  std::uint64_t offset = 0;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const bool had_newline = !in.eof();
    hasher.update(line.data(), line.size());
    if (had_newline) hasher.update("\n", 1);

    const RecordSpan span{offset, line.size()};
    offset += line.size() + (had_newline ? 1 : 0);

    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!record.is_object()) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": not a JSON object");
    }

    ScoredSample sample;
    sample.payload = span;

    const auto score_it = record.find(score_field);
    if (score_it == record.end() || !score_it->is_number()) {
      throw Error(ErrorCode::InvalidScore,
                  "line " + std::to_string(line_no) + ": field '" + score_field +
                      "' missing or not numeric");
    }
    sample.score = score_it->get<double>();
    if (!std::isfinite(sample.score)) {
      throw Error(ErrorCode::InvalidScore, "line " + std::to_string(line_no) + ": non-finite score");
    }

    const auto id_it = record.find("id");
    if (id_it != record.end()) {
      sample.id = id_it->is_string() ? id_it->get<std::string>() : id_it->dump();
    } else {
      sample.id = std::to_string(line_no);
    }
    if (!seen_ids.insert(sample.id).second) {
      throw Error(ErrorCode::DuplicateId,
                  "line " + std::to_string(line_no) + ": duplicate id '" + sample.id + "'");
    }

    const auto tokens_it = record.find("token_count");
    if (tokens_it != record.end()) {
      if (!tokens_it->is_number_unsigned()) {
        throw Error(ErrorCode::ParseError,
                    "line " + std::to_string(line_no) + ": token_count must be a non-negative integer");
      }
      sample.token_count = tokens_it->get<std::uint64_t>();
    }

    corpus.handle.records.push_back(span);
    corpus.samples.push_back(std::move(sample));
  }
  if (corpus.samples.empty()) {
    throw Error(ErrorCode::EmptyCorpus, "'" + path.string() + "' holds no records");
  }
  corpus.handle.n = corpus.samples.size();
  corpus.handle.sha256_hex = hasher.hex();
  return corpus;
}

void export_permutation(const OrderingPlan& plan, const std::filesystem::path& path,
                        PermFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
  if (format == PermFormat::Text) {
    for (std::size_t idx : plan.permutation) out << idx << '\n';
  } else {
    out.write(kBinaryMagic, sizeof(kBinaryMagic));
    put_u64_le(out, plan.permutation.size());
    for (std::size_t idx : plan.permutation) put_u64_le(out, idx);
  }
  if (!out) throw Error(ErrorCode::IoError, "write failed for '" + path.string() + "'");
}

OrderingPlan import_permutation(const std::filesystem::path& path) {
  auto in = open_binary(path);
  OrderingPlan plan;
  plan.strategy = Strategy::External;

  char magic[sizeof(kBinaryMagic)] = {};
  in.read(magic, sizeof(magic));
  const auto magic_len = in.gcount();
  if (magic_len == sizeof(kBinaryMagic) && std::memcmp(magic, kBinaryMagic, sizeof(magic)) == 0) {
    const std::uint64_t count = get_u64_le(in);
    plan.permutation.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
      plan.permutation.push_back(static_cast<std::size_t>(get_u64_le(in)));
    }
    char extra;
    if (in.read(&extra, 1) && in.gcount() == 1) {
      throw Error(ErrorCode::FormatError, "trailing bytes after binary permutation");
    }
  } else {
    in.clear();
    in.seekg(0);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) {
        throw Error(ErrorCode::FormatError, "blank line " + std::to_string(line_no));
      }
      std::size_t value = 0;
      for (char ch : line) {
        if (ch < '0' || ch > '9') {
          throw Error(ErrorCode::FormatError,
                      "line " + std::to_string(line_no) + " is not a decimal index");
        }
        value = value * 10 + static_cast<std::size_t>(ch - '0');
      }
      plan.permutation.push_back(value);
    }
  }

  const auto validation = validate_plan(plan, plan.permutation.size());
  if (!validation.ok) {
    throw Error(ErrorCode::ValidationError, "'" + path.string() + "': " + validation.message);
  }
  return plan;
}

Manifest make_manifest(const CorpusHandle& handle, const OrderingPlan& plan) {
  Manifest manifest;
  manifest.strategy = strategy_name(plan.strategy);
  manifest.params = plan.params;
  manifest.seed = plan.seed;
  manifest.input_digest = "sha256:" + handle.sha256_hex;
  manifest.n = handle.n;
  manifest.created_at = utc_timestamp();
  return manifest;
}

std::string manifest_to_json(const Manifest& manifest) {
  nlohmann::ordered_json doc;
  doc["spec_version"] = manifest.spec_version;
  doc["strategy"] = manifest.strategy;
  doc["params"] = manifest.params;
  if (manifest.seed) {
    doc["seed"] = *manifest.seed;
  } else {
    doc["seed"] = nullptr;
  }
  doc["input_digest"] = manifest.input_digest;
  doc["n"] = manifest.n;
  doc["created_at"] = manifest.created_at;
  return doc.dump(2) + "\n";
}

Manifest materialize(const CorpusHandle& handle, const OrderingPlan& plan,
                     const std::filesystem::path& out_path) {
  if (plan.permutation.size() != handle.n) {
    throw Error(ErrorCode::DimensionError,
                "plan length " + std::to_string(plan.permutation.size()) +
                    " does not match corpus size " + std::to_string(handle.n));
  }
  const auto validation = validate_plan(plan, handle.n);
  if (!validation.ok) throw Error(ErrorCode::ValidationError, validation.message);

  const std::string digest = sha256_file(handle.source_path);
  if (digest != handle.sha256_hex) {
    throw Error(ErrorCode::StaleIndex,
                "'" + handle.source_path.string() + "' changed since it was indexed");
  }

  auto in = open_binary(handle.source_path);
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + out_path.string() + "'");

  std::string buf;
  for (std::size_t idx : plan.permutation) {
    const RecordSpan& span = handle.records[idx];
    buf.resize(span.length);
    in.seekg(static_cast<std::streamoff>(span.offset));
    in.read(buf.data(), static_cast<std::streamsize>(span.length));
    if (static_cast<std::uint64_t>(in.gcount()) != span.length) {
      throw Error(ErrorCode::IoError, "short read at offset " + std::to_string(span.offset));
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    out.put('\n');
  }
  if (!out) throw Error(ErrorCode::IoError, "write failed for '" + out_path.string() + "'");
  out.close();

  const Manifest manifest = make_manifest(handle, plan);
  const auto manifest_path = out_path.string() + ".manifest.json";
  std::ofstream mout(manifest_path, std::ios::binary);
  if (!mout) throw Error(ErrorCode::IoError, "cannot write '" + manifest_path + "'");
  mout << manifest_to_json(manifest);
  return manifest;
}

}  // namespace ordo
