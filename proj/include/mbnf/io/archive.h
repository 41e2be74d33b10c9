// include/mbnf/io/archive.h

// Copyright 2026  The mbnf Authors

// See ../../../LICENSE for clarification regarding multiple authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef MBNF_IO_ARCHIVE_H_
#define MBNF_IO_ARCHIVE_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mbnf/base/matrix.h"

namespace mbnf {

// Container layout (little-endian):
//   "MBNA" u32 version(=1)
//   then per record:
//   [key_len u16][key][kind u8][rows u32][cols u32][dtype u8][payload][crc32 u32]
// The crc covers every byte of the record before it.
inline constexpr char kArchiveMagic[4] = {'M', 'B', 'N', 'A'};
inline constexpr std::uint32_t kArchiveVersion = 1;

enum class DType : std::uint8_t { kF32 = 0, kF64 = 1, kU32 = 2 };

// Feature kinds reuse their FeatureKind value.
enum class RecordKind : std::uint8_t {
  kMfcc13dd = 1,
  kMfcc40 = 2,
  kPitch3 = 3,
  kIvec = 4,
  kBnf = 5,
  kCombined = 6,
  kMfcc13 = 14,
  kAlign = 16,
  kNetSpec = 17,
  kNetParams = 18,
  kGmm = 19,
  kTMatrix = 20,
  kAudio = 21,
  kMeta = 31,
};

std::string RecordKindName(std::uint8_t kind);

struct Record {
  std::string key;
  std::uint8_t kind = 0;
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  DType dtype = DType::kF64;
  std::vector<std::uint8_t> payload;

  static Record FromMatrix(std::string key, RecordKind kind, const Matrix &m,
                           DType dtype = DType::kF64);
  static Record FromU32(std::string key, RecordKind kind, std::uint32_t rows, std::uint32_t cols,
                        std::span<const std::uint32_t> values);

  // Float payloads as doubles; throws ValidationError for u32 records.
  Matrix ToMatrix() const;
  // Throws ValidationError unless dtype is u32.
  std::vector<std::uint32_t> ToU32() const;

  bool operator==(const Record &) const = default;
};

// Serializes records into memory and publishes them with an atomic rename.
// Keys must be unique per kind.
class ArchiveWriter {
 public:
  explicit ArchiveWriter(std::string path) : path_(std::move(path)) {}
  void Add(Record record);
  std::size_t Size() const { return records_.size(); }
  // Writes path.tmp, then renames onto path.
  void Commit();

 private:
  std::string path_;
  std::vector<Record> records_;
  std::map<std::pair<std::uint8_t, std::string>, bool> seen_;
};

// Full read with magic, version, length and checksum verification; any
// violation is an IntegrityError. A missing file is a DataError.
std::vector<Record> ReadArchive(const std::string &path);
std::vector<std::uint8_t> SerializeArchive(const std::vector<Record> &records);
std::vector<Record> ParseArchive(std::span<const std::uint8_t> bytes, const std::string &name);

class Archive {
 public:
  Archive() = default;
  explicit Archive(const std::string &path);

  const std::vector<Record> &records() const { return records_; }
  const Record *Find(const std::string &key, RecordKind kind) const;
  // Throws DataError naming the archive when absent.
  const Record &Require(const std::string &key, RecordKind kind) const;
  std::vector<const Record *> OfKind(RecordKind kind) const;

 private:
  std::string path_;
  std::vector<Record> records_;
  std::map<std::pair<std::uint8_t, std::string>, std::size_t> index_;
};

// Hex crc32 of the whole file.
std::string FileChecksum(const std::string &path);

}  // namespace mbnf

#endif  // MBNF_IO_ARCHIVE_H_
