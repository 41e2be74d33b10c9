// src/io/archive.cc

// Copyright 2026  The mbnf Authors

// See ../../LICENSE for clarification regarding multiple authors
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

#include "mbnf/io/archive.h"

#include <bit>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>

#include <fmt/format.h>
#include <zlib.h>

#include "mbnf/base/error.h"

static_assert(std::endian::native == std::endian::little,
              "archive payloads are copied as host-order little-endian");

namespace mbnf {
namespace {

std::size_t DTypeSize(DType d) { return d == DType::kF64 ? 8 : 4; }

template <typename T>
void Put(std::vector<std::uint8_t> *out, T v) {
  const auto *p = reinterpret_cast<const std::uint8_t *>(&v);
  out->insert(out->end(), p, p + sizeof(T));
}

std::uint32_t Crc(const std::uint8_t *data, std::size_t n) {
  uLong crc = crc32(0L, Z_NULL, 0);
  while (n > 0) {
    uInt chunk = static_cast<uInt>(std::min<std::size_t>(n, 1u << 30));
    crc = crc32(crc, data, chunk);
    data += chunk;
    n -= chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

class Reader {
 public:
  Reader(std::span<const std::uint8_t> bytes, const std::string &name)
      : bytes_(bytes), name_(name) {}
  template <typename T>
  T Get() {
    Need(sizeof(T));
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  void Need(std::size_t n) const {
    if (bytes_.size() - pos_ < n)
      throw IntegrityError(name_ + ": truncated at byte " + std::to_string(pos_));
  }
  std::size_t pos() const { return pos_; }
  void Skip(std::size_t n) {
    Need(n);
    pos_ += n;
  }
  bool Done() const { return pos_ == bytes_.size(); }
  const std::uint8_t *At(std::size_t p) const { return bytes_.data() + p; }

 private:
  std::span<const std::uint8_t> bytes_;
  const std::string &name_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string RecordKindName(std::uint8_t kind) {
  switch (static_cast<RecordKind>(kind)) {
    case RecordKind::kMfcc13dd: return "mfcc13dd";
    case RecordKind::kMfcc40: return "mfcc40";
    case RecordKind::kPitch3: return "pitch3";
    case RecordKind::kIvec: return "ivec";
    case RecordKind::kBnf: return "bnf";
    case RecordKind::kCombined: return "combined";
    case RecordKind::kMfcc13: return "mfcc13";
    case RecordKind::kAlign: return "align";
    case RecordKind::kNetSpec: return "net-spec";
    case RecordKind::kNetParams: return "net";
    case RecordKind::kGmm: return "gmm";
    case RecordKind::kTMatrix: return "tmatrix";
    case RecordKind::kAudio: return "audio";
    case RecordKind::kMeta: return "meta";
  }
  return "kind" + std::to_string(kind);
}

Record Record::FromMatrix(std::string key, RecordKind kind, const Matrix &m, DType dtype) {
  if (dtype == DType::kU32) throw ValidationError("FromMatrix: use FromU32 for integer data");
  Record r;
  r.key = std::move(key);
  r.kind = static_cast<std::uint8_t>(kind);
  r.rows = static_cast<std::uint32_t>(m.NumRows());
  r.cols = static_cast<std::uint32_t>(m.NumCols());
  r.dtype = dtype;
  r.payload.reserve(m.Size() * DTypeSize(dtype));
  for (double v : m.Values()) {
    if (dtype == DType::kF64)
      Put(&r.payload, v);
    else
      Put(&r.payload, static_cast<float>(v));
  }
  return r;
}

Record Record::FromU32(std::string key, RecordKind kind, std::uint32_t rows, std::uint32_t cols,
                       std::span<const std::uint32_t> values) {
  if (static_cast<std::size_t>(rows) * cols != values.size())
    throw DimensionError("FromU32: " + std::to_string(values.size()) + " values for " +
                         std::to_string(rows) + "x" + std::to_string(cols));
  Record r;
  r.key = std::move(key);
  r.kind = static_cast<std::uint8_t>(kind);
  r.rows = rows;
  r.cols = cols;
  r.dtype = DType::kU32;
  for (std::uint32_t v : values) Put(&r.payload, v);
  return r;
}

Matrix Record::ToMatrix() const {
  if (dtype == DType::kU32) throw ValidationError("record " + key + " holds integers");
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < m.Size(); i++) {
    if (dtype == DType::kF64) {
      std::memcpy(&m.Data()[i], payload.data() + 8 * i, 8);
    } else {
      float f;
      std::memcpy(&f, payload.data() + 4 * i, 4);
      m.Data()[i] = f;
    }
  }
  return m;
}

std::vector<std::uint32_t> Record::ToU32() const {
  if (dtype != DType::kU32) throw ValidationError("record " + key + " does not hold integers");
  std::vector<std::uint32_t> out(static_cast<std::size_t>(rows) * cols);
  std::memcpy(out.data(), payload.data(), out.size() * 4);
  return out;
}

std::vector<std::uint8_t> SerializeArchive(const std::vector<Record> &records) {
  std::vector<std::uint8_t> out(std::begin(kArchiveMagic), std::end(kArchiveMagic));
  Put(&out, kArchiveVersion);
  for (const Record &r : records) {
    if (r.key.empty() || r.key.size() > 0xffff)
      throw ValidationError("archive key must have 1..65535 bytes");
    if (r.payload.size() != static_cast<std::size_t>(r.rows) * r.cols * DTypeSize(r.dtype))
      throw InternalError("record " + r.key + ": payload size does not match shape");
    const std::size_t start = out.size();
    Put(&out, static_cast<std::uint16_t>(r.key.size()));
    out.insert(out.end(), r.key.begin(), r.key.end());
    Put(&out, r.kind);
    Put(&out, r.rows);
    Put(&out, r.cols);
    Put(&out, static_cast<std::uint8_t>(r.dtype));
    out.insert(out.end(), r.payload.begin(), r.payload.end());
    Put(&out, Crc(out.data() + start, out.size() - start));
  }
  return out;
}

std::vector<Record> ParseArchive(std::span<const std::uint8_t> bytes, const std::string &name) {
  Reader in(bytes, name);
  in.Need(8);
  if (std::memcmp(bytes.data(), kArchiveMagic, 4) != 0)
    throw IntegrityError(name + ": bad magic (not an MBNA archive)");
  in.Skip(4);
  const auto version = in.Get<std::uint32_t>();
  if (version != kArchiveVersion)
    throw IntegrityError(name + ": unsupported archive version " + std::to_string(version));
  std::vector<Record> out;
  std::map<std::pair<std::uint8_t, std::string>, bool> seen;
  while (!in.Done()) {
    const std::size_t start = in.pos();
    Record r;
    const auto key_len = in.Get<std::uint16_t>();
    in.Need(key_len);
    r.key.assign(reinterpret_cast<const char *>(in.At(in.pos())), key_len);
    in.Skip(key_len);
    r.kind = in.Get<std::uint8_t>();
    r.rows = in.Get<std::uint32_t>();
    r.cols = in.Get<std::uint32_t>();
    const auto dtype = in.Get<std::uint8_t>();
    if (dtype > 2)
      throw IntegrityError(name + ": record " + r.key + " has unknown dtype " +
                           std::to_string(dtype));
    r.dtype = static_cast<DType>(dtype);
    const std::size_t n = static_cast<std::size_t>(r.rows) * r.cols * DTypeSize(r.dtype);
    in.Need(n);
    r.payload.assign(in.At(in.pos()), in.At(in.pos()) + n);
    in.Skip(n);
    const std::uint32_t expect = Crc(in.At(start), in.pos() - start);
    if (in.Get<std::uint32_t>() != expect)
      throw IntegrityError(name + ": checksum mismatch in record " + r.key + " (" +
                           RecordKindName(r.kind) + ")");
    if (seen[{r.kind, r.key}])
      throw IntegrityError(name + ": duplicate key " + r.key + " for kind " +
                           RecordKindName(r.kind));
    seen[{r.kind, r.key}] = true;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<Record> ReadArchive(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open archive " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return ParseArchive(bytes, path);
}

void ArchiveWriter::Add(Record record) {
  auto id = std::make_pair(record.kind, record.key);
  if (seen_[id])
    throw ValidationError(path_ + ": duplicate key " + record.key + " for kind " +
                          RecordKindName(record.kind));
  seen_[id] = true;
  records_.push_back(std::move(record));
}

void ArchiveWriter::Commit() {
  std::vector<std::uint8_t> bytes = SerializeArchive(records_);
  const std::string tmp = path_ + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp);
    out.write(reinterpret_cast<const char *>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DataError("write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path_);
}

Archive::Archive(const std::string &path) : path_(path), records_(ReadArchive(path)) {
  for (std::size_t i = 0; i < records_.size(); i++)
    index_[{records_[i].kind, records_[i].key}] = i;
}

const Record *Archive::Find(const std::string &key, RecordKind kind) const {
  auto it = index_.find({static_cast<std::uint8_t>(kind), key});
  return it == index_.end() ? nullptr : &records_[it->second];
}

const Record &Archive::Require(const std::string &key, RecordKind kind) const {
  const Record *r = Find(key, kind);
  if (!r)
    throw DataError(path_ + ": no " + RecordKindName(static_cast<std::uint8_t>(kind)) +
                    " record for " + key);
  return *r;
}

std::vector<const Record *> Archive::OfKind(RecordKind kind) const {
  std::vector<const Record *> out;
  for (const Record &r : records_)
    if (r.kind == static_cast<std::uint8_t>(kind)) out.push_back(&r);
  return out;
}

std::string FileChecksum(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return fmt::format("{:08x}", Crc(bytes.data(), bytes.size()));
}

}  // namespace mbnf
