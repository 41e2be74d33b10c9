// src/corpus/corpus.cc

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

#include "mbnf/corpus/corpus.h"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "mbnf/base/error.h"

namespace mbnf {

LanguageInventory::LanguageInventory(const std::vector<std::string> &codes) {
  for (const auto &code : codes) {
    if (code.empty())
      throw ValidationError("empty language code");
    if (!index_.emplace(code, static_cast<int>(codes_.size())).second)
      throw ValidationError("duplicate language code '" + code + "'");
    codes_.push_back(code);
  }
}

LanguageId LanguageInventory::At(std::size_t index) const {
  if (index >= codes_.size())
    throw InternalError("language index " + std::to_string(index) + " out of range");
  return LanguageId{codes_[index], static_cast<int>(index)};
}

std::optional<LanguageId> LanguageInventory::Find(const std::string &code) const {
  auto it = index_.find(code);
  if (it == index_.end()) return std::nullopt;
  return LanguageId{code, it->second};
}

LanguageId LanguageInventory::Require(const std::string &code) const {
  auto id = Find(code);
  if (!id) throw ValidationError("language '" + code + "' is not in the inventory");
  return *id;
}

PhoneSet::PhoneSet(LanguageId lang, std::vector<std::string> phones,
                   int states_per_phone)
    : lang_(std::move(lang)), phones_(std::move(phones)),
      states_per_phone_(states_per_phone) {
  if (states_per_phone_ < 1)
    throw ConfigError("states_per_phone must be positive");
  if (phones_.empty())
    throw ConfigError("phone set of '" + lang_.code + "' is empty");
  for (std::size_t i = 0; i < phones_.size(); i++) {
    if (!index_.emplace(phones_[i], static_cast<int>(i)).second)
      throw ValidationError("duplicate phone '" + phones_[i] + "' in '" +
                            lang_.code + "'");
  }
}

std::optional<int> PhoneSet::PhoneIndex(const std::string &phone) const {
  auto it = index_.find(phone);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int PhoneSet::RequirePhone(const std::string &phone) const {
  auto i = PhoneIndex(phone);
  if (!i)
    throw ValidationError("phone '" + phone + "' not in the phone set of '" +
                          lang_.code + "'");
  return *i;
}

namespace {

using nlohmann::json;

template <class T>
std::vector<T> ParsePairs(const json &arr, const char *key, std::size_t line_no) {
  std::vector<T> out;
  if (!arr.is_array())
    throw ParseError("line " + std::to_string(line_no) + ": '" + key +
                     "' is not an array");
  for (const auto &pair : arr) {
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() ||
        !pair[1].is_string())
      throw ParseError("line " + std::to_string(line_no) + ": entries of '" + key +
                       "' must be [symbol, lang] string pairs");
    out.push_back(T{pair[0].get<std::string>(), pair[1].get<std::string>()});
  }
  return out;
}

}  // namespace

std::vector<UtteranceRecord> ParseManifest(std::istream &is) {
  std::vector<UtteranceRecord> records;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    line_no++;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error &e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!obj.is_object())
      throw ParseError("line " + std::to_string(line_no) + ": not a JSON object");
    UtteranceRecord rec;
    auto id = obj.find("utt_id");
    if (id == obj.end() || !id->is_string())
      throw ParseError("line " + std::to_string(line_no) + ": missing string utt_id");
    rec.utt_id = id->get<std::string>();
    if (rec.utt_id.empty())
      throw ValidationError("line " + std::to_string(line_no) + ": empty utt_id");
    if (auto a = obj.find("audio"); a != obj.end()) {
      if (!a->is_string())
        throw ParseError("line " + std::to_string(line_no) + ": 'audio' is not a string");
      rec.audio_ref = a->get<std::string>();
    }
    auto tokens = obj.find("tokens");
    if (tokens == obj.end())
      throw ParseError("line " + std::to_string(line_no) + ": missing 'tokens'");
    rec.tokens = ParsePairs<Token>(*tokens, "tokens", line_no);
    if (auto p = obj.find("phones"); p != obj.end())
      rec.phones = ParsePairs<PhoneToken>(*p, "phones", line_no);
    if (!seen.insert(rec.utt_id).second)
      throw ValidationError("line " + std::to_string(line_no) + ": duplicate utt_id '" +
                            rec.utt_id + "'");
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<UtteranceRecord> LoadManifest(const std::string &path) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open manifest " + path);
  return ParseManifest(is);
}

void WriteManifest(std::ostream &os, const std::vector<UtteranceRecord> &records) {
  for (const auto &rec : records) {
    nlohmann::ordered_json obj;
    obj["utt_id"] = rec.utt_id;
    if (!rec.audio_ref.empty()) obj["audio"] = rec.audio_ref;
    obj["tokens"] = nlohmann::ordered_json::array();
    for (const auto &t : rec.tokens) obj["tokens"].push_back({t.word, t.lang});
    if (!rec.phones.empty()) {
      obj["phones"] = nlohmann::ordered_json::array();
      for (const auto &p : rec.phones) obj["phones"].push_back({p.phone, p.lang});
    }
    os << obj.dump() << '\n';
  }
}

void SaveManifest(const std::string &path, const std::vector<UtteranceRecord> &records) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot write manifest " + path);
  WriteManifest(os, records);
  if (!os) throw DataError("write failed for " + path);
}

void CheckLanguageClosure(const std::vector<UtteranceRecord> &records,
                          const LanguageInventory &inventory) {
  for (const auto &rec : records) {
    for (const auto &t : rec.tokens)
      if (!inventory.Find(t.lang))
        throw ValidationError(rec.utt_id + ": token language '" + t.lang +
                              "' is not in the inventory");
    for (const auto &p : rec.phones)
      if (!inventory.Find(p.lang))
        throw ValidationError(rec.utt_id + ": phone language '" + p.lang +
                              "' is not in the inventory");
  }
}

LanguageInventory InventoryFromRecords(const std::vector<UtteranceRecord> &records) {
  std::vector<std::string> codes;
  std::set<std::string> seen;
  auto add = [&](const std::string &c) {
    if (seen.insert(c).second) codes.push_back(c);
  };
  for (const auto &rec : records) {
    for (const auto &t : rec.tokens) add(t.lang);
    for (const auto &p : rec.phones) add(p.lang);
  }
  return LanguageInventory(codes);
}

std::vector<PhoneSet> DerivePhoneSets(const std::vector<UtteranceRecord> &records,
                                      const LanguageInventory &inventory,
                                      int states_per_phone) {
  std::vector<std::set<std::string>> phones(inventory.Size());
  for (const auto &rec : records)
    for (const auto &p : rec.phones)
      phones[inventory.Require(p.lang).index].insert(p.phone);
  std::vector<PhoneSet> sets;
  for (std::size_t l = 0; l < inventory.Size(); l++) {
    if (phones[l].empty())
      throw DataError("no phone transcripts for language '" + inventory.Codes()[l] + "'");
    sets.emplace_back(inventory.At(l),
                      std::vector<std::string>(phones[l].begin(), phones[l].end()),
                      states_per_phone);
  }
  return sets;
}

}  // namespace mbnf
