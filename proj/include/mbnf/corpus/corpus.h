// include/mbnf/corpus/corpus.h

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

#ifndef MBNF_CORPUS_CORPUS_H_
#define MBNF_CORPUS_CORPUS_H_

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace mbnf {

struct LanguageId {
  std::string code;  // e.g. "zul", "eng"
  int index = -1;    // position in the configured language list

  bool operator==(const LanguageId &) const = default;
};

// A word (or, in synthetic transcripts, a phone) carrying a language tag.
struct Token {
  std::string word;
  std::string lang;

  bool operator==(const Token &) const = default;
};

struct PhoneToken {
  std::string phone;
  std::string lang;

  bool operator==(const PhoneToken &) const = default;
};

struct UtteranceRecord {
  std::string utt_id;
  // WAV path, or "<archive>#<key>" for audio stored in an archive.
  std::string audio_ref;
  std::vector<Token> tokens;
  std::vector<PhoneToken> phones;

  bool operator==(const UtteranceRecord &) const = default;
};

// Code -> index map of the languages a corpus may use.
class LanguageInventory {
 public:
  LanguageInventory() = default;
  explicit LanguageInventory(const std::vector<std::string> &codes);

  std::size_t Size() const { return codes_.size(); }
  const std::vector<std::string> &Codes() const { return codes_; }
  LanguageId At(std::size_t index) const;
  std::optional<LanguageId> Find(const std::string &code) const;
  // Throws ValidationError for an unknown code.
  LanguageId Require(const std::string &code) const;

 private:
  std::vector<std::string> codes_;
  std::map<std::string, int> index_;
};

class PhoneSet {
 public:
  PhoneSet() = default;
  PhoneSet(LanguageId lang, std::vector<std::string> phones, int states_per_phone = 3);

  const LanguageId &lang() const { return lang_; }
  const std::vector<std::string> &phones() const { return phones_; }
  int states_per_phone() const { return states_per_phone_; }
  int NumPhones() const { return static_cast<int>(phones_.size()); }
  // Number of phone-state output units of this language's softmax block.
  int BlockSize() const { return NumPhones() * states_per_phone_; }
  std::optional<int> PhoneIndex(const std::string &phone) const;
  // Throws ValidationError for a phone not in the set.
  int RequirePhone(const std::string &phone) const;

 private:
  LanguageId lang_;
  std::vector<std::string> phones_;
  std::map<std::string, int> index_;
  int states_per_phone_ = 3;
};

// Manifest: one JSON object per line with keys utt_id, audio, tokens, phones.
std::vector<UtteranceRecord> ParseManifest(std::istream &is);
std::vector<UtteranceRecord> LoadManifest(const std::string &path);
void WriteManifest(std::ostream &os, const std::vector<UtteranceRecord> &records);
void SaveManifest(const std::string &path, const std::vector<UtteranceRecord> &records);

// Every token and phone language must be in the inventory.
void CheckLanguageClosure(const std::vector<UtteranceRecord> &records,
                          const LanguageInventory &inventory);

// Languages in order of first appearance in the records.
LanguageInventory InventoryFromRecords(const std::vector<UtteranceRecord> &records);

// Per-language phone sets (sorted phone symbols) from the phone transcripts.
std::vector<PhoneSet> DerivePhoneSets(const std::vector<UtteranceRecord> &records,
                                      const LanguageInventory &inventory,
                                      int states_per_phone = 3);

}  // namespace mbnf

#endif  // MBNF_CORPUS_CORPUS_H_
