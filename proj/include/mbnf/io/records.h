// include/mbnf/io/records.h

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

#ifndef MBNF_IO_RECORDS_H_
#define MBNF_IO_RECORDS_H_

#include <string>
#include <vector>

#include "mbnf/corpus/alignment.h"
#include "mbnf/dsp/audio.h"
#include "mbnf/dsp/feature-matrix.h"
#include "mbnf/gmm/diag-gmm.h"
#include "mbnf/gmm/ivector.h"
#include "mbnf/io/archive.h"
#include "mbnf/nnet/block-softmax-net.h"

namespace mbnf {

// Feature matrices: f64, kind = FeatureKind, key = utt_id.
Record FeatureRecord(const FeatureMatrix &feats);
FeatureMatrix FeatureFromRecord(const Record &r);
FeatureMatrix LoadFeatures(const Archive &archive, const std::string &utt_id, FeatureKind kind);

// Alignments: u32, frames x 2 with columns (language index, block-local
// state). The utterance-level language is recovered as the common frame
// language, or -1 when frames disagree.
Record AlignRecord(const AlignmentMatrix &ali);
AlignmentMatrix AlignFromRecord(const Record &r);

// GMM: f64, components x (1 + 2 dim), rows (weight, means, variances).
Record GmmRecord(const std::string &key, const DiagGmm &gmm);
DiagGmm GmmFromRecord(const Record &r);

// Total-variability model: GMM record "ubm" and a tmatrix record "t".
std::vector<Record> TvModelRecords(const TvModel &model);
TvModel TvModelFromArchive(const Archive &archive);

// Audio: f32 samples x 1, plus one meta record "sample_rate" (u32 1 x 1) per
// archive; all segments of an archive share that rate.
void WriteAudioArchive(const std::string &path, const std::vector<AudioSegment> &audio);
AudioSegment LoadAudio(const Archive &archive, const std::string &utt_id);

// Net: a net-spec record "spec" (u32; word 0 is the byte length of the JSON
// text that follows, packed four bytes per word) and a net record "params"
// (f64, 1 x n): input shift, input scale, then the matrices of
// BlockSoftmaxNet::Params() in row-major order.
std::vector<Record> NetRecords(const BlockSoftmaxNet &net);
BlockSoftmaxNet NetFromArchive(const Archive &archive);

}  // namespace mbnf

#endif  // MBNF_IO_RECORDS_H_
