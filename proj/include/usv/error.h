// include/usv/error.h

// Copyright 2026  The usvctx Authors
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

#ifndef USV_ERROR_H_
#define USV_ERROR_H_

#include <stdexcept>
#include <string>

namespace usv {

// Base of every error raised by the toolkit. Stages catch this to apply the
// per-file tolerance policy; anything else is treated as a bug.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define USV_DEFINE_ERROR(Name)            \
  class Name : public Error {             \
   public:                                \
    using Error::Error;                   \
  }

// audio_io
USV_DEFINE_ERROR(MalformedWav);
USV_DEFINE_ERROR(UnsupportedFormat);
USV_DEFINE_ERROR(ClipTooLong);
USV_DEFINE_ERROR(IoError);

// spectral
USV_DEFINE_ERROR(ClipTooShort);

// pitch_features
USV_DEFINE_ERROR(EmptyVoicedSet);

// corpus
USV_DEFINE_ERROR(SchemaMismatch);
USV_DEFINE_ERROR(ParseError);

// partition
USV_DEFINE_ERROR(TooFewEmitters);

// classifier
USV_DEFINE_ERROR(SingleClassData);

// evaluation
USV_DEFINE_ERROR(EmptyPredictions);

// synth_fixtures
USV_DEFINE_ERROR(SpecOutOfRange);

// cli
USV_DEFINE_ERROR(ConfigError);

#undef USV_DEFINE_ERROR

}  // namespace usv

#endif  // USV_ERROR_H_
