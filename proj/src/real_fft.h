// src/real_fft.h

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

#ifndef USV_SRC_REAL_FFT_H_
#define USV_SRC_REAL_FFT_H_

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <span>

namespace usv {

// Forward real-to-complex transform of arbitrary length backed by FFTW.
// Plans are created once per size under a global lock (the FFTW planner is
// not re-entrant) and executed through the new-array interface, so one
// RealFft per thread is safe.
class RealFft {
 public:
  explicit RealFft(std::size_t size);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t size() const { return size_; }
  std::span<double> input() { return {in_, size_}; }
  // size/2 + 1 complex outputs, valid after execute().
  std::span<const std::complex<double>> output() const {
    return {reinterpret_cast<const std::complex<double>*>(out_), size_ / 2 + 1};
  }
  void execute();

 private:
  std::size_t size_;
  double* in_;
  fftw_complex* out_;
  fftw_plan plan_;
};

}  // namespace usv

#endif  // USV_SRC_REAL_FFT_H_
