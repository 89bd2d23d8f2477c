// Copyright 2026 cmaf authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Checkpoint format "CMAF" v1, little-endian:
//   magic, version u16,
//   dims: 9 x u32 (channels, eeg_features, lstm_hidden, attention_dim,
//                  music_dim, music_hidden, music_layers, common_dim,
//                  disc_hidden),
//   standardizer: dim u32, mean f64[dim], stddev f64[dim],
//   parameters: per tensor in ModelParams order, count u32 then f64[count].

#include "cmaf/binio.hpp"
#include "cmaf/error.hpp"
#include "cmaf/model.hpp"

namespace cmaf::model {

namespace {
constexpr std::uint16_t kCheckpointVersion = 1;
}

void save_checkpoint(const std::string& path, ModelParams& params,
                     const data::Standardizer& standardizer) {
  binio::Writer w(path);
  w.magic("CMAF");
  w.u16(kCheckpointVersion);
  const Dims& d = params.dims;
  for (std::size_t v : {d.channels, d.eeg_features, d.lstm_hidden,
                        d.attention_dim, d.music_dim, d.music_hidden,
                        d.music_layers, d.common_dim, d.disc_hidden})
    w.u32(static_cast<std::uint32_t>(v));
  w.u32(static_cast<std::uint32_t>(standardizer.dim()));
  w.f64_array(standardizer.mean.data(), standardizer.dim());
  w.f64_array(standardizer.stddev.data(), standardizer.dim());
  params.visit([&](const std::string&, ad::Tensor& t) {
    w.u32(static_cast<std::uint32_t>(t.numel()));
    w.f64_array(t.data.data(), t.numel());
  });
  w.close("save_checkpoint");
}

Checkpoint load_checkpoint(const std::string& path) {
  binio::Reader r(path, "checkpoint");
  r.expect_magic("CMAF");
  const auto version = r.u16("version");
  check(version == kCheckpointVersion, path, ": unsupported checkpoint version ",
        version);
  Dims d;
  d.channels = r.u32("channels");
  d.eeg_features = r.u32("eeg_features");
  d.lstm_hidden = r.u32("lstm_hidden");
  d.attention_dim = r.u32("attention_dim");
  d.music_dim = r.u32("music_dim");
  d.music_hidden = r.u32("music_hidden");
  d.music_layers = r.u32("music_layers");
  d.common_dim = r.u32("common_dim");
  d.disc_hidden = r.u32("disc_hidden");

  Checkpoint ck;
  const auto sdim = r.u32("standardizer dim");
  ck.standardizer.mean.resize(sdim);
  ck.standardizer.stddev.resize(sdim);
  r.f64_array(ck.standardizer.mean.data(), sdim, "standardizer mean");
  r.f64_array(ck.standardizer.stddev.data(), sdim, "standardizer stddev");

  // Shapes come from dims; init then overwrite keeps the enumeration order
  // authoritative.
  ck.params = init_params(d, 0);
  ck.params.visit([&](const std::string& name, ad::Tensor& t) {
    const auto count = r.u32((name + " count").c_str());
    check(count == t.numel(), path, ": parameter ", name, " has ", count,
          " values, expected ", t.numel());
    r.f64_array(t.data.data(), t.numel(), name.c_str());
  });
  return ck;
}

}  // namespace cmaf::model
