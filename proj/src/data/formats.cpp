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
// On-disk formats:
//   EEG recording  "EEGX": version u16, subject u16, trial u16, channels u16,
//                  samples u32, sample_rate f32, valence f32, arousal f32,
//                  then channels*samples f32, channel-major.
//   Embeddings     "MEMB": version u16, track u16, n_segments u16, dim u16,
//                  valence_tag u8, arousal_tag u8, then n_segments*dim f32,
//                  segment-major.
//   Manifest       CSV with header subject,trial,track,eeg_path,emb_path,
//                  valence_rating,arousal_rating,valence_tag,arousal_tag.
// All binary values little-endian.

#include <filesystem>
#include <fstream>

#include "cmaf/binio.hpp"
#include "cmaf/data.hpp"
#include "cmaf/error.hpp"

namespace cmaf::data {

namespace {

constexpr std::uint16_t kFormatVersion = 1;

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

void save_recording(const signal::Recording& rec, const std::string& path) {
  rec.validate();
  check(rec.channels <= 0xffff, "save_recording: too many channels");
  binio::Writer w(path);
  w.magic("EEGX");
  w.u16(kFormatVersion);
  w.u16(static_cast<std::uint16_t>(rec.subject_id));
  w.u16(static_cast<std::uint16_t>(rec.trial_id));
  w.u16(static_cast<std::uint16_t>(rec.channels));
  w.u32(static_cast<std::uint32_t>(rec.samples));
  w.f32(static_cast<float>(rec.sample_rate));
  w.f32(static_cast<float>(rec.valence));
  w.f32(static_cast<float>(rec.arousal));
  w.f32_array(rec.data.data(), rec.data.size());
  w.close("save_recording");
}

signal::Recording load_recording(const std::string& path) {
  binio::Reader r(path, "EEG recording");
  r.expect_magic("EEGX");
  const auto version = r.u16("version");
  check(version == kFormatVersion, path, ": unsupported EEGX version ", version);
  signal::Recording rec;
  rec.subject_id = r.u16("subject_id");
  rec.trial_id = r.u16("trial_id");
  rec.channels = r.u16("channels");
  rec.samples = r.u32("samples");
  rec.sample_rate = r.f32("sample_rate_hz");
  rec.valence = r.f32("valence");
  rec.arousal = r.f32("arousal");
  check(rec.channels >= 1, path, ": channels must be >= 1");
  check(rec.samples >= 1, path, ": samples must be >= 1");
  rec.data.resize(rec.channels * rec.samples);
  r.f32_array(rec.data.data(), rec.data.size(), "sample matrix");
  rec.validate(1.0);
  return rec;
}

void save_embeddings(const TrackEmbeddingSet& emb, const std::string& path) {
  check(emb.values.size() == emb.segments * emb.dim,
        "save_embeddings: values size ", emb.values.size(),
        " != segments*dim");
  check(emb.segments <= 0xffff && emb.dim <= 0xffff,
        "save_embeddings: dimensions exceed u16");
  binio::Writer w(path);
  w.magic("MEMB");
  w.u16(kFormatVersion);
  w.u16(static_cast<std::uint16_t>(emb.track_id));
  w.u16(static_cast<std::uint16_t>(emb.segments));
  w.u16(static_cast<std::uint16_t>(emb.dim));
  w.u8(emb.valence_tag ? 1 : 0);
  w.u8(emb.arousal_tag ? 1 : 0);
  w.f32_array(emb.values.data(), emb.values.size());
  w.close("save_embeddings");
}

TrackEmbeddingSet load_embeddings(const std::string& path) {
  binio::Reader r(path, "music embedding");
  r.expect_magic("MEMB");
  const auto version = r.u16("version");
  check(version == kFormatVersion, path, ": unsupported MEMB version ", version);
  TrackEmbeddingSet emb;
  emb.track_id = r.u16("track_id");
  emb.segments = r.u16("n_segments");
  emb.dim = r.u16("dim");
  emb.valence_tag = r.u8("valence_tag");
  emb.arousal_tag = r.u8("arousal_tag");
  check(emb.segments >= 1, path, ": n_segments must be >= 1");
  check(emb.dim >= 1, path, ": dim must be >= 1");
  check(emb.valence_tag <= 1 && emb.arousal_tag <= 1, path,
        ": tags must be 0/1");
  emb.values.resize(emb.segments * emb.dim);
  r.f32_array(emb.values.data(), emb.values.size(), "embedding matrix");
  return emb;
}

static const char* kManifestHeader =
    "subject,trial,track,eeg_path,emb_path,valence_rating,arousal_rating,"
    "valence_tag,arousal_tag";

void save_manifest(const Manifest& m, const std::string& path) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream os(path, std::ios::trunc);
  check(os.good(), "cannot open for writing: ", path);
  os.precision(10);
  os << kManifestHeader << "\n";
  for (const auto& e : m.entries) {
    os << e.subject << ',' << e.trial << ',' << e.track << ',' << e.eeg_path
       << ',' << e.emb_path << ',' << e.valence_rating << ','
       << e.arousal_rating << ',' << e.valence_tag << ',' << e.arousal_tag
       << "\n";
  }
  check(os.good(), "write failed: ", path);
}

Manifest load_manifest(const std::string& path) {
  std::ifstream is(path);
  check(is.good(), "manifest not found or unreadable: ", path);
  Manifest m;
  m.base_dir = std::filesystem::path(path).parent_path().string();
  std::string line;
  check(static_cast<bool>(std::getline(is, line)), path, ": empty manifest");
  {
    auto header = split_csv(line);
    auto expected = split_csv(kManifestHeader);
    check(header == expected, path, ": bad manifest header '", line,
          "', expected '", kManifestHeader, "'");
  }
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto f = split_csv(line);
    check(f.size() == 9, path, ":", lineno, ": expected 9 fields, got ",
          f.size());
    ManifestEntry e;
    try {
      e.subject = std::stoi(f[0]);
      e.trial = std::stoi(f[1]);
      e.track = std::stoi(f[2]);
      e.eeg_path = f[3];
      e.emb_path = f[4];
      e.valence_rating = std::stod(f[5]);
      e.arousal_rating = std::stod(f[6]);
      e.valence_tag = std::stoi(f[7]);
      e.arousal_tag = std::stoi(f[8]);
    } catch (const std::exception&) {
      fail(path, ":", lineno, ": unparseable record '", line, "'");
    }
    check(e.valence_tag == 0 || e.valence_tag == 1, path, ":", lineno,
          ": valence_tag must be 0/1");
    check(e.arousal_tag == 0 || e.arousal_tag == 1, path, ":", lineno,
          ": arousal_tag must be 0/1");
    check(!e.eeg_path.empty(), path, ":", lineno, ": missing eeg_path");
    check(!e.emb_path.empty(), path, ":", lineno, ": missing emb_path");
    m.entries.push_back(std::move(e));
  }
  check(!m.entries.empty(), path, ": manifest has no entries");
  return m;
}

}  // namespace cmaf::data
