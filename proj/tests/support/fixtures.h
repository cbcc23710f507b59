// SPDX-FileCopyrightText: (c) 2026 The semx Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "semx/corpus.h"
#include "semx/fixture.h"

namespace semx::fixtures {

/// Directory holding hand-written test inputs.
std::filesystem::path data_dir();

/// Hand encoding of the segmented COCO image with two women.
std::filesystem::path fig2_path();

/// Entity helper: id, names, attributes, one synset per name.
EntityRecord entity(const std::string& id, const std::vector<std::string>& names,
                    const std::vector<std::string>& attributes = {});

ExpressionRecord caption(const std::string& id, const std::string& text);
ExpressionRecord refexp(const std::string& id, const std::string& text, const std::string& target);
ExpressionRecord paragraph(const std::string& id, const std::string& text);

/// Three images A={cat,dog}, B={cat}, C={sofa}, one distinct caption each.
Corpus abc_corpus();

/// Desk with four grounded computer monitors in one plural region.
ImageRecord desk_image();

/// Three images of 36 entities each and 29 regions, 2 of them plural.
Corpus planted_stats_corpus();

/// Scene fixture for the end-to-end experiment: each image holds one scene
/// anchor type that co-occurs with certainty with one mentioned and four
/// silent types. Silent types never reach captions.
FixtureConfig scene_fixture_config(std::uint64_t seed, int n_images);

/// Unique temporary directory removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace semx::fixtures
