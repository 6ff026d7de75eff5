// Copyright 2026 The SeedForge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "seedforge/corpus_model.h"

#include <random>
#include <set>

#include "gtest/gtest.h"
#include "oracles.h"
#include "seedforge/signature_table.h"

namespace seedforge {
namespace {

using ::seedforge::testing::FakeSeed;

const std::string kPngHeader("\x89PNG\r\n\x1a\n", 8);

FileTypeSpec PngSpec() {
  return *SignatureTable::Bundled().SpecForExtension("png");
}

TEST(MagicSignatureTest, ParsesOffsetAndHex) {
  auto sig = ParseMagicSignature("8:57415645");
  ASSERT_TRUE(sig.ok()) << sig.status();
  EXPECT_EQ(sig->offset, 8u);
  EXPECT_EQ(sig->bytes, "WAVE");
  EXPECT_EQ(sig->ToString(), "8:57415645");
}

TEST(MagicSignatureTest, WildcardBytesMatchAnything) {
  auto sig = ParseMagicSignature("0:52494646????????57415645");
  ASSERT_TRUE(sig.ok()) << sig.status();
  EXPECT_TRUE(sig->Matches(std::string("RIFF\x01\x02\x03\x04WAVEfmt ", 16)));
  EXPECT_TRUE(sig->Matches(std::string("RIFF\0\0\0\0WAVE", 12)));
  EXPECT_FALSE(sig->Matches(std::string("RIFF\0\0\0\0WEBP", 12)));
  EXPECT_EQ(sig->ToString(), "0:52494646????????57415645");
}

TEST(MagicSignatureTest, RejectsMalformed) {
  EXPECT_FALSE(ParseMagicSignature("").ok());
  EXPECT_FALSE(ParseMagicSignature("0:").ok());
  EXPECT_FALSE(ParseMagicSignature("0:ABC").ok());
  EXPECT_FALSE(ParseMagicSignature("x:AB").ok());
  EXPECT_FALSE(ParseMagicSignature("-1:AB").ok());
  EXPECT_FALSE(ParseMagicSignature("0:GG").ok());
}

TEST(MagicSignatureTest, ShortContentNeverMatches) {
  auto sig = ParseMagicSignature("0:89504E470D0A1A0A");
  ASSERT_TRUE(sig.ok());
  EXPECT_FALSE(sig->Matches(kPngHeader.substr(0, 7)));
  EXPECT_TRUE(sig->Matches(kPngHeader));
}

TEST(ExtensionOfTest, LastComponentOnly) {
  EXPECT_EQ(ExtensionOf("dir.d/file.PNG"), "png");
  EXPECT_EQ(ExtensionOf("https://a.org/x.tar.gz?download=1#frag"), "gz");
  EXPECT_EQ(ExtensionOf("https://a.org/dir.png/readme"), "");
  EXPECT_EQ(ExtensionOf("noext"), "");
  EXPECT_EQ(ExtensionOf(".hidden"), "");
  EXPECT_EQ(ExtensionOf("trailing."), "");
}

TEST(ValidateFileTest, AcceptsByMagicWithWrongName) {
  EXPECT_EQ(ValidateFile(kPngHeader + "rest", "x.bin", PngSpec()),
            ValidationKind::kByMagic);
}

TEST(ValidateFileTest, AcceptsByExtensionCaseInsensitively) {
  EXPECT_EQ(ValidateFile("not a png", "IMAGE.PNG", PngSpec()),
            ValidationKind::kByExtension);
}

TEST(ValidateFileTest, RejectsWhenNeitherRuleHolds) {
  EXPECT_EQ(ValidateFile("GIF89a......", "image.gif", PngSpec()),
            std::nullopt);
  EXPECT_EQ(ValidateFile("", "", PngSpec()), std::nullopt);
}

TEST(ValidateFileTest, AliasesCount) {
  auto spec = SignatureTable::Bundled().SpecForExtension("jpeg");
  ASSERT_TRUE(spec.ok());
  EXPECT_EQ(ValidateFile("text", "photo.jpg", *spec),
            ValidationKind::kByExtension);
  EXPECT_EQ(ValidateFile("text", "photo.JFIF", *spec),
            ValidationKind::kByExtension);
}

TEST(ValidateFileTest, DescriptionModeAcceptsEverything) {
  auto spec = MakeDescriptionSpec("php_serialize");
  ASSERT_TRUE(spec.ok());
  EXPECT_EQ(ValidateFile("", "", *spec), ValidationKind::kUnfiltered);
  EXPECT_EQ(ValidateFile("a:1:{}", "x.png", *spec),
            ValidationKind::kUnfiltered);
  EXPECT_EQ(spec->MaterializedSuffix(), "");
  EXPECT_FALSE(MakeDescriptionSpec("   ").ok());
}

TEST(ValidateFileTest, OnlyLooksAtSignaturePrefix) {
  // Anything past the longest signature cannot change the verdict.
  const FileTypeSpec spec = PngSpec();
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    std::string tail(rng() % 64, '\0');
    for (char &c : tail) c = static_cast<char>(rng());
    EXPECT_EQ(ValidateFile(kPngHeader + tail, "f", spec),
              ValidationKind::kByMagic);
    EXPECT_EQ(ValidateFile("\x88PNG\r\n\x1a\n" + tail, "f", spec),
              std::nullopt);
  }
}

TEST(FileTypeSpecTest, Invariants) {
  FileTypeSpec spec = PngSpec();
  EXPECT_TRUE(CheckFileTypeSpec(spec).ok());
  spec.primary_extension = "";
  EXPECT_FALSE(CheckFileTypeSpec(spec).ok());

  FileTypeSpec desc = *MakeDescriptionSpec("lua bytecode");
  EXPECT_TRUE(CheckFileTypeSpec(desc).ok());
  desc.aliases.push_back("luac");
  EXPECT_FALSE(CheckFileTypeSpec(desc).ok());

  FileTypeSpec empty_sig = PngSpec();
  empty_sig.magic_signatures.push_back(MagicSignature{});
  EXPECT_FALSE(CheckFileTypeSpec(empty_sig).ok());
}

TEST(ContentDigestTest, KnownSha256) {
  EXPECT_EQ(ContentDigest(""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(ContentDigest("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(MakeSeedFileTest, FillsDerivedFields) {
  SeedFile f = MakeSeedFile("abc", SourceModule::kWeb, "https://x/abc",
                            ValidationKind::kByExtension);
  EXPECT_EQ(f.size_bytes, 3u);
  EXPECT_EQ(f.digest, ContentDigest("abc"));
  EXPECT_EQ(f.source_module, SourceModule::kWeb);
}

TEST(SourceModuleTest, NamesRoundTrip) {
  for (SourceModule m : kAllSourceModules) {
    EXPECT_EQ(ParseSourceModule(SourceModuleName(m)), m);
  }
  EXPECT_EQ(ParseSourceModule("nope"), std::nullopt);
}

TEST(DedupTest, CanonicalFirstCopyWins) {
  std::vector<SeedFile> files = {
      FakeSeed(SourceModule::kCommonCrawl, 5, "aa", "https://z"),
      FakeSeed(SourceModule::kWeb, 5, "aa", "https://b"),
      FakeSeed(SourceModule::kWeb, 5, "aa", "https://a"),
      FakeSeed(SourceModule::kGithub, 9, "bb"),
  };
  std::vector<SeedFile> out = Dedup(files);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].digest, "aa");
  EXPECT_EQ(out[0].source_module, SourceModule::kWeb);
  EXPECT_EQ(out[0].origin_url, "https://a");
  EXPECT_EQ(out[1].digest, "bb");
}

TEST(DedupTest, PropertyUniqueAndOrderIndependent) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<SeedFile> files;
    const int n = static_cast<int>(rng() % 60);
    for (int i = 0; i < n; ++i) {
      const int content = static_cast<int>(rng() % 15);
      files.push_back(MakeSeedFile(
          std::string(content, 'x'),
          kAllSourceModules[rng() % std::size(kAllSourceModules)],
          "https://h/" + std::to_string(rng() % 5), ValidationKind::kByMagic));
    }
    std::set<std::string> expected;
    for (const SeedFile &f : files) expected.insert(f.digest);
    std::vector<SeedFile> out = Dedup(files);
    std::set<std::string> got;
    for (const SeedFile &f : out) EXPECT_TRUE(got.insert(f.digest).second);
    EXPECT_EQ(got, expected);
    EXPECT_TRUE(std::is_sorted(out.begin(), out.end(), CanonicalLess));

    std::shuffle(files.begin(), files.end(), rng);
    std::vector<SeedFile> again = Dedup(files);
    ASSERT_EQ(again.size(), out.size());
    for (size_t i = 0; i < out.size(); ++i) {
      EXPECT_EQ(again[i].digest, out[i].digest);
      EXPECT_EQ(again[i].source_module, out[i].source_module);
      EXPECT_EQ(again[i].origin_url, out[i].origin_url);
    }
  }
}

TEST(NormalizeSubcorpusFilesTest, SortsByUrlAndDropsRepeats) {
  std::vector<SeedFile> files = {
      FakeSeed(SourceModule::kWeb, 1, "d1", "https://c"),
      FakeSeed(SourceModule::kWeb, 1, "d1", "https://a"),
      FakeSeed(SourceModule::kWeb, 2, "d2", "https://b"),
  };
  NormalizeSubcorpusFiles(files);
  ASSERT_EQ(files.size(), 2u);
  EXPECT_EQ(files[0].origin_url, "https://a");
  EXPECT_EQ(files[1].origin_url, "https://b");
}

}  // namespace
}  // namespace seedforge
