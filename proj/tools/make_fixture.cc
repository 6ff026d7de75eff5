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

// Writes the end-to-end PNG fixture directory served by `seedforge gen
// --fixtures`. Output is byte-for-byte deterministic: images are synthesized,
// stub completions are keyed by the real prompt templates, and the crawl
// archive is assembled record by record.

#include <zlib.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fmt/format.h"
#include "json.hpp"
#include "seedforge/corpus_model.h"
#include "seedforge/fixture_server.h"
#include "seedforge/query_gen.h"
#include "seedforge/signature_table.h"
#include "seedforge/strings.h"
#include "seedforge/warc.h"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using namespace seedforge;

void Write(const fs::path &path, std::string_view content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) {
    std::cerr << "cannot write " << path << "\n";
    std::exit(1);
  }
}

void WriteJson(const fs::path &path, const json &doc) {
  Write(path, doc.dump(2) + "\n");
}

std::string BigEndian32(uint32_t v) {
  std::string out(4, '\0');
  for (int i = 0; i < 4; ++i) out[i] = static_cast<char>((v >> (24 - 8 * i)) & 0xff);
  return out;
}

std::string PngChunk(std::string_view type, std::string_view data) {
  std::string body = std::string(type) + std::string(data);
  const uint32_t crc = crc32(0, reinterpret_cast<const Bytef *>(body.data()),
                             static_cast<uInt>(body.size()));
  return BigEndian32(static_cast<uint32_t>(data.size())) + body + BigEndian32(crc);
}

// A valid RGB PNG whose pixels are a function of `seed`.
std::string MakePng(uint32_t width, uint32_t height, uint32_t seed) {
  std::string ihdr = BigEndian32(width) + BigEndian32(height);
  ihdr += std::string("\x08\x02\x00\x00\x00", 5);  // 8-bit RGB
  std::string raw;
  uint32_t state = seed * 2654435761u + 1;
  for (uint32_t y = 0; y < height; ++y) {
    raw += '\0';
    for (uint32_t x = 0; x < width * 3; ++x) {
      state = state * 1103515245u + 12345u;
      raw += static_cast<char>((state >> 16) & 0xff);
    }
  }
  uLongf size = compressBound(raw.size());
  std::string idat(size, '\0');
  compress2(reinterpret_cast<Bytef *>(idat.data()), &size,
            reinterpret_cast<const Bytef *>(raw.data()), raw.size(), 9);
  idat.resize(size);
  return std::string("\x89PNG\r\n\x1a\n", 8) + PngChunk("IHDR", ihdr) +
         PngChunk("IDAT", idat) + PngChunk("IEND", "");
}

class Fixture {
 public:
  explicit Fixture(fs::path root) : root_(std::move(root)) {
    spec_ = *SignatureTable::Bundled().SpecForExtension("png");
  }

  void Build(const json &knobs) {
    WriteJson(root_ / "fixture.json", knobs);
    BuildLlm();
    BuildGithub();
    BuildWeb();
    BuildTrackers();
    BuildCommonCrawl();
    WriteCoverage();
  }

 private:
  // Every PNG gets a stable index so coverage can be assigned per image.
  std::string Png(uint32_t w, uint32_t h) {
    std::string png = MakePng(w, h, next_png_);
    pngs_.push_back(png);
    ++next_png_;
    return png;
  }

  void Stub(const std::string &prompt, const std::vector<std::string> &lines) {
    std::string reply;
    for (const std::string &line : lines) reply += line + "\n";
    Write(root_ / "llm" / (StubLlmClient::PromptKey(prompt) + ".txt"), reply);
  }

  void BuildLlm() {
    std::vector<std::string> github, web, bugs, descriptors;
    for (int i = 1; i <= kGithubQueryCount; ++i) {
      github.push_back(fmt::format("png test images collection {}", i));
    }
    for (int i = 1; i <= kWebQueryCount; ++i) {
      web.push_back(fmt::format("sample png files download {}", i));
    }
    for (int i = 1; i <= kBugTrackerQueryCount; ++i) {
      bugs.push_back(fmt::format("png decoder crash attachment {}", i));
    }
    for (int i = 1; i <= kFeatureDescriptorCount; ++i) {
      descriptors.push_back(fmt::format("png feature number {}", i));
    }
    Stub(GithubPrompt(spec_, kGithubQueryCount), github);
    Stub(WebPrompt(spec_, kWebQueryCount), web);
    Stub(BugTrackerPrompt(spec_, kBugTrackerQueryCount), bugs);
    Stub(FeatureDescriptorPrompt(spec_, kFeatureDescriptorCount), descriptors);
    for (const std::string &d : descriptors) {
      std::vector<std::string> queries;
      for (int q = 1; q <= kQueriesPerFeature; ++q) {
        queries.push_back(fmt::format("{} example {}", d, q));
      }
      Stub(FeatureExpansionPrompt(spec_, d, kQueriesPerFeature), queries);
    }
  }

  void BuildGithub() {
    const fs::path a = root_ / "github" / "repos" / "pngfix" / "samples";
    Write(a / "README.md", "Sample images.\n");
    Write(a / "images" / "red.png", Png(2, 2));
    Write(a / "images" / "wide.png", Png(8, 1));
    Write(a / "images" / "UPPER.PNG", Png(3, 3));
    Write(a / "assets" / "icon", Png(4, 4));  // magic only
    Write(a / "notes.txt", "not an image\n");
    shared_ = Png(5, 5);
    Write(a / "shared.png", shared_);
    const fs::path b = root_ / "github" / "repos" / "pngfix" / "decoder-tests";
    Write(b / "tests" / "data" / "tiny.png", Png(1, 1));
    Write(b / "tests" / "data" / "copy-of-shared.png", shared_);
    Write(b / "src" / "decode.c", "int main(void) { return 0; }\n");
    WriteJson(root_ / "github" / "search.json",
              {{"*",
                {{{"full_name", "pngfix/samples"}, {"size", 4}},
                 {{"full_name", "pngfix/decoder-tests"}, {"size", 2}}}}});
  }

  void BuildWeb() {
    const fs::path a = root_ / "web" / "www.pngsamples.org";
    Write(a / "index.html",
          "<html><body><h1>PNG samples</h1>\n"
          "<img src=\"/img/logo.png\">\n"
          "<a href=\"gallery/one.html\">gallery</a>\n"
          "<a href=\"https://mirror.example.net/\">mirror</a>\n"
          "<a href=\"/shared.png\">shared</a>\n"
          "</body></html>\n");
    Write(a / "img" / "logo.png", Png(6, 2));
    Write(a / "shared.png", shared_);
    Write(a / "gallery" / "one.html",
          "<html><a href=\"two.html\">next</a>"
          "<a href=\"photo.png\">photo</a></html>\n");
    Write(a / "gallery" / "photo.png", Png(7, 3));
    Write(a / "gallery" / "two.html", "<html><a href=\"three.html\">next</a></html>\n");
    Write(a / "gallery" / "three.html",
          "<html><a href=\"deep.png\">deepest</a></html>\n");
    Write(a / "gallery" / "deep.png", Png(9, 2));  // depth 4
    const fs::path b = root_ / "web" / "mirror.example.net";
    Write(b / "robots.txt", "User-agent: *\nDisallow: /private/\n");
    Write(b / "index.html",
          "<html><a href=\"files/\">files</a>"
          "<a href=\"/private/secret.png\">secret</a></html>\n");
    Write(b / "files" / "index.html",
          "<html><a href=\"a.png\">a</a><a href=\"fake.png\">b</a>"
          "<a href=\"readme.txt\">c</a></html>\n");
    Write(b / "files" / "a.png", Png(2, 7));
    Write(b / "files" / "fake.png", "this is plainly not a png\n");
    Write(b / "files" / "readme.txt", "hello\n");
    Write(b / "private" / "secret.png", Png(3, 8));
    WriteJson(root_ / "search" / "results.json",
              {{"*",
                {"https://www.pngsamples.org/", "https://mirror.example.net/"}}});
  }

  void BuildTrackers() {
    const fs::path bz = root_ / "bugzilla";
    Write(bz / "files" / "crash.png", Png(4, 1));
    Write(bz / "files" / "poc", Png(1, 6));
    Write(bz / "files" / "old.png", Png(5, 1));
    Write(bz / "files" / "log.txt", "backtrace\n");
    WriteJson(bz / "bugs.json",
              json::array(
                  {{{"id", 1001},
                    {"summary", "libpng: crash on malformed chunk"},
                    {"attachments",
                     {{{"id", 5001}, {"file_name", "crash.png"},
                       {"content_type", "image/png"}, {"file", "crash.png"}},
                      {{"id", 5002}, {"file_name", "poc"},
                       {"content_type", "application/octet-stream"},
                       {"file", "poc"}},
                      {{"id", 5003}, {"file_name", "old.png"},
                       {"content_type", "image/png"}, {"file", "old.png"},
                       {"is_obsolete", true}}}}},
                   {{"id", 1002},
                    {"summary", "viewer hangs on big png"},
                    {"attachments",
                     {{{"id", 5004}, {"file_name", "log.txt"},
                       {"content_type", "text/plain"}, {"file", "log.txt"}}}}},
                   {{"id", 1003},
                    {"summary", "png rendering glitch"},
                    {"attachments", json::array()}}}));
    const fs::path lp = root_ / "launchpad";
    Write(lp / "files" / "screenshot.png", Png(6, 6));
    Write(lp / "files" / "dup.png", shared_);
    WriteJson(lp / "bugs.json",
              json::array(
                  {{{"id", 2001},
                    {"title", "eog crashes opening png"},
                    {"attachments",
                     {{{"id", 7001}, {"title", "screenshot.png"},
                       {"content_type", "image/png"},
                       {"file", "screenshot.png"}},
                      {{"id", 7002}, {"title", "dup.png"},
                       {"content_type", "image/png"}, {"file", "dup.png"}}}}},
                   {{"id", 2002},
                    {"title", "thumbnailer leak"},
                    {"attachments", json::array()}}}));
  }

  void AddRecord(const std::string &url, const std::string &mime,
                 const std::string &http_block, int status,
                 bool truncated = false) {
    const std::string id = fmt::format(
        "00000000-0000-4000-8000-{:012d}", static_cast<int>(rows_.size()) + 1);
    std::string record =
        BuildWarcResponseRecord(url, http_block, "2025-02-14T00:00:00Z", id);
    if (truncated) {
      const std::string marker = "WARC-Type: response\r\n";
      record.insert(record.find(marker) + marker.size(),
                    "WARC-Truncated: length\r\n");
    }
    const std::string member = GzipMember(record);
    json row;
    row["url"] = url;
    row["mime"] = mime;
    row["status"] = std::to_string(status);
    row["timestamp"] = "20250214000000";
    row["filename"] = kArchive;
    row["offset"] = std::to_string(archive_.size());
    row["length"] = std::to_string(member.size());
    archive_ += member;
    rows_.push_back(std::move(row));
  }

  static std::string HttpBlock(const std::string &type, std::string_view body,
                               const std::string &extra = "") {
    return fmt::format(
        "HTTP/1.1 200 OK\r\nContent-Type: {}\r\nContent-Length: {}\r\n{}\r\n{}",
        type, body.size(), extra, body);
  }

  void BuildCommonCrawl() {
    const std::string one = Png(10, 1);
    AddRecord("https://images.example.org/one.png", "image/png",
              HttpBlock("image/png", one), 200);
    const std::string two = Png(1, 10);
    AddRecord("https://cdn.example.com/assets/two.png", "image/png",
              HttpBlock("image/png", two), 200);
    const std::string three = Png(3, 5);
    AddRecord("http://static.example.edu/pic?id=3", "image/png",
              HttpBlock("image/png", GzipMember(three),
                        "Content-Encoding: gzip\r\n"),
              200);
    const std::string cut = Png(11, 2);
    AddRecord("https://images.example.org/cut.png", "image/png",
              HttpBlock("image/png", cut), 200, /*truncated=*/true);
    AddRecord("https://images.example.org/missing.png", "image/png",
              "HTTP/1.1 404 Not Found\r\nContent-Length: 0\r\n\r\n", 404);
    AddRecord("https://cdn.example.com/liar.png", "image/png",
              HttpBlock("image/png", "<html>not a png</html>"), 200);
    AddRecord("https://images.example.org/", "text/html",
              HttpBlock("text/html", "<html></html>"), 200);
    // A row that claims a mime the spec does not list exactly.
    AddRecord("https://cdn.example.com/x.png", "image/x-png",
              HttpBlock("image/png", Png(2, 9)), 200);
    Write(root_ / "commoncrawl" / kArchive, archive_);
    std::string index;
    for (const json &row : rows_) index += row.dump() + "\n";
    Write(root_ / "commoncrawl" / "index.ndjson", index);
  }

  // Edge sets chosen so some larger images add nothing new.
  void WriteCoverage() {
    json coverage = json::object();
    for (size_t i = 0; i < pngs_.size(); ++i) {
      coverage[ContentDigest(pngs_[i])] =
          json::array({static_cast<int>(i % 6), 100 + static_cast<int>(i % 4)});
    }
    WriteJson(root_ / "coverage.json", coverage);
  }

  static constexpr char kArchive[] =
      "crawl-data/CC-MAIN-2025-08/segments/1739000000000.0/warc/"
      "CC-MAIN-fixture-00000.warc.gz";

  fs::path root_;
  FileTypeSpec spec_;
  std::vector<std::string> pngs_;
  uint32_t next_png_ = 1;
  std::string shared_;
  std::string archive_;
  std::vector<json> rows_;
};

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Writes the PNG fixture directory for end-to-end runs"};
  std::string out;
  double stall_seconds = 0;
  std::string stall_hosts;
  int politeness_ms = 5;
  app.add_option("--out", out, "Directory to (re)create")->required();
  app.add_option("--stall-seconds", stall_seconds, "Delay before every response");
  app.add_option("--stall-hosts", stall_hosts,
                 "Comma-separated hosts to stall, or *");
  app.add_option("--politeness-ms", politeness_ms, "Crawler delay per host");
  CLI11_PARSE(app, argc, argv);

  std::error_code ec;
  fs::remove_all(out, ec);
  json knobs;
  knobs["politeness_ms"] = politeness_ms;
  if (stall_seconds > 0) {
    knobs["stall_seconds"] = stall_seconds;
    knobs["stall_hosts"] = SplitTrimmed(stall_hosts.empty() ? "*" : stall_hosts, ',');
  }
  Fixture(out).Build(knobs);
  return 0;
}
