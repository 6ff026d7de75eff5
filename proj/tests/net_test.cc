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

// URL handling, robots.txt, link extraction, archive records, the CDX
// parser and the crawler against a loopback fixture server.

#include <set>

#include "gtest/gtest.h"
#include "seedforge/commoncrawl.h"
#include "seedforge/crawler.h"
#include "seedforge/fixture_server.h"
#include "seedforge/html_links.h"
#include "seedforge/http_client.h"
#include "seedforge/robots.h"
#include "seedforge/signature_table.h"
#include "seedforge/url.h"
#include "seedforge/warc.h"
#include "test_support.h"

namespace seedforge {
namespace {

using ::seedforge::testing::TempDir;
using ::seedforge::testing::WriteFile;

const std::string kPng("\x89PNG\r\n\x1a\n\0\0\0\rIHDR", 16);

TEST(UrlTest, ResolvesRfc3986Examples) {
  const Url base = *Url::Parse("http://a/b/c/d;p?q");
  const std::pair<const char *, const char *> cases[] = {
      {"g", "http://a/b/c/g"},         {"./g", "http://a/b/c/g"},
      {"g/", "http://a/b/c/g/"},       {"/g", "http://a/g"},
      {"//g", "http://g/"},            {"?y", "http://a/b/c/d;p?y"},
      {"g?y", "http://a/b/c/g?y"},     {"#s", "http://a/b/c/d;p?q#s"},
      {"", "http://a/b/c/d;p?q"},      {"..", "http://a/b/"},
      {"../g", "http://a/b/g"},        {"../../g", "http://a/g"},
      {"../../../g", "http://a/g"},    {"/./g", "http://a/g"},
      {"g.", "http://a/b/c/g."},       {"g;x=1/../y", "http://a/b/c/y"},
  };
  for (const auto &[ref, want] : cases) {
    auto got = base.Resolve(ref);
    ASSERT_TRUE(got.has_value()) << ref;
    EXPECT_EQ(got->ToString(), want) << ref;
  }
}

TEST(UrlTest, Canonicalization) {
  EXPECT_EQ(CanonicalizeUrl("HTTP://Example.ORG:80/a/./b/../c#frag"),
            "http://example.org/a/c");
  EXPECT_EQ(CanonicalizeUrl("https://x.org:8443"), "https://x.org:8443/");
  EXPECT_EQ(CanonicalizeUrl("mailto:someone"), std::nullopt);
  EXPECT_EQ(RemoveDotSegments("/a/b/c/./../../g"), "/a/g");
}

TEST(UrlTest, FormEncoding) {
  EXPECT_EQ(UrlEncode("a b&c=d/é"), "a%20b%26c%3Dd%2F%C3%A9");
  EXPECT_EQ(UrlDecode("a+b%26c%3dd"), "a b&c=d");
}

TEST(RobotsTest, LongestMatchWins) {
  RobotsRules rules = RobotsRules::Parse(
      "User-agent: other\nDisallow: /\n\n"
      "User-agent: *\nDisallow: /private/\nAllow: /private/public\n"
      "Disallow: /*.cgi$\n",
      "seedforge");
  EXPECT_TRUE(rules.Allowed("/index.html"));
  EXPECT_FALSE(rules.Allowed("/private/x.png"));
  EXPECT_TRUE(rules.Allowed("/private/public/x.png"));
  EXPECT_FALSE(rules.Allowed("/bin/run.cgi"));
  EXPECT_TRUE(rules.Allowed("/bin/run.cgi?x"));
}

TEST(RobotsTest, SpecificAgentGroupApplies) {
  RobotsRules rules = RobotsRules::Parse(
      "User-agent: *\nDisallow: /\n\nUser-agent: SeedForge\nDisallow: /x\n",
      "seedforge/1.0");
  EXPECT_TRUE(rules.Allowed("/y"));
  EXPECT_FALSE(rules.Allowed("/x"));
  EXPECT_TRUE(RobotsRules().Allowed("/anything"));
}

TEST(HtmlLinksTest, ExtractsAttributesInOrder) {
  ExtractedLinks links = ExtractLinks(
      "<html><head><base href='/root/'><script>var a='<a href=\"no\">'"
      "</script><style>.x{background:url(no.png)}</style></head>"
      "<!-- <a href='commented.png'> -->"
      "<body><a HREF=\"a.png\">x</a><img src=b.png>"
      "<object data='c.png'></object><a href='d?x=1&amp;y=2'>d</a></body>");
  EXPECT_EQ(links.base_href, "/root/");
  EXPECT_EQ(links.links,
            (std::vector<std::string>{"a.png", "b.png", "c.png",
                                      "d?x=1&y=2"}));
  EXPECT_TRUE(LooksLikeHtml("  <!DOCTYPE html><html>"));
  EXPECT_FALSE(LooksLikeHtml(kPng));
}

TEST(WarcTest, GzipRoundTripAndLimits) {
  const std::string data(5000, 'z');
  const std::string gz = GzipMember(data);
  EXPECT_EQ(*GunzipMember(gz, 10000), data);
  EXPECT_EQ(GunzipMember(gz, 100).status().code(),
            absl::StatusCode::kResourceExhausted);
  EXPECT_EQ(GunzipMember(gz.substr(0, gz.size() / 2), 10000).status().code(),
            absl::StatusCode::kDataLoss);
  EXPECT_EQ(GzipMember(data), gz);
}

TEST(WarcTest, ResponseRecordRoundTrip) {
  const std::string http =
      "HTTP/1.1 200 OK\r\nContent-Type: image/png\r\nContent-Length: " +
      std::to_string(kPng.size()) + "\r\n\r\n" + kPng;
  const std::string record = BuildWarcResponseRecord(
      "https://x.org/a.png", http, "2025-02-14T00:00:00Z",
      "<urn:uuid:00000000-0000-0000-0000-000000000001>");
  auto parsed = ParseWarcRecord(record);
  ASSERT_TRUE(parsed.ok()) << parsed.status();
  EXPECT_EQ(parsed->version, "WARC/1.0");
  EXPECT_EQ(parsed->Header("warc-type"), "response");
  EXPECT_EQ(parsed->Header("warc-target-uri"), "https://x.org/a.png");
  auto response = ParseArchivedResponse(parsed->block, 1 << 20);
  ASSERT_TRUE(response.ok()) << response.status();
  EXPECT_EQ(response->status, 200);
  EXPECT_EQ(response->payload, kPng);
  EXPECT_FALSE(ParseWarcRecord(record.substr(0, record.size() - 5)).ok());
  EXPECT_FALSE(ParseWarcRecord("HTTP/1.1 200 OK\r\n\r\n").ok());
}

TEST(WarcTest, ChunkedAndGzipPayloadsAreDecoded) {
  const std::string chunked =
      "HTTP/1.1 200 OK\r\nTransfer-Encoding: chunked\r\n\r\n"
      "5\r\nhello\r\n6\r\n world\r\n0\r\n\r\n";
  auto a = ParseArchivedResponse(chunked, 1 << 20);
  ASSERT_TRUE(a.ok()) << a.status();
  EXPECT_EQ(a->payload, "hello world");
  const std::string gz = GzipMember(kPng);
  const std::string encoded =
      "HTTP/1.1 200 OK\r\nContent-Encoding: gzip\r\nContent-Length: " +
      std::to_string(gz.size()) + "\r\n\r\n" + gz;
  auto b = ParseArchivedResponse(encoded, 1 << 20);
  ASSERT_TRUE(b.ok()) << b.status();
  EXPECT_EQ(b->payload, kPng);
  const std::string short_body =
      "HTTP/1.1 200 OK\r\nContent-Length: 100\r\n\r\nabc";
  EXPECT_EQ(ParseArchivedResponse(short_body, 1 << 20).status().code(),
            absl::StatusCode::kDataLoss);
}

TEST(CdxTest, KeepsExactMimeAndOkStatus) {
  const std::string text =
      R"({"url":"https://a.org/1.png","mime":"image/png","status":"200","filename":"f.warc.gz","offset":"10","length":"20"})"
      "\n"
      R"({"url":"https://a.org/2.png","mime":"image/x-png","status":"200","filename":"f.warc.gz","offset":"30","length":"20"})"
      "\n"
      R"({"url":"https://a.org/3.png","mime":"image/png","status":"404","filename":"f.warc.gz","offset":"50","length":"20"})"
      "\n"
      "not json\n"
      R"({"url":"https://a.org/4.png","mime":"image/png","filename":"g.warc.gz","offset":"70","length":"5"})"
      "\n";
  std::vector<CrawlRecordRef> refs = ParseCdxLines(text, "image/png");
  ASSERT_EQ(refs.size(), 2u);
  EXPECT_EQ(refs[0], (CrawlRecordRef{"f.warc.gz", 10, 20, "https://a.org/1.png",
                                     "image/png"}));
  EXPECT_EQ(refs[1].archive_path, "g.warc.gz");
}

// web/site.test/ with a link chain index -> l1 -> l2 -> l3 -> deep.png, a
// robots-protected file and a duplicated image.
class CrawlerTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const std::string web = fixture_ / "web/site.test";
    WriteFile(web + "/index.html",
              "<a href='l1.html'>1</a><img src='img/top.png'>"
              "<a href='private/secret.png'>s</a><a href='//other.test/'>o</a>");
    WriteFile(web + "/l1.html", "<a href='l2.html'>2</a><img src='img/top.png'>");
    WriteFile(web + "/l2.html", "<a href='l3.html'>3</a><a href='img/two'>x</a>");
    WriteFile(web + "/l3.html", "<a href='img/deep.png'>deep</a>");
    WriteFile(web + "/img/top.png", kPng + "top");
    WriteFile(web + "/img/two", kPng + "two");
    WriteFile(web + "/img/deep.png", kPng + "deep");
    WriteFile(web + "/private/secret.png", kPng + "secret");
    WriteFile(web + "/robots.txt", "User-agent: *\nDisallow: /private/\n");
    WriteFile(fixture_ / "web/other.test/index.html",
              "<img src='/x.png'><img src='/not-really.png'>");
    WriteFile(fixture_ / "web/other.test/x.png", kPng + "other");
    WriteFile(fixture_ / "web/other.test/not-really.gif", "GIF89a");
    auto server = FixtureServer::Create(fixture_.path(), FixtureKnobs{});
    ASSERT_TRUE(server.ok()) << server.status();
    server_ = *std::move(server);
    ASSERT_TRUE(server_->Start().ok());
    HttpClientOptions http;
    http.host_override = server_->origin();
    http_ = std::make_unique<DefaultHttpClient>(http);
  }

  std::set<std::string> CrawlUrls(std::optional<int> depth, bool robots) {
    CrawlOptions options;
    options.max_depth = depth;
    options.politeness_delay = std::chrono::milliseconds(0);
    options.honor_robots = robots;
    options.parallelism = 4;
    Budget budget(std::chrono::seconds(30));
    Subcorpus sub = Crawl({"http://site.test/index.html"},
                          *SignatureTable::Bundled().SpecForExtension("png"),
                          options, *http_, budget);
    std::set<std::string> urls;
    for (const SeedFile &f : sub.files) urls.insert(f.origin_url);
    return urls;
  }

  TempDir fixture_;
  std::unique_ptr<FixtureServer> server_;
  std::unique_ptr<DefaultHttpClient> http_;
};

TEST_F(CrawlerTest, DepthLimitAndRobots) {
  EXPECT_EQ(CrawlUrls(3, true),
            (std::set<std::string>{"http://site.test/img/top.png",
                                   "http://site.test/img/two",
                                   "http://other.test/x.png"}));
  bool deep_requested = false;
  for (const FixtureRequest &r : server_->requests()) {
    if (r.path.find("deep.png") != std::string::npos) deep_requested = true;
    EXPECT_EQ(r.path.find("secret"), std::string::npos);
  }
  EXPECT_FALSE(deep_requested);
}

TEST_F(CrawlerTest, UnlimitedDepthWithoutRobots) {
  EXPECT_EQ(CrawlUrls(std::nullopt, false),
            (std::set<std::string>{"http://site.test/img/top.png",
                                   "http://site.test/img/two",
                                   "http://site.test/img/deep.png",
                                   "http://site.test/private/secret.png",
                                   "http://other.test/x.png"}));
}

TEST_F(CrawlerTest, FrontierSeesEachUrlOnce) {
  CrawlFrontier frontier;
  EXPECT_TRUE(frontier.Add("http://a.test/x", 0));
  EXPECT_FALSE(frontier.Add("HTTP://A.test:80/./x#f", 1));
  EXPECT_FALSE(frontier.Add("not a url", 0));
  auto e = frontier.Pop();
  ASSERT_TRUE(e.has_value());
  EXPECT_EQ(e->url, "http://a.test/x");
  EXPECT_TRUE(frontier.Empty());
}

TEST_F(CrawlerTest, ServerStallsOnlyListedHosts) {
  FixtureKnobs knobs;
  knobs.stall_seconds = 5;
  knobs.stall_hosts = {"slow.test"};
  WriteFile(fixture_ / "web/slow.test/index.html", "<a href='x.png'>x</a>");
  auto server = FixtureServer::Create(fixture_.path(), knobs);
  ASSERT_TRUE(server.ok());
  ASSERT_TRUE((*server)->Start().ok());
  HttpClientOptions options;
  options.host_override = (*server)->origin();
  DefaultHttpClient http(options);
  Budget budget(std::chrono::milliseconds(500));
  const auto start = Clock::now();
  HttpRequest slow;
  slow.url = "http://slow.test/index.html";
  auto r = http.Fetch(slow, budget);
  EXPECT_FALSE(r.ok());
  EXPECT_LT(Clock::now() - start, std::chrono::seconds(3));
  Budget fresh(std::chrono::seconds(5));
  HttpRequest fast;
  fast.url = "http://site.test/l1.html";
  auto ok = http.Fetch(fast, fresh);
  ASSERT_TRUE(ok.ok()) << ok.status();
  EXPECT_EQ(ok->status, 200);
  (*server)->Stop();
}

}  // namespace
}  // namespace seedforge
