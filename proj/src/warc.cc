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

#include "seedforge/warc.h"

#include <zlib.h>

#include <cstring>

#include "absl/status/status.h"
#include "fmt/format.h"
#include "seedforge/strings.h"

namespace seedforge {
namespace {

// Splits "Name: value" lines up to the first empty line. Returns the offset
// just past the blank line, or npos when there is none.
size_t ParseHeaderBlock(std::string_view data, size_t pos, HttpHeaders &out,
                        bool &malformed) {
  malformed = false;
  std::string last_name;
  while (pos < data.size()) {
    size_t eol = data.find('\n', pos);
    if (eol == std::string_view::npos) return std::string_view::npos;
    std::string_view line = data.substr(pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = eol + 1;
    if (line.empty()) return pos;
    if ((line.front() == ' ' || line.front() == '\t') && !last_name.empty()) {
      out[last_name] += " " + std::string(Trim(line));  // folded continuation
      continue;
    }
    const size_t colon = line.find(':');
    if (colon == std::string_view::npos || colon == 0) {
      malformed = true;
      return std::string_view::npos;
    }
    last_name = ToLower(Trim(line.substr(0, colon)));
    out[last_name] = std::string(Trim(line.substr(colon + 1)));
  }
  return std::string_view::npos;
}

absl::StatusOr<std::string> Dechunk(std::string_view body, uint64_t max) {
  std::string out;
  size_t pos = 0;
  while (true) {
    const size_t eol = body.find("\r\n", pos);
    if (eol == std::string_view::npos) {
      return absl::DataLossError("truncated chunked payload");
    }
    std::string_view size_line = body.substr(pos, eol - pos);
    size_line = size_line.substr(0, size_line.find(';'));
    std::optional<uint64_t> size = ParseInt<uint64_t>(size_line, 16);
    if (!size) return absl::DataLossError("bad chunk size");
    pos = eol + 2;
    if (*size == 0) return out;
    if (pos + *size > body.size()) {
      return absl::DataLossError("truncated chunked payload");
    }
    if (out.size() + *size > max) {
      return absl::ResourceExhaustedError("payload over the size cap");
    }
    out.append(body.substr(pos, *size));
    pos += *size + 2;
  }
}

}  // namespace

absl::StatusOr<std::string> GunzipMember(std::string_view data,
                                         uint64_t max_output) {
  z_stream stream;
  std::memset(&stream, 0, sizeof(stream));
  if (inflateInit2(&stream, 16 + MAX_WBITS) != Z_OK) {
    return absl::InternalError("inflateInit2 failed");
  }
  stream.next_in =
      reinterpret_cast<Bytef *>(const_cast<char *>(data.data()));
  stream.avail_in = static_cast<uInt>(data.size());
  std::string out;
  char buffer[64 * 1024];
  int rc = Z_OK;
  while (rc != Z_STREAM_END) {
    stream.next_out = reinterpret_cast<Bytef *>(buffer);
    stream.avail_out = sizeof(buffer);
    rc = inflate(&stream, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      inflateEnd(&stream);
      if (rc == Z_BUF_ERROR) {
        return absl::DataLossError("truncated gzip member");
      }
      return absl::DataLossError(fmt::format("corrupt gzip member ({})", rc));
    }
    const size_t produced = sizeof(buffer) - stream.avail_out;
    if (out.size() + produced > max_output) {
      inflateEnd(&stream);
      return absl::ResourceExhaustedError("inflated record over the size cap");
    }
    out.append(buffer, produced);
    if (rc == Z_OK && stream.avail_in == 0 && produced == 0) {
      inflateEnd(&stream);
      return absl::DataLossError("truncated gzip member");
    }
  }
  inflateEnd(&stream);
  return out;
}

std::string GzipMember(std::string_view data) {
  z_stream stream;
  std::memset(&stream, 0, sizeof(stream));
  deflateInit2(&stream, Z_BEST_COMPRESSION, Z_DEFLATED, 16 + MAX_WBITS, 9,
               Z_DEFAULT_STRATEGY);
  stream.next_in = reinterpret_cast<Bytef *>(const_cast<char *>(data.data()));
  stream.avail_in = static_cast<uInt>(data.size());
  std::string out(deflateBound(&stream, data.size()) + 32, '\0');
  stream.next_out = reinterpret_cast<Bytef *>(out.data());
  stream.avail_out = static_cast<uInt>(out.size());
  deflate(&stream, Z_FINISH);
  out.resize(stream.total_out);
  deflateEnd(&stream);
  return out;
}

std::string WarcRecord::Header(const std::string &lower_name) const {
  auto it = headers.find(lower_name);
  return it == headers.end() ? std::string() : it->second;
}

absl::StatusOr<WarcRecord> ParseWarcRecord(std::string_view data) {
  const size_t eol = data.find('\n');
  if (eol == std::string_view::npos) {
    return absl::DataLossError("WARC record has no version line");
  }
  WarcRecord record;
  record.version = std::string(Trim(data.substr(0, eol)));
  if (!record.version.starts_with("WARC/")) {
    return absl::DataLossError(
        fmt::format("not a WARC record (\"{}\")", record.version.substr(0, 16)));
  }
  bool malformed = false;
  const size_t body = ParseHeaderBlock(data, eol + 1, record.headers, malformed);
  if (body == std::string_view::npos) {
    return absl::DataLossError(malformed ? "malformed WARC header"
                                         : "truncated WARC header");
  }
  std::optional<uint64_t> length =
      ParseInt<uint64_t>(record.Header("content-length"));
  if (!length) return absl::DataLossError("WARC record without Content-Length");
  if (data.size() - body < *length) {
    return absl::DataLossError(
        fmt::format("WARC block truncated: {} of {} bytes", data.size() - body,
                    *length));
  }
  record.block = std::string(data.substr(body, *length));
  return record;
}

absl::StatusOr<ArchivedResponse> ParseArchivedResponse(std::string_view block,
                                                       uint64_t max_payload) {
  const size_t eol = block.find('\n');
  if (eol == std::string_view::npos) {
    return absl::DataLossError("archived response has no status line");
  }
  std::string_view status_line = Trim(block.substr(0, eol));
  if (!status_line.starts_with("HTTP/")) {
    return absl::DataLossError("archived response has no HTTP status line");
  }
  const size_t sp = status_line.find(' ');
  ArchivedResponse response;
  std::optional<int> status =
      sp == std::string_view::npos
          ? std::nullopt
          : ParseInt<int>(status_line.substr(sp + 1, 3));
  if (!status) return absl::DataLossError("bad HTTP status line");
  response.status = *status;
  bool malformed = false;
  const size_t body = ParseHeaderBlock(block, eol + 1, response.headers,
                                       malformed);
  if (body == std::string_view::npos) {
    return absl::DataLossError("malformed archived HTTP headers");
  }
  std::string_view payload = block.substr(body);
  auto header = [&](const char *name) {
    auto it = response.headers.find(name);
    return it == response.headers.end() ? std::string() : ToLower(it->second);
  };
  if (header("transfer-encoding").find("chunked") != std::string::npos) {
    absl::StatusOr<std::string> dechunked = Dechunk(payload, max_payload);
    if (!dechunked.ok()) return dechunked.status();
    response.payload = *std::move(dechunked);
  } else {
    if (std::optional<uint64_t> declared =
            ParseInt<uint64_t>(header("content-length"));
        declared && payload.size() < *declared) {
      return absl::DataLossError(
          fmt::format("archived payload truncated: {} of {} bytes",
                      payload.size(), *declared));
    }
    if (payload.size() > max_payload) {
      return absl::ResourceExhaustedError("payload over the size cap");
    }
    response.payload = std::string(payload);
  }
  const std::string coding = header("content-encoding");
  if (coding == "gzip" || coding == "x-gzip") {
    absl::StatusOr<std::string> inflated =
        GunzipMember(response.payload, max_payload);
    if (!inflated.ok()) return inflated.status();
    response.payload = *std::move(inflated);
  }
  if (response.payload.size() > max_payload) {
    return absl::ResourceExhaustedError("payload over the size cap");
  }
  return response;
}

std::string BuildWarcResponseRecord(const std::string &target_uri,
                                    std::string_view http_block,
                                    const std::string &date,
                                    const std::string &record_id) {
  return fmt::format(
      "WARC/1.0\r\n"
      "WARC-Type: response\r\n"
      "WARC-Date: {}\r\n"
      "WARC-Record-ID: <urn:uuid:{}>\r\n"
      "WARC-Target-URI: {}\r\n"
      "Content-Type: application/http; msgtype=response\r\n"
      "Content-Length: {}\r\n"
      "\r\n"
      "{}\r\n\r\n",
      date, record_id, target_uri, http_block.size(), http_block);
}

}  // namespace seedforge
