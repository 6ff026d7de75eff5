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

// WARC/1.x record handling for per-record gzip archives: inflate one gzip
// member, split the WARC header from the content block, and split archived
// HTTP responses into status, headers and payload.

#ifndef SEEDFORGE_WARC_H_
#define SEEDFORGE_WARC_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "seedforge/http_client.h"

namespace seedforge {

// Inflates the first gzip member of `data`. ResourceExhausted if the output
// would exceed `max_output`; DataLoss on corrupt or incomplete input.
absl::StatusOr<std::string> GunzipMember(std::string_view data,
                                         uint64_t max_output);

// One gzip member holding `data` (deterministic: no name, mtime 0).
std::string GzipMember(std::string_view data);

struct WarcRecord {
  std::string version;  // "WARC/1.0"
  HttpHeaders headers;  // lowercased names
  std::string block;

  std::string Header(const std::string &lower_name) const;
};

// Parses one uncompressed record. DataLoss when the version line or headers
// are malformed, or the block is shorter than its Content-Length.
absl::StatusOr<WarcRecord> ParseWarcRecord(std::string_view data);

struct ArchivedResponse {
  int status = 0;
  HttpHeaders headers;
  std::string payload;
};

// Splits an archived HTTP response block. Chunked transfer coding and gzip
// content coding still present in the archive are undone. DataLoss when the
// payload is shorter than the declared Content-Length.
absl::StatusOr<ArchivedResponse> ParseArchivedResponse(std::string_view block,
                                                       uint64_t max_payload);

// A "response" record for `target_uri` whose block is `http_block`. Used to
// build fixture archives.
std::string BuildWarcResponseRecord(const std::string &target_uri,
                                    std::string_view http_block,
                                    const std::string &date,
                                    const std::string &record_id);

}  // namespace seedforge

#endif  // SEEDFORGE_WARC_H_
