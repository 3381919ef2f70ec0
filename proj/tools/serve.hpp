// Copyright 2026 The tsrank Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// HTTP front end over the C API: POST /rank and GET /healthz.

#pragma once

#include <string>

#include <httplib.h>

#include "tsrank/tsrank.h"

namespace tsrank::serve {

/// Maps a C API status to the HTTP status returned by /rank.
int http_status(tsrank_status status) noexcept;

/// Installs the routes and a request logger. `engine` must outlive `server`.
void register_routes(httplib::Server& server, const tsrank_engine* engine);

/// Binds, serves until SIGINT or SIGTERM, then drains and returns the exit
/// code. The caller must have blocked both signals in every thread.
int run(const tsrank_engine* engine, const std::string& host, int port);

}  // namespace tsrank::serve
