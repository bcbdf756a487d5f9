/*
 * Copyright 2026 The FusionDetect Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef FUSIONDETECT_SRC_FILE_UTIL_H_
#define FUSIONDETECT_SRC_FILE_UTIL_H_

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace fusiondetect::internal {

// kFileNotFound if missing, kIoError on read failure.
std::vector<char> read_file(const std::filesystem::path& path);
std::string read_text_file(const std::filesystem::path& path);

// Writes to a sibling temporary and renames over the target.
void write_file_atomic(const std::filesystem::path& path, std::span<const char> data);
void write_text_file(const std::filesystem::path& path, const std::string& text);

std::string trim(const std::string& s);
std::vector<std::string> split(const std::string& s, char sep);

}  // namespace fusiondetect::internal

#endif  // FUSIONDETECT_SRC_FILE_UTIL_H_
