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

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>

#include <gtest/gtest.h>

#include "support/test_support.h"

using fdtest::TempDir;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(FD_FDETECT) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Cli, HelpSucceeds) {
  EXPECT_EQ(run("--help"), 0);
  EXPECT_EQ(run("train --help"), 0);
}

TEST(Cli, UsageErrorsExitOne) {
  EXPECT_EQ(run("no-such-command"), 1);
  EXPECT_EQ(run("train --epochs ten"), 1);
  EXPECT_EQ(run("train -s unknown_key=1"), 1);
}

TEST(Cli, MissingInputExitsOne) {
  TempDir dir;
  EXPECT_EQ(run("train --caches " + (dir / "missing.fdc").string() + " --run-dir " + dir.path().string()), 1);
}

TEST(Cli, CorruptCheckpointExitsTwo) {
  TempDir dir;
  const auto manifest = fdtest::write_dataset(dir.path(), {{"d", {"g"}, 2, 2}}, 1, 32);
  std::ofstream(dir / "head.fdh") << "FDHEAD garbage";
  EXPECT_EQ(run("eval -q --manifest " + manifest.string() + " --semantic toy:8:1 --structural toy:8:2" +
                " --checkpoint " + (dir / "head.fdh").string() + " --run-dir " + (dir / "out").string()),
            2);
}

TEST(Cli, PromptsEndToEnd) {
  TempDir dir;
  EXPECT_EQ(run("prompts -q --generators flux --prompt-count 5 --run-dir " + dir.path().string()), 0);
  std::ifstream in(dir / "prompts_flux.jsonl");
  int n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  EXPECT_EQ(n, 5);
}
