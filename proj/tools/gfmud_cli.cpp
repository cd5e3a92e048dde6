// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The gfmud Authors

#include "gfmud/harness.hpp"

int main(int argc, char** argv) { return gfmud::run_cli(argc, argv); }
