// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The gfmud Authors

int main() { return 0; }
