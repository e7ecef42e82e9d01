// Copyright The rom2l Authors
// SPDX-License-Identifier: Apache-2.0

#include "rom2l/cli.hpp"

int main(int argc, char **argv)
{
  return rom2l::cli::cli_main(argc, argv);
}
