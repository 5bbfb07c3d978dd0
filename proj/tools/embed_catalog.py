#!/usr/bin/env python3
"""Regenerates include/provkit/catalog_data.hpp from data/benign_catalog.txt."""
import pathlib

root = pathlib.Path(__file__).resolve().parent.parent
src = (root / "data" / "benign_catalog.txt").read_text()
assert ')catalog"' not in src
(root / "include" / "provkit" / "catalog_data.hpp").write_text(
    "#pragma once\n\n#include <string_view>\n\nnamespace provkit {\n\n"
    "// Embedded copy of data/benign_catalog.txt; tests keep the two in sync.\n"
    'inline constexpr std::string_view kBenignCatalog = R"catalog(' + src + ')catalog";\n\n'
    "}  // namespace provkit\n"
)
