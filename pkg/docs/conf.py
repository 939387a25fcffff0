# -*- coding: utf-8 -*-
#
# Configuration file for the Sphinx documentation builder.

import os
import sys
from pathlib import Path

sys.path.insert(0, str((Path(__file__).parent.parent / "src").absolute()))

# -- General configuration -----------------------------------------------------

extensions = ["sphinx.ext.autodoc", "sphinx.ext.imgmath"]
templates_path = ["_templates"]
source_suffix = ".rst"
master_doc = "index"

project = "painleve-gap"
copyright = "2024, Painleve-Gap developers"

version = "0.1.0"

autoclass_content = "both"

exclude_patterns = ["_build"]

pygments_style = "sphinx"

# -- Options for HTML output ---------------------------------------------------

on_rtd = os.environ.get("READTHEDOCS", None) == "True"

if not on_rtd:  # only import and set the theme if we're building docs locally
    try:
        import sphinx_rtd_theme
    except ModuleNotFoundError:
        html_theme = "default"
    else:
        html_theme = "sphinx_rtd_theme"
        html_theme_path = [sphinx_rtd_theme.get_html_theme_path()]

htmlhelp_basename = "painlevegapdoc"

# -- Options for LaTeX output --------------------------------------------------

latex_documents = [
    (
        "index",
        "painleve_gap.tex",
        "painleve-gap Documentation",
        "Painleve-Gap developers",
        "manual",
    ),
]

# -- Options for manual page output --------------------------------------------

man_pages = [
    (
        "index",
        "painleve-gap",
        "painleve-gap Documentation",
        ["Painleve-Gap developers"],
        1,
    )
]

# -- Options for autodoc -------------------------------------------

autodoc_mock_imports = ["numpy", "scipy", "pandas", "platformdirs", "packaging"]
